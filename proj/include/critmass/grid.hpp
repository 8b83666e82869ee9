#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace critmass {

/**
 * Nodes of the mass variable xi = r^2 on [0, 1].
 *
 * Graded grids place node i at (i/N)^gamma so that gamma > 1 concentrates
 * resolution near the degenerate endpoint xi = 0. Nodes are strictly
 * increasing with xi_0 = 0 and xi_N = 1, and N >= 16.
 */
class Grid {
 public:
  static constexpr std::size_t kMinIntervals = 16;

  /// Builds xi_i = (i/N)^gamma, i = 0..N. Requires N >= 16, gamma >= 1.
  static std::shared_ptr<const Grid> graded(std::size_t intervals, double gamma = 1.0);

  /// Arbitrary node set; validated against the invariants above.
  explicit Grid(std::vector<double> nodes, double gamma = 1.0);

  std::span<const double> nodes() const { return nodes_; }
  double operator[](std::size_t i) const { return nodes_[i]; }

  /// Number of nodes, N + 1.
  std::size_t size() const { return nodes_.size(); }
  /// Number of intervals, N.
  std::size_t intervals() const { return nodes_.size() - 1; }
  double gamma() const { return gamma_; }

  /// xi_{i+1} - xi_i.
  double spacing(std::size_t i) const { return nodes_[i + 1] - nodes_[i]; }
  double min_spacing() const;

  /// Radii r_i = sqrt(xi_i).
  std::vector<double> radii() const;

  bool same_nodes(const Grid& other) const { return nodes_ == other.nodes_; }

 private:
  std::vector<double> nodes_;
  double gamma_;
};

using GridPtr = std::shared_ptr<const Grid>;

}  // namespace critmass
