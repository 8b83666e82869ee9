#include "critmass/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace critmass {

std::shared_ptr<const Grid> Grid::graded(std::size_t intervals, double gamma) {
  if (intervals < kMinIntervals) {
    throw std::invalid_argument("grid needs at least " + std::to_string(kMinIntervals) +
                                " intervals, got " + std::to_string(intervals));
  }
  if (!(gamma >= 1.0) || !std::isfinite(gamma)) {
    throw std::invalid_argument("grid grading exponent must be >= 1");
  }
  std::vector<double> nodes(intervals + 1);
  const double n = static_cast<double>(intervals);
  for (std::size_t i = 0; i <= intervals; ++i) {
    const double s = static_cast<double>(i) / n;
    if (gamma == 1.0) {
      nodes[i] = s;
    } else if (gamma == 2.0) {
      nodes[i] = s * s;
    } else {
      nodes[i] = std::pow(s, gamma);
    }
  }
  nodes.front() = 0.0;
  nodes.back() = 1.0;
  return std::make_shared<const Grid>(std::move(nodes), gamma);
}

Grid::Grid(std::vector<double> nodes, double gamma) : nodes_(std::move(nodes)), gamma_(gamma) {
  if (nodes_.size() < kMinIntervals + 1) {
    throw std::invalid_argument("grid needs at least " + std::to_string(kMinIntervals + 1) +
                                " nodes");
  }
  if (nodes_.front() != 0.0 || nodes_.back() != 1.0) {
    throw std::invalid_argument("grid must start at xi = 0 and end at xi = 1");
  }
  for (std::size_t i = 1; i < nodes_.size(); ++i) {
    if (!(nodes_[i] > nodes_[i - 1])) {
      throw std::invalid_argument("grid nodes must be strictly increasing (node " +
                                  std::to_string(i) + ")");
    }
  }
}

double Grid::min_spacing() const {
  double h = nodes_[1] - nodes_[0];
  for (std::size_t i = 1; i + 1 < nodes_.size(); ++i) h = std::min(h, spacing(i));
  return h;
}

std::vector<double> Grid::radii() const {
  std::vector<double> r(nodes_.size());
  std::transform(nodes_.begin(), nodes_.end(), r.begin(), [](double x) { return std::sqrt(x); });
  return r;
}

}  // namespace critmass
