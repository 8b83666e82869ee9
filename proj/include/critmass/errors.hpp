#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace critmass {

/// A precondition that fails at a specific grid node.
class NodeError : public std::domain_error {
 public:
  NodeError(const std::string& what, std::size_t node)
      : std::domain_error(what + " (node " + std::to_string(node) + ")"), node_(node) {}

  std::size_t node() const { return node_; }

 private:
  std::size_t node_;
};

}  // namespace critmass
