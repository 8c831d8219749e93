#pragma once

#include "tgia/types.hpp"

#include <atomic>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace tgia {

class LabelAccessViolation : public std::runtime_error {
 public:
  explicit LabelAccessViolation(NodeId node)
      : std::runtime_error("label read outside the attacker-visible set: node " +
                           std::to_string(node)),
        node_(node) {}
  NodeId node() const { return node_; }

 private:
  NodeId node_;
};

/// Access-guarded label view. The attack path reads ground truth only
/// through this view; a read outside the allowed set counts a violation and
/// throws, which the discipline tests assert on.
class GuardedLabels {
 public:
  GuardedLabels(const std::vector<int>& labels,
                const std::vector<NodeId>& allowed)
      : labels_(&labels), allowed_(labels.size(), 0) {
    for (NodeId v : allowed) {
      if (v < 0 || static_cast<std::size_t>(v) >= labels.size())
        throw std::invalid_argument("allowed node " + std::to_string(v) +
                                    " out of range");
      allowed_[static_cast<std::size_t>(v)] = 1;
    }
  }

  bool allowed(NodeId v) const {
    return v >= 0 && static_cast<std::size_t>(v) < allowed_.size() &&
           allowed_[static_cast<std::size_t>(v)] != 0;
  }

  int at(NodeId v) const {
    reads_.fetch_add(1, std::memory_order_relaxed);
    if (!allowed(v)) {
      violations_.fetch_add(1, std::memory_order_relaxed);
      throw LabelAccessViolation(v);
    }
    return (*labels_)[static_cast<std::size_t>(v)];
  }

  std::int64_t reads() const { return reads_.load(std::memory_order_relaxed); }
  std::int64_t violations() const {
    return violations_.load(std::memory_order_relaxed);
  }

 private:
  const std::vector<int>* labels_;
  std::vector<char> allowed_;
  mutable std::atomic<std::int64_t> reads_{0};
  mutable std::atomic<std::int64_t> violations_{0};
};

}  // namespace tgia
