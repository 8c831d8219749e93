#pragma once

#include "tgia/gnn.hpp"
#include "tgia/graph.hpp"
#include "tgia/types.hpp"

#include <cstdint>
#include <vector>

namespace tgia {

struct ExplainConfig {
  int steps = 100;
  double learning_rate = 0.01;
  double l1_coeff = 0.005;
  double entropy_coeff = 0.1;
  std::uint64_t seed = 0;
};

/// Feature-importance matrix over the target's k-hop subgraph (k = surrogate
/// depth). Rows align with `nodes`, which always contains the target.
struct Explanation {
  NodeId target = -1;
  std::vector<NodeId> nodes;          // sorted ascending, includes target
  std::vector<int> hop_distance;      // same order; 0 for the target
  Matrix feature_mask;                // |nodes| x D, entries in (0,1)
  double initial_log_prob = 0.0;      // target log-prob at the initial mask
  double final_log_prob = 0.0;        // at the converged mask
};

/// Learns a per-node-per-feature mask over the target's k-hop subgraph by
/// maximizing the surrogate's log-probability of its own clean prediction
/// under masked features, with L1 and entropy regularizers. Deterministic
/// per config.seed.
Explanation explain(const GnnModel& surrogate, const TagGraph& graph,
                    const EmbeddingMatrix& features, NodeId target,
                    const ExplainConfig& config = {});

/// Truncated, normalized per-node importance: at most m positive weights
/// summing to 1, target excluded. Sorted by weight descending, ties by
/// lower node id.
struct ImportanceVector {
  std::vector<std::pair<NodeId, double>> weights;
  int m = 10;
  NodeId target = -1;
  bool degenerate = false;  // all row sums were zero; uniform fallback

  double weight_of(NodeId v) const {
    for (const auto& [node, w] : weights)
      if (node == v) return w;
    return 0.0;
  }
};

/// Row-sums of the feature-importance matrix, target row dropped, top-m kept
/// (ties to the lower node id) and renormalized to sum 1. If every score is
/// zero the weights fall back to uniform over the m nearest subgraph nodes
/// and the result is flagged degenerate.
ImportanceVector node_importance(const Explanation& explanation, int m);

}  // namespace tgia
