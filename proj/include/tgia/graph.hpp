#pragma once

#include "tgia/types.hpp"

#include <string>
#include <utility>
#include <vector>

namespace tgia {

/// Undirected text-attributed graph. Immutable after construction; node ids
/// are dense integers 0..N-1 and edges are stored smaller-id first.
struct TagGraph {
  int node_count = 0;
  int class_count = 0;
  std::vector<std::pair<NodeId, NodeId>> edges;
  std::vector<std::string> texts;
  std::vector<int> labels;
  std::vector<std::vector<NodeId>> adjacency;

  const std::vector<NodeId>& neighbors(NodeId v) const {
    return adjacency[static_cast<std::size_t>(v)];
  }
};

/// Validates invariants (no self-loops, no duplicates, endpoints in range,
/// texts/labels sized N, labels < C), canonicalizes edges and builds the
/// adjacency lists. Throws std::invalid_argument on violation.
TagGraph make_tag_graph(int node_count, int class_count,
                        std::vector<std::pair<NodeId, NodeId>> edges,
                        std::vector<std::string> texts,
                        std::vector<int> labels);

/// Train/validation/test partition plus the attacker-visible label set V'
/// and the target set T.
struct SplitSpec {
  std::vector<NodeId> train;
  std::vector<NodeId> validation;
  std::vector<NodeId> test;
  std::vector<NodeId> attacker_labeled;
  std::vector<NodeId> targets;
};

/// Checks the split invariants against a graph: train/validation/test
/// disjoint and covering all nodes, attacker_labeled and targets subsets of
/// test, targets disjoint from attacker_labeled.
void validate_split(const SplitSpec& split, const TagGraph& graph);

enum class InjectionMode { direct, indirect };

struct AttackBudget {
  int max_injected = 1;  // Delta_N
  int max_degree = 1;    // Delta_d
  InjectionMode mode = InjectionMode::direct;
};

/// Base graph plus injected nodes. Injected nodes live in their own index
/// space (0..k-1) and connect only to base nodes; when materialized for a
/// model they are appended after the base ids.
struct PerturbedGraph {
  const TagGraph* base = nullptr;
  std::vector<std::string> injected_texts;
  std::vector<std::pair<int, NodeId>> injected_edges;  // (injected idx, base id)
  AttackBudget budget;
  NodeId target = -1;

  int total_nodes() const {
    return base->node_count + static_cast<int>(injected_texts.size());
  }

  /// Base edges plus injected links mapped to appended node ids.
  std::vector<std::pair<NodeId, NodeId>> materialized_edges() const;
};

/// Nodes at shortest-path distance in [1, k] from `node`; excludes the node
/// itself. Sorted ascending.
std::vector<NodeId> khop_neighborhood(const TagGraph& graph, NodeId node,
                                      int k);

/// As above but paired with hop distances, for consumers that need them.
std::vector<std::pair<NodeId, int>> khop_with_distance(const TagGraph& graph,
                                                       NodeId node, int k);

/// Builds a budget-checked PerturbedGraph. The base graph is never mutated.
/// Throws std::invalid_argument on budget violation, unknown base id, or an
/// indirect-mode link to the target.
PerturbedGraph inject_nodes(const TagGraph& graph,
                            std::vector<std::string> texts,
                            std::vector<std::pair<int, NodeId>> links,
                            const AttackBudget& budget, NodeId target);

}  // namespace tgia
