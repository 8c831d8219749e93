#include "tgia/graph.hpp"

#include <algorithm>
#include <deque>
#include <stdexcept>
#include <string>

namespace tgia {

TagGraph make_tag_graph(int node_count, int class_count,
                        std::vector<std::pair<NodeId, NodeId>> edges,
                        std::vector<std::string> texts,
                        std::vector<int> labels) {
  if (node_count < 0) throw std::invalid_argument("node_count must be >= 0");
  if (class_count < 1) throw std::invalid_argument("class_count must be >= 1");
  if (static_cast<int>(texts.size()) != node_count)
    throw std::invalid_argument("texts size " + std::to_string(texts.size()) +
                                " does not match node count " +
                                std::to_string(node_count));
  if (static_cast<int>(labels.size()) != node_count)
    throw std::invalid_argument("labels size " +
                                std::to_string(labels.size()) +
                                " does not match node count " +
                                std::to_string(node_count));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= class_count)
      throw std::invalid_argument("label " + std::to_string(labels[i]) +
                                  " at node " + std::to_string(i) +
                                  " outside [0, " +
                                  std::to_string(class_count) + ")");
  }
  for (auto& [u, v] : edges) {
    if (u == v)
      throw std::invalid_argument("self-loop at node " + std::to_string(u));
    if (u < 0 || v < 0 || u >= node_count || v >= node_count)
      throw std::invalid_argument("edge (" + std::to_string(u) + "," +
                                  std::to_string(v) +
                                  ") has endpoint outside [0, " +
                                  std::to_string(node_count) + ")");
    if (u > v) std::swap(u, v);
  }
  std::sort(edges.begin(), edges.end());
  if (std::adjacent_find(edges.begin(), edges.end()) != edges.end())
    throw std::invalid_argument("duplicate edge");

  TagGraph graph;
  graph.node_count = node_count;
  graph.class_count = class_count;
  graph.edges = std::move(edges);
  graph.texts = std::move(texts);
  graph.labels = std::move(labels);
  graph.adjacency.assign(static_cast<std::size_t>(node_count), {});
  for (const auto& [u, v] : graph.edges) {
    graph.adjacency[static_cast<std::size_t>(u)].push_back(v);
    graph.adjacency[static_cast<std::size_t>(v)].push_back(u);
  }
  for (auto& nbrs : graph.adjacency) std::sort(nbrs.begin(), nbrs.end());
  return graph;
}

namespace {

bool is_subset(const std::vector<NodeId>& a, const std::vector<NodeId>& b) {
  // both sorted
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

std::vector<NodeId> sorted_copy(std::vector<NodeId> v) {
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace

void validate_split(const SplitSpec& split, const TagGraph& graph) {
  const auto train = sorted_copy(split.train);
  const auto validation = sorted_copy(split.validation);
  const auto test = sorted_copy(split.test);
  const auto attacker = sorted_copy(split.attacker_labeled);
  const auto targets = sorted_copy(split.targets);

  std::vector<char> seen(static_cast<std::size_t>(graph.node_count), 0);
  auto mark = [&](const std::vector<NodeId>& part, const char* name) {
    for (NodeId v : part) {
      if (v < 0 || v >= graph.node_count)
        throw std::invalid_argument(std::string(name) + " node " +
                                    std::to_string(v) + " out of range");
      if (seen[static_cast<std::size_t>(v)])
        throw std::invalid_argument("node " + std::to_string(v) +
                                    " appears in more than one of "
                                    "train/validation/test");
      seen[static_cast<std::size_t>(v)] = 1;
    }
  };
  mark(train, "train");
  mark(validation, "validation");
  mark(test, "test");
  for (int v = 0; v < graph.node_count; ++v) {
    if (!seen[static_cast<std::size_t>(v)])
      throw std::invalid_argument("node " + std::to_string(v) +
                                  " missing from train/validation/test");
  }
  if (!is_subset(attacker, test))
    throw std::invalid_argument("attacker_labeled must be a subset of test");
  if (!is_subset(targets, test))
    throw std::invalid_argument("targets must be a subset of test");
  std::vector<NodeId> overlap;
  std::set_intersection(targets.begin(), targets.end(), attacker.begin(),
                        attacker.end(), std::back_inserter(overlap));
  if (!overlap.empty())
    throw std::invalid_argument(
        "targets and attacker_labeled overlap at node " +
        std::to_string(overlap.front()));
}

std::vector<std::pair<NodeId, NodeId>> PerturbedGraph::materialized_edges()
    const {
  std::vector<std::pair<NodeId, NodeId>> edges = base->edges;
  edges.reserve(edges.size() + injected_edges.size());
  for (const auto& [idx, base_id] : injected_edges)
    edges.emplace_back(base_id, base->node_count + idx);
  return edges;
}

std::vector<std::pair<NodeId, int>> khop_with_distance(const TagGraph& graph,
                                                       NodeId node, int k) {
  if (node < 0 || node >= graph.node_count)
    throw std::invalid_argument("node " + std::to_string(node) +
                                " out of range");
  if (k < 1) throw std::invalid_argument("hop count must be >= 1");
  std::vector<int> dist(static_cast<std::size_t>(graph.node_count), -1);
  dist[static_cast<std::size_t>(node)] = 0;
  std::deque<NodeId> frontier{node};
  while (!frontier.empty()) {
    const NodeId u = frontier.front();
    frontier.pop_front();
    const int du = dist[static_cast<std::size_t>(u)];
    if (du == k) continue;
    for (NodeId v : graph.neighbors(u)) {
      if (dist[static_cast<std::size_t>(v)] < 0) {
        dist[static_cast<std::size_t>(v)] = du + 1;
        frontier.push_back(v);
      }
    }
  }
  std::vector<std::pair<NodeId, int>> out;
  for (NodeId v = 0; v < graph.node_count; ++v) {
    const int d = dist[static_cast<std::size_t>(v)];
    if (d > 0) out.emplace_back(v, d);
  }
  return out;
}

std::vector<NodeId> khop_neighborhood(const TagGraph& graph, NodeId node,
                                      int k) {
  std::vector<NodeId> out;
  for (const auto& [v, d] : khop_with_distance(graph, node, k))
    out.push_back(v);
  return out;
}

PerturbedGraph inject_nodes(const TagGraph& graph,
                            std::vector<std::string> texts,
                            std::vector<std::pair<int, NodeId>> links,
                            const AttackBudget& budget, NodeId target) {
  if (budget.max_injected < 1 || budget.max_degree < 1)
    throw std::invalid_argument("budget must allow at least one node/edge");
  if (target < 0 || target >= graph.node_count)
    throw std::invalid_argument("target " + std::to_string(target) +
                                " out of range");
  const int injected = static_cast<int>(texts.size());
  if (injected > budget.max_injected)
    throw std::invalid_argument("injected node count " +
                                std::to_string(injected) + " exceeds budget " +
                                std::to_string(budget.max_injected));
  std::vector<int> degree(static_cast<std::size_t>(injected), 0);
  for (const auto& [idx, base_id] : links) {
    if (idx < 0 || idx >= injected)
      throw std::invalid_argument("link references unknown injected index " +
                                  std::to_string(idx));
    if (base_id < 0 || base_id >= graph.node_count)
      throw std::invalid_argument("link references unknown base id " +
                                  std::to_string(base_id));
    if (budget.mode == InjectionMode::indirect && base_id == target)
      throw std::invalid_argument(
          "indirect mode forbids linking injected node " +
          std::to_string(idx) + " to the target");
    if (++degree[static_cast<std::size_t>(idx)] > budget.max_degree)
      throw std::invalid_argument("injected node " + std::to_string(idx) +
                                  " exceeds degree budget " +
                                  std::to_string(budget.max_degree));
  }
  PerturbedGraph out;
  out.base = &graph;
  out.injected_texts = std::move(texts);
  out.injected_edges = std::move(links);
  out.budget = budget;
  out.target = target;
  return out;
}

}  // namespace tgia
