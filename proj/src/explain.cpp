#include "tgia/explain.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tgia {

namespace {

double target_log_prob(const GnnModel& model, const TagGraph& graph,
                       const EmbeddingMatrix& features, NodeId target,
                       int clean_class) {
  const Matrix logits = model_forward(model, graph, features);
  const auto row = logits.row(target);
  const double max = row.maxCoeff();
  const double logsum = std::log((row.array() - max).exp().sum()) + max;
  return row[clean_class] - logsum;
}

}  // namespace

Explanation explain(const GnnModel& surrogate, const TagGraph& graph,
                    const EmbeddingMatrix& features, NodeId target,
                    const ExplainConfig& config) {
  if (target < 0 || target >= graph.node_count)
    throw std::invalid_argument("target " + std::to_string(target) +
                                " out of range");

  Explanation out;
  out.target = target;
  out.nodes.push_back(target);
  out.hop_distance.push_back(0);
  for (const auto& [v, d] :
       khop_with_distance(graph, target, surrogate.layer_count)) {
    out.nodes.push_back(v);
    out.hop_distance.push_back(d);
  }
  // keep (node, distance) pairs sorted by id
  {
    std::vector<std::size_t> order(out.nodes.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return out.nodes[a] < out.nodes[b];
    });
    std::vector<NodeId> nodes;
    std::vector<int> dist;
    for (std::size_t i : order) {
      nodes.push_back(out.nodes[i]);
      dist.push_back(out.hop_distance[i]);
    }
    out.nodes = std::move(nodes);
    out.hop_distance = std::move(dist);
  }

  const Eigen::Index subgraph_size =
      static_cast<Eigen::Index>(out.nodes.size());
  const Eigen::Index dim = features.cols();

  // The surrogate's own clean prediction is the class the mask must keep.
  const Matrix clean_logits = model_forward(surrogate, graph, features);
  int clean_class = 0;
  {
    const auto row = clean_logits.row(target);
    for (int c = 1; c < row.size(); ++c)
      if (row[c] > row[clean_class]) clean_class = c;
  }
  std::vector<int> mask_labels(static_cast<std::size_t>(graph.node_count), 0);
  mask_labels[static_cast<std::size_t>(target)] = clean_class;
  const std::vector<NodeId> target_only{target};

  // Sigmoid-parameterized mask, logits starting at zero (mask 0.5).
  Matrix theta = Matrix::Zero(subgraph_size, dim);
  Matrix adam_m = Matrix::Zero(subgraph_size, dim);
  Matrix adam_v = Matrix::Zero(subgraph_size, dim);
  constexpr double kBeta1 = 0.9, kBeta2 = 0.999, kEps = 1e-8;

  const double entropy_scale =
      config.entropy_coeff /
      static_cast<double>(subgraph_size * dim);

  EmbeddingMatrix masked = features;
  auto apply_mask = [&](const Matrix& mask) {
    for (Eigen::Index i = 0; i < subgraph_size; ++i) {
      const NodeId v = out.nodes[static_cast<std::size_t>(i)];
      masked.row(v) = features.row(v).cwiseProduct(mask.row(i));
    }
  };

  for (int step = 0; step < config.steps; ++step) {
    const Matrix mask =
        (1.0 / (1.0 + (-theta.array()).exp())).matrix();
    apply_mask(mask);
    if (step == 0)
      out.initial_log_prob = target_log_prob(surrogate, graph, masked, target,
                                             clean_class);
    const Gradients grads =
        loss_gradients(surrogate, graph.node_count, graph.edges, masked,
                       mask_labels, target_only, /*with_feature_grad=*/true);
    if (!grads.features.allFinite())
      throw std::runtime_error("explainer optimizer diverged at step " +
                               std::to_string(step));
    Matrix grad_mask(subgraph_size, dim);
    for (Eigen::Index i = 0; i < subgraph_size; ++i) {
      const NodeId v = out.nodes[static_cast<std::size_t>(i)];
      grad_mask.row(i) =
          grads.features.row(v).cwiseProduct(features.row(v));
    }
    // L1 pulls the mask down; entropy sharpens it away from 0.5.
    grad_mask.array() += config.l1_coeff;
    grad_mask.array() +=
        entropy_scale * (mask.array() / (1.0 - mask.array())).log();
    Matrix grad_theta =
        (grad_mask.array() * mask.array() * (1.0 - mask.array())).matrix();

    const double bias1 = 1.0 - std::pow(kBeta1, step + 1);
    const double bias2 = 1.0 - std::pow(kBeta2, step + 1);
    adam_m = kBeta1 * adam_m + (1.0 - kBeta1) * grad_theta;
    adam_v = kBeta2 * adam_v.array().matrix() +
             (1.0 - kBeta2) * grad_theta.array().square().matrix();
    theta.array() -= config.learning_rate * (adam_m.array() / bias1) /
                     ((adam_v.array() / bias2).sqrt() + kEps);
  }

  out.feature_mask = (1.0 / (1.0 + (-theta.array()).exp())).matrix();
  apply_mask(out.feature_mask);
  out.final_log_prob =
      target_log_prob(surrogate, graph, masked, target, clean_class);
  return out;
}

ImportanceVector node_importance(const Explanation& explanation, int m) {
  if (m < 1) throw std::invalid_argument("m must be >= 1");
  if (explanation.feature_mask.rows() !=
      static_cast<Eigen::Index>(explanation.nodes.size()))
    throw std::invalid_argument("feature mask rows do not match nodes");
  if ((explanation.feature_mask.array() < 0.0).any())
    throw std::invalid_argument("feature importance must be nonnegative");

  ImportanceVector out;
  out.m = m;
  out.target = explanation.target;

  std::vector<std::pair<NodeId, double>> scores;
  for (std::size_t i = 0; i < explanation.nodes.size(); ++i) {
    const NodeId v = explanation.nodes[i];
    if (v == explanation.target) continue;
    scores.emplace_back(
        v, explanation.feature_mask.row(static_cast<Eigen::Index>(i)).sum());
  }
  if (scores.empty()) return out;  // isolated target: empty support

  double total = 0.0;
  for (const auto& [v, s] : scores) total += s;
  if (total == 0.0) {
    // Uniform fallback over the m nearest subgraph nodes.
    out.degenerate = true;
    std::vector<std::pair<int, NodeId>> by_distance;
    for (std::size_t i = 0; i < explanation.nodes.size(); ++i) {
      if (explanation.nodes[i] == explanation.target) continue;
      by_distance.emplace_back(explanation.hop_distance[i],
                               explanation.nodes[i]);
    }
    std::sort(by_distance.begin(), by_distance.end());
    const std::size_t keep =
        std::min<std::size_t>(static_cast<std::size_t>(m), by_distance.size());
    for (std::size_t i = 0; i < keep; ++i)
      out.weights.emplace_back(by_distance[i].second,
                               1.0 / static_cast<double>(keep));
    return out;
  }

  std::erase_if(scores, [](const auto& s) { return s.second == 0.0; });
  std::sort(scores.begin(), scores.end(),
            [](const auto& a, const auto& b) {
              if (a.second != b.second) return a.second > b.second;
              return a.first < b.first;
            });
  const std::size_t keep =
      std::min<std::size_t>(static_cast<std::size_t>(m), scores.size());
  double kept_sum = 0.0;
  for (std::size_t i = 0; i < keep; ++i) kept_sum += scores[i].second;
  for (std::size_t i = 0; i < keep; ++i)
    out.weights.emplace_back(scores[i].first, scores[i].second / kept_sum);
  return out;
}

}  // namespace tgia
