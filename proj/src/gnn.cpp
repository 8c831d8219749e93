#include "tgia/gnn.hpp"

#include "tgia/guard.hpp"
#include "tgia/rng.hpp"
#include "tgia/similarity.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace tgia {

namespace {

std::vector<int> layer_dims(int input_dim, int hidden_dim, int class_count,
                            int layer_count) {
  std::vector<int> dims{input_dim};
  for (int l = 1; l < layer_count; ++l) dims.push_back(hidden_dim);
  dims.push_back(class_count);
  return dims;
}

}  // namespace

GnnModel init_model(GnnArchitecture architecture, int input_dim,
                    int hidden_dim, int class_count, std::uint64_t seed,
                    double guard_threshold) {
  GnnModel model;
  model.architecture = architecture;
  model.layer_count = architecture == GnnArchitecture::egnnguard ? 3 : 2;
  model.hidden_dim = hidden_dim;
  model.guard_threshold = guard_threshold;
  const auto dims =
      layer_dims(input_dim, hidden_dim, class_count, model.layer_count);
  Rng rng(mix_seed(seed, 0x6e6e));
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    const int rows = dims[l], cols = dims[l + 1];
    const double limit = std::sqrt(6.0 / (rows + cols));
    Matrix w(rows, cols);
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c)
        w(r, c) = rng.uniform_real(-limit, limit);
    model.weights.push_back(std::move(w));
  }
  return model;
}

SparseMatrix normalized_adjacency(
    int node_count, const std::vector<std::pair<NodeId, NodeId>>& edges) {
  Vector degree = Vector::Ones(node_count);  // self-loops
  for (const auto& [u, v] : edges) {
    degree[u] += 1.0;
    degree[v] += 1.0;
  }
  const Vector inv_sqrt = degree.array().rsqrt();
  std::vector<Eigen::Triplet<Scalar>> triplets;
  triplets.reserve(2 * edges.size() + static_cast<std::size_t>(node_count));
  for (NodeId v = 0; v < node_count; ++v)
    triplets.emplace_back(v, v, inv_sqrt[v] * inv_sqrt[v]);
  for (const auto& [u, v] : edges) {
    const Scalar w = inv_sqrt[u] * inv_sqrt[v];
    triplets.emplace_back(u, v, w);
    triplets.emplace_back(v, u, w);
  }
  SparseMatrix a_hat(node_count, node_count);
  a_hat.setFromTriplets(triplets.begin(), triplets.end());
  return a_hat;
}

std::vector<std::pair<NodeId, NodeId>> prune_edges_by_similarity(
    const std::vector<std::pair<NodeId, NodeId>>& edges,
    const EmbeddingMatrix& features, double tau) {
  std::vector<std::pair<NodeId, NodeId>> kept;
  kept.reserve(edges.size());
  for (const auto& [u, v] : edges) {
    const double sim = cos_sim(features.row(u).transpose(),
                               features.row(v).transpose());
    if (!(sim < tau)) kept.emplace_back(u, v);
  }
  return kept;
}

namespace {

struct ForwardCache {
  std::vector<Matrix> pre_agg;  // P_l = A_hat * H_{l-1}
  std::vector<Matrix> pre_act;  // Z_l = P_l * W_l
};

// Shared forward: aggregation, linear map, rectifier on all but the last
// layer. The adjacency is already pruned for egnnguard.
Matrix run_forward(const GnnModel& model, const SparseMatrix& a_hat,
                   const EmbeddingMatrix& features, ForwardCache* cache) {
  if (features.cols() != model.weights.front().rows())
    throw std::invalid_argument(
        "feature dim " + std::to_string(features.cols()) +
        " does not match model input dim " +
        std::to_string(model.weights.front().rows()));
  if (features.rows() != a_hat.rows())
    throw std::invalid_argument("feature rows do not match node count");
  Matrix h = features;
  const std::size_t layers = model.weights.size();
  for (std::size_t l = 0; l < layers; ++l) {
    Matrix p = a_hat * h;
    Matrix z = p * model.weights[l];
    if (cache) {
      cache->pre_agg.push_back(std::move(p));
      cache->pre_act.push_back(z);
    }
    if (l + 1 < layers)
      h = z.cwiseMax(0.0);
    else
      h = std::move(z);
  }
  return h;
}

SparseMatrix adjacency_for(const GnnModel& model, int node_count,
                           const std::vector<std::pair<NodeId, NodeId>>& edges,
                           const EmbeddingMatrix& features) {
  if (model.architecture == GnnArchitecture::egnnguard)
    return normalized_adjacency(
        node_count,
        prune_edges_by_similarity(edges, features, model.guard_threshold));
  return normalized_adjacency(node_count, edges);
}

}  // namespace

Matrix gcn_forward(const GnnModel& model, int node_count,
                   const std::vector<std::pair<NodeId, NodeId>>& edges,
                   const EmbeddingMatrix& features) {
  return run_forward(model, normalized_adjacency(node_count, edges), features,
                     nullptr);
}

Matrix egnnguard_forward(const GnnModel& model, int node_count,
                         const std::vector<std::pair<NodeId, NodeId>>& edges,
                         const EmbeddingMatrix& features) {
  return run_forward(
      model,
      normalized_adjacency(node_count, prune_edges_by_similarity(
                                           edges, features,
                                           model.guard_threshold)),
      features, nullptr);
}

Matrix model_forward(const GnnModel& model, int node_count,
                     const std::vector<std::pair<NodeId, NodeId>>& edges,
                     const EmbeddingMatrix& features) {
  return model.architecture == GnnArchitecture::egnnguard
             ? egnnguard_forward(model, node_count, edges, features)
             : gcn_forward(model, node_count, edges, features);
}

Matrix gcn_forward(const GnnModel& model, const TagGraph& graph,
                   const EmbeddingMatrix& features) {
  return gcn_forward(model, graph.node_count, graph.edges, features);
}

Matrix gcn_forward(const GnnModel& model, const PerturbedGraph& graph,
                   const EmbeddingMatrix& features) {
  return gcn_forward(model, graph.total_nodes(), graph.materialized_edges(),
                     features);
}

Matrix egnnguard_forward(const GnnModel& model, const TagGraph& graph,
                         const EmbeddingMatrix& features) {
  return egnnguard_forward(model, graph.node_count, graph.edges, features);
}

Matrix egnnguard_forward(const GnnModel& model, const PerturbedGraph& graph,
                         const EmbeddingMatrix& features) {
  return egnnguard_forward(model, graph.total_nodes(),
                           graph.materialized_edges(), features);
}

Matrix model_forward(const GnnModel& model, const TagGraph& graph,
                     const EmbeddingMatrix& features) {
  return model_forward(model, graph.node_count, graph.edges, features);
}

Matrix model_forward(const GnnModel& model, const PerturbedGraph& graph,
                     const EmbeddingMatrix& features) {
  return model_forward(model, graph.total_nodes(), graph.materialized_edges(),
                       features);
}

Matrix softmax_rows(const Matrix& logits) {
  Matrix shifted =
      (logits.colwise() - logits.rowwise().maxCoeff()).array().exp();
  return shifted.array().colwise() / shifted.rowwise().sum().array();
}

double cross_entropy(const Matrix& logits, const std::vector<int>& labels,
                     const std::vector<NodeId>& nodes) {
  if (nodes.empty()) throw std::invalid_argument("empty node set");
  double loss = 0.0;
  for (NodeId v : nodes) {
    const auto row = logits.row(v);
    const double max = row.maxCoeff();
    const double logsum = std::log((row.array() - max).exp().sum()) + max;
    loss += logsum - row[labels[static_cast<std::size_t>(v)]];
  }
  return loss / static_cast<double>(nodes.size());
}

namespace {

Matrix loss_logit_gradient(const Matrix& logits,
                           const std::vector<int>& labels,
                           const std::vector<NodeId>& nodes) {
  Matrix grad = Matrix::Zero(logits.rows(), logits.cols());
  const double scale = 1.0 / static_cast<double>(nodes.size());
  for (NodeId v : nodes) {
    const auto row = logits.row(v);
    const double max = row.maxCoeff();
    Eigen::RowVectorXd p = (row.array() - max).exp();
    p /= p.sum();
    grad.row(v) = p * scale;
    grad(v, labels[static_cast<std::size_t>(v)]) -= scale;
  }
  return grad;
}

}  // namespace

Gradients loss_gradients(const GnnModel& model, int node_count,
                         const std::vector<std::pair<NodeId, NodeId>>& edges,
                         const EmbeddingMatrix& features,
                         const std::vector<int>& labels,
                         const std::vector<NodeId>& nodes,
                         bool with_feature_grad) {
  const SparseMatrix a_hat =
      adjacency_for(model, node_count, edges, features);
  ForwardCache cache;
  const Matrix logits = run_forward(model, a_hat, features, &cache);

  Gradients grads;
  grads.weights.resize(model.weights.size());
  Matrix g = loss_logit_gradient(logits, labels, nodes);  // dLoss/dZ_l
  for (int l = static_cast<int>(model.weights.size()) - 1; l >= 0; --l) {
    grads.weights[static_cast<std::size_t>(l)] =
        cache.pre_agg[static_cast<std::size_t>(l)].transpose() * g;
    const bool need_input_grad = l > 0 || with_feature_grad;
    if (!need_input_grad) break;
    Matrix dh = a_hat * (g * model.weights[static_cast<std::size_t>(l)]
                                 .transpose());  // A_hat symmetric
    if (l > 0) {
      g = (dh.array() *
           (cache.pre_act[static_cast<std::size_t>(l - 1)].array() > 0.0)
               .cast<double>())
              .matrix();
    } else {
      grads.features = std::move(dh);
    }
  }
  return grads;
}

namespace {

struct AdamState {
  std::vector<Matrix> m;
  std::vector<Matrix> v;
  int t = 0;
  double lr;
  static constexpr double kBeta1 = 0.9;
  static constexpr double kBeta2 = 0.999;
  static constexpr double kEps = 1e-8;

  AdamState(const std::vector<Matrix>& weights, double learning_rate)
      : lr(learning_rate) {
    for (const auto& w : weights) {
      m.push_back(Matrix::Zero(w.rows(), w.cols()));
      v.push_back(Matrix::Zero(w.rows(), w.cols()));
    }
  }

  void step(std::vector<Matrix>& weights, const std::vector<Matrix>& grads) {
    ++t;
    const double bias1 = 1.0 - std::pow(kBeta1, t);
    const double bias2 = 1.0 - std::pow(kBeta2, t);
    for (std::size_t i = 0; i < weights.size(); ++i) {
      m[i] = kBeta1 * m[i] + (1.0 - kBeta1) * grads[i];
      v[i] = kBeta2 * v[i].array().matrix() +
             (1.0 - kBeta2) * grads[i].array().square().matrix();
      const auto m_hat = m[i].array() / bias1;
      const auto v_hat = v[i].array() / bias2;
      weights[i].array() -= lr * m_hat / (v_hat.sqrt() + kEps);
    }
  }
};

}  // namespace

GnnModel train(GnnArchitecture architecture, const TagGraph& graph,
               const EmbeddingMatrix& features, const std::vector<int>& labels,
               const std::vector<NodeId>& train_nodes,
               const std::vector<NodeId>& validation_nodes,
               const TrainConfig& config, int hidden_dim,
               double guard_threshold) {
  if (train_nodes.empty()) throw std::invalid_argument("empty train set");
  if (config.epochs < 1) throw std::invalid_argument("epochs must be >= 1");
  GnnModel model =
      init_model(architecture, static_cast<int>(features.cols()), hidden_dim,
                 graph.class_count, config.seed, guard_threshold);
  AdamState adam(model.weights, config.learning_rate);
  const SparseMatrix a_hat =
      adjacency_for(model, graph.node_count, graph.edges, features);

  std::vector<Matrix> best_weights = model.weights;
  double best_val_acc = -1.0;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    ForwardCache cache;
    const Matrix logits = run_forward(model, a_hat, features, &cache);
    const double loss = cross_entropy(logits, labels, train_nodes);
    if (!std::isfinite(loss))
      throw std::runtime_error("non-finite training loss at epoch " +
                               std::to_string(epoch));
    Matrix g = loss_logit_gradient(logits, labels, train_nodes);
    std::vector<Matrix> grads(model.weights.size());
    for (int l = static_cast<int>(model.weights.size()) - 1; l >= 0; --l) {
      grads[static_cast<std::size_t>(l)] =
          cache.pre_agg[static_cast<std::size_t>(l)].transpose() * g;
      if (l > 0) {
        Matrix dh =
            a_hat *
            (g * model.weights[static_cast<std::size_t>(l)].transpose());
        g = (dh.array() *
             (cache.pre_act[static_cast<std::size_t>(l - 1)].array() > 0.0)
                 .cast<double>())
                .matrix();
      }
    }
    adam.step(model.weights, grads);
    if (!validation_nodes.empty()) {
      const Matrix val_logits = run_forward(model, a_hat, features, nullptr);
      const double val_acc = accuracy(val_logits, labels, validation_nodes);
      if (val_acc > best_val_acc) {
        best_val_acc = val_acc;
        best_weights = model.weights;
      }
    }
  }
  if (!validation_nodes.empty()) model.weights = std::move(best_weights);
  return model;
}

std::vector<std::pair<NodeId, int>> pseudo_labels_from_probs(
    const Matrix& probabilities, const std::vector<char>& already_labeled,
    double threshold) {
  std::vector<std::pair<NodeId, int>> out;
  for (Eigen::Index v = 0; v < probabilities.rows(); ++v) {
    if (already_labeled[static_cast<std::size_t>(v)]) continue;
    Eigen::Index argmax = 0;
    const double max = probabilities.row(v).maxCoeff(&argmax);
    if (max > threshold)  // strict: "exceeding"
      out.emplace_back(static_cast<NodeId>(v), static_cast<int>(argmax));
  }
  return out;
}

GnnModel train_surrogate(const TagGraph& graph,
                         const EmbeddingMatrix& features,
                         const SplitSpec& split, const TrainConfig& config,
                         const GuardedLabels& labels, int hidden_dim) {
  if (split.attacker_labeled.empty())
    throw std::invalid_argument("empty attacker_labeled set");
  GnnModel model =
      init_model(GnnArchitecture::gcn, static_cast<int>(features.cols()),
                 hidden_dim, graph.class_count, config.seed);
  AdamState adam(model.weights, config.learning_rate);
  const SparseMatrix a_hat =
      normalized_adjacency(graph.node_count, graph.edges);

  std::vector<int> work_labels(static_cast<std::size_t>(graph.node_count), 0);
  std::vector<char> labeled(static_cast<std::size_t>(graph.node_count), 0);
  std::vector<NodeId> supervised = split.attacker_labeled;
  for (NodeId v : supervised) {
    work_labels[static_cast<std::size_t>(v)] = labels.at(v);
    labeled[static_cast<std::size_t>(v)] = 1;
  }

  auto run_epochs = [&](int count) {
    for (int epoch = 0; epoch < count; ++epoch) {
      ForwardCache cache;
      const Matrix logits = run_forward(model, a_hat, features, &cache);
      const double loss = cross_entropy(logits, work_labels, supervised);
      if (!std::isfinite(loss))
        throw std::runtime_error("non-finite surrogate loss at epoch " +
                                 std::to_string(adam.t));
      Matrix g = loss_logit_gradient(logits, work_labels, supervised);
      std::vector<Matrix> grads(model.weights.size());
      for (int l = static_cast<int>(model.weights.size()) - 1; l >= 0; --l) {
        grads[static_cast<std::size_t>(l)] =
            cache.pre_agg[static_cast<std::size_t>(l)].transpose() * g;
        if (l > 0) {
          Matrix dh =
              a_hat *
              (g * model.weights[static_cast<std::size_t>(l)].transpose());
          g = (dh.array() *
               (cache.pre_act[static_cast<std::size_t>(l - 1)].array() > 0.0)
                   .cast<double>())
                  .matrix();
        }
      }
      adam.step(model.weights, grads);
    }
  };

  const int warmup = std::min(config.warmup_epochs, config.epochs);
  run_epochs(warmup);

  // Single pseudo-labeling sweep after warm-up.
  const Matrix probs =
      softmax_rows(run_forward(model, a_hat, features, nullptr));
  for (const auto& [v, label] :
       pseudo_labels_from_probs(probs, labeled, config.pseudo_label_threshold)) {
    work_labels[static_cast<std::size_t>(v)] = label;
    labeled[static_cast<std::size_t>(v)] = 1;
    supervised.push_back(v);
  }
  std::sort(supervised.begin(), supervised.end());
  run_epochs(config.epochs - warmup);
  return model;
}

std::vector<std::pair<int, double>> predict_with_margin(
    const GnnModel& model, const TagGraph& graph,
    const EmbeddingMatrix& features, const std::vector<NodeId>& nodes) {
  const Matrix probs = softmax_rows(model_forward(model, graph, features));
  std::vector<std::pair<int, double>> out;
  out.reserve(nodes.size());
  for (NodeId v : nodes) {
    if (v < 0 || v >= graph.node_count)
      throw std::invalid_argument("node " + std::to_string(v) +
                                  " out of range");
    const auto row = probs.row(v);
    int pred = 0;
    for (int c = 1; c < row.size(); ++c)
      if (row[c] > row[pred]) pred = c;  // ties keep the lowest class id
    double runner_up = 0.0;
    for (int c = 0; c < row.size(); ++c)
      if (c != pred) runner_up = std::max(runner_up, row[c]);
    out.emplace_back(pred, row[pred] - runner_up);
  }
  return out;
}

double accuracy(const Matrix& logits, const std::vector<int>& labels,
                const std::vector<NodeId>& nodes) {
  if (nodes.empty()) return 0.0;
  int correct = 0;
  for (NodeId v : nodes) {
    Eigen::Index argmax = 0;
    logits.row(v).maxCoeff(&argmax);
    if (static_cast<int>(argmax) == labels[static_cast<std::size_t>(v)])
      ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(nodes.size());
}

void save_checkpoint(const GnnModel& model, const std::string& path) {
  nlohmann::json header;
  header["architecture"] =
      model.architecture == GnnArchitecture::egnnguard ? "egnnguard" : "gcn";
  header["layer_count"] = model.layer_count;
  header["hidden_dim"] = model.hidden_dim;
  header["guard_threshold"] = model.guard_threshold;
  nlohmann::json dims = nlohmann::json::array();
  for (const auto& w : model.weights)
    dims.push_back({w.rows(), w.cols()});
  header["dims"] = dims;

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write checkpoint " + path);
  out << header.dump() << '\n';
  for (const auto& w : model.weights) {
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) {
        const double value = w(r, c);
        out.write(reinterpret_cast<const char*>(&value), sizeof(value));
      }
    }
  }
}

GnnModel load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint " + path);
  std::string header_line;
  if (!std::getline(in, header_line))
    throw std::runtime_error(path + ": missing checkpoint header");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(header_line);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(path + ": malformed checkpoint header: " +
                             e.what());
  }
  GnnModel model;
  const std::string arch = header.at("architecture").get<std::string>();
  if (arch == "gcn")
    model.architecture = GnnArchitecture::gcn;
  else if (arch == "egnnguard")
    model.architecture = GnnArchitecture::egnnguard;
  else
    throw std::runtime_error(path + ": unknown architecture " + arch);
  model.layer_count = header.at("layer_count").get<int>();
  model.hidden_dim = header.at("hidden_dim").get<int>();
  model.guard_threshold = header.at("guard_threshold").get<double>();
  for (const auto& dim : header.at("dims")) {
    const Eigen::Index rows = dim.at(0).get<Eigen::Index>();
    const Eigen::Index cols = dim.at(1).get<Eigen::Index>();
    Matrix w(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
      for (Eigen::Index c = 0; c < cols; ++c) {
        double value = 0.0;
        if (!in.read(reinterpret_cast<char*>(&value), sizeof(value)))
          throw std::runtime_error(path + ": truncated weight payload");
        w(r, c) = value;
      }
    }
    model.weights.push_back(std::move(w));
  }
  return model;
}

}  // namespace tgia
