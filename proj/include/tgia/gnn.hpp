#pragma once

#include "tgia/graph.hpp"
#include "tgia/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace tgia {

enum class GnnArchitecture { gcn, egnnguard };

/// GCN with symmetric-normalized aggregation, or the homophily-guarded
/// variant that drops edges whose endpoint input features have cosine
/// similarity below guard_threshold before aggregating. Weights chain
/// input dim -> hidden (x layer_count-1) -> class count; no bias terms.
struct GnnModel {
  GnnArchitecture architecture = GnnArchitecture::gcn;
  int layer_count = 2;
  int hidden_dim = 128;
  std::vector<Matrix> weights;
  double guard_threshold = 0.1;  // egnnguard only

  int input_dim() const { return static_cast<int>(weights.front().rows()); }
  int output_dim() const { return static_cast<int>(weights.back().cols()); }
};

struct TrainConfig {
  int epochs = 1000;
  double learning_rate = 0.01;
  std::uint64_t seed = 0;
  double pseudo_label_threshold = 0.75;
  double surrogate_label_fraction = 0.10;
  int warmup_epochs = 200;  // before the single pseudo-labeling pass
};

/// Glorot-uniform initialized model; deterministic per seed.
GnnModel init_model(GnnArchitecture architecture, int input_dim,
                    int hidden_dim, int class_count, std::uint64_t seed,
                    double guard_threshold = 0.1);

/// Symmetric-normalized adjacency with unit self-loops,
/// D^(-1/2) (A + I) D^(-1/2). For egnnguard, pass the pruned edge list.
SparseMatrix normalized_adjacency(
    int node_count, const std::vector<std::pair<NodeId, NodeId>>& edges);

/// Edges whose endpoint feature rows have cosine similarity >= tau; rows
/// with zero norm score 0 against everything.
std::vector<std::pair<NodeId, NodeId>> prune_edges_by_similarity(
    const std::vector<std::pair<NodeId, NodeId>>& edges,
    const EmbeddingMatrix& features, double tau);

/// Pre-softmax logits, one row per node.
Matrix gcn_forward(const GnnModel& model, int node_count,
                   const std::vector<std::pair<NodeId, NodeId>>& edges,
                   const EmbeddingMatrix& features);
Matrix gcn_forward(const GnnModel& model, const TagGraph& graph,
                   const EmbeddingMatrix& features);
Matrix gcn_forward(const GnnModel& model, const PerturbedGraph& graph,
                   const EmbeddingMatrix& features);

Matrix egnnguard_forward(const GnnModel& model, int node_count,
                         const std::vector<std::pair<NodeId, NodeId>>& edges,
                         const EmbeddingMatrix& features);
Matrix egnnguard_forward(const GnnModel& model, const TagGraph& graph,
                         const EmbeddingMatrix& features);
Matrix egnnguard_forward(const GnnModel& model, const PerturbedGraph& graph,
                         const EmbeddingMatrix& features);

/// Dispatches on model.architecture.
Matrix model_forward(const GnnModel& model, int node_count,
                     const std::vector<std::pair<NodeId, NodeId>>& edges,
                     const EmbeddingMatrix& features);
Matrix model_forward(const GnnModel& model, const TagGraph& graph,
                     const EmbeddingMatrix& features);
Matrix model_forward(const GnnModel& model, const PerturbedGraph& graph,
                     const EmbeddingMatrix& features);

/// Row-wise softmax; rows sum to 1.
Matrix softmax_rows(const Matrix& logits);

/// Mean cross-entropy of softmax(logits) against labels over `nodes`.
double cross_entropy(const Matrix& logits, const std::vector<int>& labels,
                     const std::vector<NodeId>& nodes);

/// Gradients of cross_entropy w.r.t. every weight matrix; optionally also
/// w.r.t. the input features (used by the explainer).
struct Gradients {
  std::vector<Matrix> weights;
  Matrix features;  // empty unless requested
};
Gradients loss_gradients(const GnnModel& model, int node_count,
                         const std::vector<std::pair<NodeId, NodeId>>& edges,
                         const EmbeddingMatrix& features,
                         const std::vector<int>& labels,
                         const std::vector<NodeId>& nodes,
                         bool with_feature_grad = false);

/// Full-batch Adam training minimizing cross-entropy on the train set;
/// returns the snapshot with the best validation accuracy (final weights if
/// validation is empty). Deterministic per config.seed. Throws on an empty
/// train set or a non-finite loss (reported with its epoch).
GnnModel train(GnnArchitecture architecture, const TagGraph& graph,
               const EmbeddingMatrix& features, const std::vector<int>& labels,
               const std::vector<NodeId>& train_nodes,
               const std::vector<NodeId>& validation_nodes,
               const TrainConfig& config, int hidden_dim = 128,
               double guard_threshold = 0.1);

class GuardedLabels;  // attack.hpp

/// Nodes whose max softmax probability strictly exceeds `threshold`, paired
/// with the argmax class; nodes already labeled are skipped.
std::vector<std::pair<NodeId, int>> pseudo_labels_from_probs(
    const Matrix& probabilities, const std::vector<char>& already_labeled,
    double threshold);

/// 2-layer GCN surrogate trained from attacker-visible labels only: a
/// warm-up pass on split.attacker_labeled, one pseudo-labeling sweep at the
/// strict threshold, then training continues to config.epochs. Label reads
/// go through `labels`, so a campaign's guard observes them.
GnnModel train_surrogate(const TagGraph& graph,
                         const EmbeddingMatrix& features,
                         const SplitSpec& split, const TrainConfig& config,
                         const GuardedLabels& labels, int hidden_dim = 128);

/// (predicted class, confidence margin) per node; margin is the softmax
/// probability gap between the predicted and the runner-up class.
std::vector<std::pair<int, double>> predict_with_margin(
    const GnnModel& model, const TagGraph& graph,
    const EmbeddingMatrix& features, const std::vector<NodeId>& nodes);

/// Fraction of `nodes` whose argmax logit matches labels.
double accuracy(const Matrix& logits, const std::vector<int>& labels,
                const std::vector<NodeId>& nodes);

/// Checkpoint: one JSON header line, then row-major little-endian float64
/// weight payloads. Round-trips bit-exactly.
void save_checkpoint(const GnnModel& model, const std::string& path);
GnnModel load_checkpoint(const std::string& path);

}  // namespace tgia
