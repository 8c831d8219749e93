#pragma once

#include "tgia/encoder.hpp"
#include "tgia/explain.hpp"
#include "tgia/gnn.hpp"
#include "tgia/graph.hpp"
#include "tgia/guard.hpp"
#include "tgia/similarity.hpp"
#include "tgia/textgen.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace tgia {

struct SamplerConfig {
  int n_negatives = 1;   // N_n
  int n_positives = 2;   // N_p
  int n_rounds = 2;      // N_r
  int pool_size = 1000;  // N_e
  std::uint64_t seed = 0;
};

/// One generated candidate, scored with the campaign's TiSimConfig and
/// importance vector. Zero-embedding candidates are kept in the transcript
/// but flagged discarded and never win selection.
struct CandidateText {
  std::string text;
  Strategy strategy = Strategy::stay_away;
  int round = 1;  // 1-based
  double ti_sim = 0.0;
  std::vector<NodeId> positive_group;
  bool discarded = false;
  std::string system_text;
  std::string user_text;
};

/// Per-target store of the positive-example group that achieved the lowest
/// candidate T-I similarity so far; reused in the final generation round.
class ReplayBuffer {
 public:
  struct Entry {
    std::vector<NodeId> group;
    double best_ti_sim = 0.0;
  };

  const Entry* find(NodeId target) const {
    const auto it = entries_.find(target);
    return it == entries_.end() ? nullptr : &it->second;
  }

  /// Keeps the entry iff `ti_sim` is a new per-target minimum.
  bool update(NodeId target, std::vector<NodeId> group, double ti_sim) {
    auto it = entries_.find(target);
    if (it != entries_.end() && it->second.best_ti_sim <= ti_sim) return false;
    entries_[target] = Entry{std::move(group), ti_sim};
    return true;
  }

 private:
  std::map<NodeId, Entry> entries_;
};

/// Top-n nodes by importance weight (ties to the lower id); returns fewer
/// when the support is smaller.
std::vector<NodeId> select_negatives(const ImportanceVector& importance,
                                     int n);

/// Uniform sample without replacement from nodes outside the target and its
/// k-hop neighborhood; deterministic per (seed, round). Throws when no node
/// is eligible.
std::vector<NodeId> sample_positive_pool(
    const TagGraph& graph, NodeId target,
    const std::vector<NodeId>& neighborhood, int pool_size,
    std::uint64_t seed, int round);

/// The n pool nodes with the lowest T-I similarity against the target,
/// ascending, ties to the lower id.
std::vector<std::pair<NodeId, double>> pick_positives(
    const std::vector<NodeId>& pool, const EmbeddingMatrix& features,
    NodeId target, const ImportanceVector& importance,
    const std::vector<NodeId>& neighborhood, const TiSimConfig& config,
    int n_positives);

/// Direct mode links every injected node to the target; indirect mode walks
/// the importance support in descending weight, round-robin, and never
/// touches the target. Placement is only defined for a degree budget of 1.
std::vector<NodeId> select_positions(const ImportanceVector& importance,
                                     NodeId target, const AttackBudget& budget,
                                     const std::vector<NodeId>& neighborhood);

/// Everything a campaign needs. Attacker-side label access goes through
/// `attacker_labels`; `eval_labels` belongs to the evaluator and is read
/// only to set the success flag after the attack is assembled.
struct AttackContext {
  const TagGraph* graph = nullptr;
  const EmbeddingMatrix* features = nullptr;
  EncoderSpec encoder;
  const GnnModel* surrogate = nullptr;
  const GnnModel* target_model = nullptr;
  const std::vector<int>* eval_labels = nullptr;
  const GuardedLabels* attacker_labels = nullptr;
  TiSimConfig tisim;
  ExplainConfig explain_config;
  int importance_m = 10;
  DomainMeta meta;
  GenParams gen;
  SamplerConfig sampler;
  std::vector<Strategy> strategies{Strategy::stay_away, Strategy::contrast,
                                   Strategy::fusion};
  bool example_sampling = true;  // false: stay-away-only baseline behaviour
  HttpTransport* transport = nullptr;
};

struct GenerationResult {
  CandidateText best;
  std::vector<CandidateText> all;
};

/// Runs n_rounds of generation across the configured strategies for one
/// injected node: fresh positive pools for rounds 1..N_r-1, the replay
/// buffer's stored group (when present) for the final round, every candidate
/// embedded and scored, the buffer updated on new per-target minima, and the
/// global minimum-similarity candidate returned (ties by strategy order,
/// then earlier round).
GenerationResult generate_injected_text(NodeId target, int injected_index,
                                        const AttackContext& context,
                                        const ImportanceVector& importance,
                                        const std::vector<NodeId>& neighborhood,
                                        ReplayBuffer& buffer);

struct TargetRecord {
  NodeId target = -1;
  bool skipped = false;
  bool success = false;
  int prediction = -1;
  int true_label = -1;
  std::vector<std::string> texts;       // one per injected node
  std::vector<std::string> strategies;  // winning strategy per injected node
  std::vector<double> ti_sims;          // winning score per injected node
  std::vector<NodeId> positions;
  std::vector<CandidateText> candidates;  // full transcript
  std::string skip_reason;
};

struct AttackOutcome {
  std::optional<PerturbedGraph> perturbed;
  TargetRecord record;
};

/// One full campaign against one target: importance from the surrogate
/// (computed once on the clean graph unless supplied), fresh text per
/// injected node, position selection, budget-checked assembly, and the
/// target model's verdict on the perturbed graph. Generation failures mark
/// the target skipped rather than failing the campaign.
AttackOutcome attack_target(NodeId target, const SplitSpec& split,
                            const AttackContext& context,
                            const AttackBudget& budget, ReplayBuffer& buffer,
                            const ImportanceVector* cached_importance = nullptr,
                            const std::vector<NodeId>* cached_neighborhood =
                                nullptr);

/// Features for a perturbed graph: base rows plus encode_one rows for the
/// injected texts, in injection order.
EmbeddingMatrix perturbed_features(const PerturbedGraph& perturbed,
                                   const EmbeddingMatrix& base_features,
                                   const EncoderSpec& encoder);

}  // namespace tgia
