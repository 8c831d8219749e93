#include "tgia/attack.hpp"

#include "tgia/rng.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

namespace tgia {

std::vector<NodeId> select_negatives(const ImportanceVector& importance,
                                     int n) {
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  // ImportanceVector is already sorted by weight descending, ties by id.
  std::vector<NodeId> out;
  for (const auto& [node, weight] : importance.weights) {
    if (static_cast<int>(out.size()) == n) break;
    out.push_back(node);
  }
  return out;
}

std::vector<NodeId> sample_positive_pool(
    const TagGraph& graph, NodeId target,
    const std::vector<NodeId>& neighborhood, int pool_size,
    std::uint64_t seed, int round) {
  if (pool_size < 1) throw std::invalid_argument("pool_size must be >= 1");
  std::vector<char> excluded(static_cast<std::size_t>(graph.node_count), 0);
  excluded[static_cast<std::size_t>(target)] = 1;
  for (NodeId v : neighborhood) excluded[static_cast<std::size_t>(v)] = 1;
  std::vector<NodeId> eligible;
  for (NodeId v = 0; v < graph.node_count; ++v)
    if (!excluded[static_cast<std::size_t>(v)]) eligible.push_back(v);
  if (eligible.empty())
    throw std::runtime_error(
        "no nodes eligible for the positive pool around target " +
        std::to_string(target));
  Rng rng(mix_seed(seed, static_cast<std::uint64_t>(round)));
  auto sample = rng.sample_without_replacement(
      std::move(eligible), static_cast<std::size_t>(pool_size));
  std::sort(sample.begin(), sample.end());
  return sample;
}

std::vector<std::pair<NodeId, double>> pick_positives(
    const std::vector<NodeId>& pool, const EmbeddingMatrix& features,
    NodeId target, const ImportanceVector& importance,
    const std::vector<NodeId>& neighborhood, const TiSimConfig& config,
    int n_positives) {
  if (pool.empty()) throw std::invalid_argument("empty positive pool");
  std::vector<std::pair<NodeId, double>> scored;
  scored.reserve(pool.size());
  for (NodeId v : pool)
    scored.emplace_back(v, ti_sim(target, features.row(v).transpose(),
                                  features, importance, neighborhood, config));
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second < b.second;
    return a.first < b.first;
  });
  if (scored.size() > static_cast<std::size_t>(n_positives))
    scored.resize(static_cast<std::size_t>(n_positives));
  return scored;
}

std::vector<NodeId> select_positions(const ImportanceVector& importance,
                                     NodeId target, const AttackBudget& budget,
                                     const std::vector<NodeId>& neighborhood) {
  if (budget.max_degree != 1)
    throw std::invalid_argument(
        "position placement is only defined for a degree budget of 1");
  std::vector<NodeId> positions;
  positions.reserve(static_cast<std::size_t>(budget.max_injected));
  if (budget.mode == InjectionMode::direct) {
    positions.assign(static_cast<std::size_t>(budget.max_injected), target);
    return positions;
  }
  if (neighborhood.empty() || importance.weights.empty())
    throw std::runtime_error("indirect attack around isolated target " +
                             std::to_string(target) +
                             ": no neighborhood to link to");
  for (int i = 0; i < budget.max_injected; ++i)
    positions.push_back(
        importance.weights[static_cast<std::size_t>(i) %
                           importance.weights.size()]
            .first);
  return positions;
}

namespace {

int strategy_rank(Strategy strategy) {
  switch (strategy) {
    case Strategy::stay_away: return 0;
    case Strategy::contrast: return 1;
    case Strategy::fusion: return 2;
  }
  return 3;
}

bool candidate_less(const CandidateText& a, const CandidateText& b) {
  if (a.ti_sim != b.ti_sim) return a.ti_sim < b.ti_sim;
  if (strategy_rank(a.strategy) != strategy_rank(b.strategy))
    return strategy_rank(a.strategy) < strategy_rank(b.strategy);
  return a.round < b.round;
}

}  // namespace

GenerationResult generate_injected_text(NodeId target, int injected_index,
                                        const AttackContext& context,
                                        const ImportanceVector& importance,
                                        const std::vector<NodeId>& neighborhood,
                                        ReplayBuffer& buffer) {
  const TagGraph& graph = *context.graph;
  const EmbeddingMatrix& features = *context.features;
  const SamplerConfig& sampler = context.sampler;

  const std::string& target_text =
      graph.texts[static_cast<std::size_t>(target)];
  std::vector<ScoredText> negatives;
  if (context.example_sampling) {
    for (NodeId v : select_negatives(importance, sampler.n_negatives))
      negatives.emplace_back(
          graph.texts[static_cast<std::size_t>(v)],
          ti_sim(target, features.row(v).transpose(), features, importance,
                 neighborhood, context.tisim));
  }

  const std::uint64_t node_seed = mix_seed(
      mix_seed(sampler.seed, static_cast<std::uint64_t>(target)),
      static_cast<std::uint64_t>(injected_index));

  GenerationResult result;
  for (int round = 1; round <= sampler.n_rounds; ++round) {
    std::vector<std::pair<NodeId, double>> positives;
    if (context.example_sampling) {
      const ReplayBuffer::Entry* stored = buffer.find(target);
      if (round == sampler.n_rounds && stored != nullptr) {
        for (NodeId v : stored->group)
          positives.emplace_back(
              v, ti_sim(target, features.row(v).transpose(), features,
                        importance, neighborhood, context.tisim));
      } else {
        const auto pool = sample_positive_pool(
            graph, target, neighborhood, sampler.pool_size, node_seed, round);
        positives = pick_positives(pool, features, target, importance,
                                   neighborhood, context.tisim,
                                   sampler.n_positives);
      }
    }
    std::vector<ScoredText> positive_texts;
    std::vector<NodeId> group;
    for (const auto& [v, sim] : positives) {
      positive_texts.emplace_back(graph.texts[static_cast<std::size_t>(v)],
                                  sim);
      group.push_back(v);
    }

    double group_best = std::numeric_limits<double>::infinity();
    for (Strategy strategy : context.strategies) {
      const bool uses_positives = strategy != Strategy::stay_away;
      if (uses_positives && positive_texts.empty()) continue;
      PromptBundle bundle = build_prompt(
          strategy, target_text, negatives,
          uses_positives ? positive_texts : std::vector<ScoredText>{},
          context.meta);
      GenParams params = context.gen;
      params.seed = mix_seed(
          mix_seed(params.seed, node_seed),
          static_cast<std::uint64_t>(round * 8 + strategy_rank(strategy)));
      CandidateText candidate;
      candidate.text = generate(bundle, params, context.transport);
      candidate.strategy = strategy;
      candidate.round = round;
      candidate.system_text = bundle.system_text;
      candidate.user_text = bundle.user_text;
      if (uses_positives) candidate.positive_group = group;
      const Vector embedding = encode_one(candidate.text, context.encoder);
      candidate.discarded = embedding.norm() == 0.0;
      candidate.ti_sim =
          candidate.discarded
              ? 0.0
              : ti_sim(target, embedding, features, importance, neighborhood,
                       context.tisim);
      if (uses_positives && !candidate.discarded)
        group_best = std::min(group_best, candidate.ti_sim);
      result.all.push_back(std::move(candidate));
    }
    if (!group.empty() && std::isfinite(group_best))
      buffer.update(target, group, group_best);
  }

  const CandidateText* best = nullptr;
  for (const auto& candidate : result.all) {
    if (candidate.discarded) continue;
    if (best == nullptr || candidate_less(candidate, *best)) best = &candidate;
  }
  if (best == nullptr)
    throw std::runtime_error("every candidate for target " +
                             std::to_string(target) +
                             " produced a zero embedding");
  result.best = *best;
  return result;
}

EmbeddingMatrix perturbed_features(const PerturbedGraph& perturbed,
                                   const EmbeddingMatrix& base_features,
                                   const EncoderSpec& encoder) {
  const Eigen::Index injected =
      static_cast<Eigen::Index>(perturbed.injected_texts.size());
  EmbeddingMatrix out(base_features.rows() + injected, base_features.cols());
  out.topRows(base_features.rows()) = base_features;
  for (Eigen::Index i = 0; i < injected; ++i)
    out.row(base_features.rows() + i) =
        encode_one(perturbed.injected_texts[static_cast<std::size_t>(i)],
                   encoder)
            .transpose();
  return out;
}

AttackOutcome attack_target(NodeId target, const SplitSpec& split,
                            const AttackContext& context,
                            const AttackBudget& budget, ReplayBuffer& buffer,
                            const ImportanceVector* cached_importance,
                            const std::vector<NodeId>* cached_neighborhood) {
  if (std::find(split.targets.begin(), split.targets.end(), target) ==
      split.targets.end())
    throw std::invalid_argument("node " + std::to_string(target) +
                                " is not in the target set");

  AttackOutcome outcome;
  outcome.record.target = target;

  ImportanceVector importance;
  std::vector<NodeId> neighborhood;
  if (cached_importance != nullptr && cached_neighborhood != nullptr) {
    importance = *cached_importance;
    neighborhood = *cached_neighborhood;
  } else {
    importance = node_importance(
        explain(*context.surrogate, *context.graph, *context.features, target,
                context.explain_config),
        context.importance_m);
    neighborhood = khop_neighborhood(*context.graph, target, context.tisim.k);
  }

  std::vector<std::string> texts;
  try {
    for (int i = 0; i < budget.max_injected; ++i) {
      GenerationResult generated = generate_injected_text(
          target, i, context, importance, neighborhood, buffer);
      texts.push_back(generated.best.text);
      outcome.record.strategies.push_back(
          strategy_name(generated.best.strategy));
      outcome.record.ti_sims.push_back(generated.best.ti_sim);
      for (auto& candidate : generated.all)
        outcome.record.candidates.push_back(std::move(candidate));
    }
  } catch (const GenerationError& e) {
    outcome.record.skipped = true;
    outcome.record.skip_reason = e.what();
    return outcome;
  }
  outcome.record.texts = texts;

  const std::vector<NodeId> positions =
      select_positions(importance, target, budget, neighborhood);
  std::vector<std::pair<int, NodeId>> links;
  for (std::size_t i = 0; i < texts.size(); ++i)
    links.emplace_back(static_cast<int>(i), positions[i]);
  outcome.record.positions.assign(positions.begin(),
                                  positions.begin() +
                                      static_cast<long>(texts.size()));

  PerturbedGraph perturbed = inject_nodes(*context.graph, std::move(texts),
                                          std::move(links), budget, target);
  const EmbeddingMatrix full_features =
      perturbed_features(perturbed, *context.features, context.encoder);
  const Matrix logits =
      model_forward(*context.target_model, perturbed, full_features);
  const auto row = logits.row(target);
  int prediction = 0;
  for (int c = 1; c < row.size(); ++c)
    if (row[c] > row[prediction]) prediction = c;
  outcome.record.prediction = prediction;
  outcome.record.true_label =
      (*context.eval_labels)[static_cast<std::size_t>(target)];
  outcome.record.success = prediction != outcome.record.true_label;
  outcome.perturbed = std::move(perturbed);
  return outcome;
}

}  // namespace tgia
