#include "tgia/synthetic.hpp"

#include "tgia/rng.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <unordered_set>

namespace tgia {

SynthConfig default_synth_config(int nodes, int classes) {
  SynthConfig config;
  config.nodes = nodes;
  config.classes = classes;
  config.class_vocab.resize(static_cast<std::size_t>(classes));
  for (int c = 0; c < classes; ++c) {
    auto& vocab = config.class_vocab[static_cast<std::size_t>(c)];
    for (int w = 0; w < 30; ++w)
      vocab.push_back("topic" + std::to_string(c) + "kw" + std::to_string(w));
  }
  for (int w = 0; w < 40; ++w)
    config.filler_vocab.push_back("common" + std::to_string(w));
  return config;
}

std::pair<TagGraph, SplitSpec> generate_synthetic(const SynthConfig& config,
                                                  std::uint64_t seed) {
  if (config.classes < 2)
    throw std::invalid_argument("need at least 2 classes");
  if (config.nodes < config.classes)
    throw std::invalid_argument("need at least one node per class");
  if (config.p_in < 0.0 || config.p_in > 1.0 || config.p_out < 0.0 ||
      config.p_out > 1.0)
    throw std::invalid_argument("edge probabilities must lie in [0,1]");
  if (config.p_in <= config.p_out)
    throw std::invalid_argument("p_in must exceed p_out");
  if (static_cast<int>(config.class_vocab.size()) != config.classes)
    throw std::invalid_argument("need one vocabulary per class");
  std::unordered_set<std::string> seen;
  for (const auto& vocab : config.class_vocab) {
    if (vocab.empty()) throw std::invalid_argument("empty class vocabulary");
    for (const auto& w : vocab) {
      if (!seen.insert(w).second)
        throw std::invalid_argument("class vocabularies must be disjoint: " +
                                    w);
    }
  }
  if (config.filler_vocab.empty())
    throw std::invalid_argument("empty filler vocabulary");
  if (config.words_per_text < 1)
    throw std::invalid_argument("words_per_text must be >= 1");

  const int n = config.nodes;
  Rng label_rng(mix_seed(seed, 1));
  std::vector<int> labels(static_cast<std::size_t>(n));
  for (int v = 0; v < n; ++v) labels[static_cast<std::size_t>(v)] = v % config.classes;
  label_rng.shuffle(labels);

  Rng edge_rng(mix_seed(seed, 2));
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (int u = 0; u < n; ++u) {
    for (int v = u + 1; v < n; ++v) {
      const double p = labels[static_cast<std::size_t>(u)] ==
                               labels[static_cast<std::size_t>(v)]
                           ? config.p_in
                           : config.p_out;
      if (edge_rng.bernoulli(p)) edges.emplace_back(u, v);
    }
  }

  Rng text_rng(mix_seed(seed, 3));
  std::vector<std::string> texts(static_cast<std::size_t>(n));
  for (int v = 0; v < n; ++v) {
    const auto& vocab =
        config.class_vocab[static_cast<std::size_t>(labels[static_cast<std::size_t>(v)])];
    std::string text;
    for (int w = 0; w < config.words_per_text; ++w) {
      const bool from_class = text_rng.bernoulli(config.class_word_fraction);
      const auto& pool = from_class ? vocab : config.filler_vocab;
      const auto& word =
          pool[static_cast<std::size_t>(text_rng.uniform_below(pool.size()))];
      if (!text.empty()) text += ' ';
      text += word;
    }
    texts[static_cast<std::size_t>(v)] = std::move(text);
  }

  TagGraph graph = make_tag_graph(n, config.classes, std::move(edges),
                                  std::move(texts), std::move(labels));

  // 6:2:2 split; attacker-labeled nodes drawn from the test partition.
  Rng split_rng(mix_seed(seed, 4));
  std::vector<NodeId> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  split_rng.shuffle(order);
  const int n_train = (n * 6) / 10;
  const int n_val = (n * 2) / 10;
  SplitSpec split;
  split.train.assign(order.begin(), order.begin() + n_train);
  split.validation.assign(order.begin() + n_train,
                          order.begin() + n_train + n_val);
  split.test.assign(order.begin() + n_train + n_val, order.end());
  const int n_attacker = static_cast<int>(
      static_cast<double>(split.test.size()) * config.attacker_labeled_fraction);
  split.attacker_labeled.assign(split.test.begin(),
                                split.test.begin() + n_attacker);
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.validation.begin(), split.validation.end());
  std::sort(split.test.begin(), split.test.end());
  std::sort(split.attacker_labeled.begin(), split.attacker_labeled.end());
  validate_split(split, graph);
  return {std::move(graph), std::move(split)};
}

}  // namespace tgia
