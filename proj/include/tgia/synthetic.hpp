#pragma once

#include "tgia/graph.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace tgia {

/// Stochastic-block-model generator config. Each class owns a disjoint
/// keyword vocabulary; node texts mix class keywords with shared filler so
/// text similarity correlates with class membership.
struct SynthConfig {
  int nodes = 400;
  int classes = 4;
  double p_in = 0.05;   // intra-class edge probability
  double p_out = 0.005; // inter-class edge probability
  int words_per_text = 12;
  double class_word_fraction = 0.7;
  std::vector<std::vector<std::string>> class_vocab;  // one list per class
  std::vector<std::string> filler_vocab;
  double attacker_labeled_fraction = 0.10;  // of the test set
};

/// Fills class_vocab/filler_vocab with generated disjoint token lists when
/// they are empty.
SynthConfig default_synth_config(int nodes = 400, int classes = 4);

/// Deterministic SBM graph with class-keyed texts and a 6:2:2 split.
/// attacker_labeled is drawn from the test set; targets is left empty for a
/// later margin-stratified selection. Throws std::invalid_argument on
/// degenerate configs.
std::pair<TagGraph, SplitSpec> generate_synthetic(const SynthConfig& config,
                                                  std::uint64_t seed);

}  // namespace tgia
