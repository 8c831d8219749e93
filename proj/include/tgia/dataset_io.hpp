#pragma once

#include "tgia/graph.hpp"

#include <string>
#include <utility>

namespace tgia {

/// Loads a graph and split from disk.
///   nodes_path: JSON lines, one {"id": int, "text": string, "label": int}
///               per line, ids dense 0..N-1.
///   edges_path: CSV with header "src,dst", one undirected edge per row,
///               smaller id first.
///   split_path: JSON object with train/validation/test/attacker_labeled/
///               targets id arrays.
/// Malformed records, dangling endpoints and split violations are reported
/// with file and line context.
std::pair<TagGraph, SplitSpec> load_dataset(const std::string& nodes_path,
                                            const std::string& edges_path,
                                            const std::string& split_path);

/// Writes the three dataset files in the formats load_dataset expects.
void save_dataset(const TagGraph& graph, const SplitSpec& split,
                  const std::string& nodes_path, const std::string& edges_path,
                  const std::string& split_path);

}  // namespace tgia
