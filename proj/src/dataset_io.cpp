#include "tgia/dataset_io.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace tgia {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, std::size_t line,
                       const std::string& what) {
  throw std::runtime_error(path + ":" + std::to_string(line) + ": " + what);
}

std::ifstream open_or_throw(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return in;
}

std::vector<NodeId> id_array(const json& j, const std::string& key,
                             const std::string& path) {
  if (!j.contains(key))
    throw std::runtime_error(path + ": split is missing field \"" + key +
                             "\"");
  if (!j.at(key).is_array())
    throw std::runtime_error(path + ": split field \"" + key +
                             "\" is not an array");
  std::vector<NodeId> out;
  for (const auto& v : j.at(key)) {
    if (!v.is_number_integer())
      throw std::runtime_error(path + ": split field \"" + key +
                               "\" contains a non-integer id");
    out.push_back(v.get<NodeId>());
  }
  return out;
}

}  // namespace

std::pair<TagGraph, SplitSpec> load_dataset(const std::string& nodes_path,
                                            const std::string& edges_path,
                                            const std::string& split_path) {
  // Node records.
  std::vector<std::string> texts;
  std::vector<int> labels;
  {
    std::ifstream in = open_or_throw(nodes_path);
    std::string line;
    std::size_t lineno = 0;
    int expected_id = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty()) continue;
      json rec;
      try {
        rec = json::parse(line);
      } catch (const json::exception& e) {
        fail(nodes_path, lineno, std::string("malformed JSON: ") + e.what());
      }
      for (const char* field : {"id", "text", "label"}) {
        if (!rec.contains(field))
          fail(nodes_path, lineno,
               std::string("missing field \"") + field + "\"");
      }
      if (!rec["id"].is_number_integer())
        fail(nodes_path, lineno, "field \"id\" is not an integer");
      if (!rec["text"].is_string())
        fail(nodes_path, lineno, "field \"text\" is not a string");
      if (!rec["label"].is_number_integer())
        fail(nodes_path, lineno, "field \"label\" is not an integer");
      if (rec["id"].get<int>() != expected_id)
        fail(nodes_path, lineno,
             "expected id " + std::to_string(expected_id) + ", got " +
                 std::to_string(rec["id"].get<int>()) +
                 " (ids must be dense and ordered)");
      ++expected_id;
      texts.push_back(rec["text"].get<std::string>());
      labels.push_back(rec["label"].get<int>());
    }
    if (texts.empty()) throw std::runtime_error(nodes_path + ": no nodes");
  }
  const int node_count = static_cast<int>(texts.size());
  const int class_count =
      1 + *std::max_element(labels.begin(), labels.end());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0)
      throw std::runtime_error(nodes_path + ": node " + std::to_string(i) +
                               " has negative label");
  }

  // Edge records.
  std::vector<std::pair<NodeId, NodeId>> edges;
  {
    std::ifstream in = open_or_throw(edges_path);
    std::string line;
    std::size_t lineno = 0;
    if (!std::getline(in, line) || line.rfind("src,dst", 0) != 0)
      fail(edges_path, 1, "expected header \"src,dst\"");
    lineno = 1;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty()) continue;
      std::istringstream row(line);
      std::string a, b;
      if (!std::getline(row, a, ',') || !std::getline(row, b))
        fail(edges_path, lineno, "expected two comma-separated ids");
      NodeId src = 0, dst = 0;
      try {
        src = static_cast<NodeId>(std::stol(a));
        dst = static_cast<NodeId>(std::stol(b));
      } catch (const std::exception&) {
        fail(edges_path, lineno, "non-integer edge endpoint");
      }
      if (src > dst)
        fail(edges_path, lineno, "edge must list the smaller id first");
      if (src < 0 || dst >= node_count)
        fail(edges_path, lineno,
             "dangling endpoint: edge (" + std::to_string(src) + "," +
                 std::to_string(dst) + ") with N=" +
                 std::to_string(node_count));
      edges.emplace_back(src, dst);
    }
  }

  TagGraph graph;
  try {
    graph = make_tag_graph(node_count, class_count, std::move(edges),
                           std::move(texts), std::move(labels));
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(edges_path + ": " + e.what());
  }

  // Split.
  SplitSpec split;
  {
    std::ifstream in = open_or_throw(split_path);
    json j;
    try {
      j = json::parse(in);
    } catch (const json::exception& e) {
      throw std::runtime_error(split_path + ": malformed JSON: " + e.what());
    }
    split.train = id_array(j, "train", split_path);
    split.validation = id_array(j, "validation", split_path);
    split.test = id_array(j, "test", split_path);
    split.attacker_labeled = id_array(j, "attacker_labeled", split_path);
    split.targets = id_array(j, "targets", split_path);
  }
  try {
    validate_split(split, graph);
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(split_path + ": " + e.what());
  }
  return {std::move(graph), std::move(split)};
}

void save_dataset(const TagGraph& graph, const SplitSpec& split,
                  const std::string& nodes_path, const std::string& edges_path,
                  const std::string& split_path) {
  {
    std::ofstream out(nodes_path);
    if (!out) throw std::runtime_error("cannot write " + nodes_path);
    for (int v = 0; v < graph.node_count; ++v) {
      json rec{{"id", v},
               {"text", graph.texts[static_cast<std::size_t>(v)]},
               {"label", graph.labels[static_cast<std::size_t>(v)]}};
      out << rec.dump() << '\n';
    }
  }
  {
    std::ofstream out(edges_path);
    if (!out) throw std::runtime_error("cannot write " + edges_path);
    out << "src,dst\n";
    for (const auto& [u, v] : graph.edges) out << u << ',' << v << '\n';
  }
  {
    std::ofstream out(split_path);
    if (!out) throw std::runtime_error("cannot write " + split_path);
    json j{{"train", split.train},
           {"validation", split.validation},
           {"test", split.test},
           {"attacker_labeled", split.attacker_labeled},
           {"targets", split.targets}};
    out << j.dump(2) << '\n';
  }
}

}  // namespace tgia
