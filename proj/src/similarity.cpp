#include "tgia/similarity.hpp"

#include <algorithm>
#include <stdexcept>

namespace tgia {

double cos_sim(const Vector& x, const Vector& y) {
  if (x.size() != y.size())
    throw std::invalid_argument("cos_sim: length mismatch (" +
                                std::to_string(x.size()) + " vs " +
                                std::to_string(y.size()) + ")");
  const double nx = x.norm();
  const double ny = y.norm();
  if (nx == 0.0 || ny == 0.0) return 0.0;
  return x.dot(y) / (nx * ny);
}

double ti_sim(NodeId target, const Vector& candidate_embedding,
              const EmbeddingMatrix& base_features,
              const ImportanceVector& importance,
              const std::vector<NodeId>& neighborhood,
              const TiSimConfig& config) {
  if (config.lambda < 0.0 || config.lambda > 1.0)
    throw std::invalid_argument("lambda must lie in [0,1]");
  if (importance.target != target)
    throw std::invalid_argument(
        "importance vector was computed for target " +
        std::to_string(importance.target) + ", not " + std::to_string(target));
  const double target_term =
      cos_sim(base_features.row(target).transpose(), candidate_embedding);
  double neighborhood_term = 0.0;
  for (const auto& [node, weight] : importance.weights) {
    if (!std::binary_search(neighborhood.begin(), neighborhood.end(), node))
      continue;
    neighborhood_term +=
        weight * cos_sim(base_features.row(node).transpose(),
                         candidate_embedding);
  }
  return (1.0 - config.lambda) * target_term +
         config.lambda * neighborhood_term;
}

}  // namespace tgia
