#pragma once

#include "tgia/explain.hpp"
#include "tgia/types.hpp"

#include <vector>

namespace tgia {

struct TiSimConfig {
  double lambda = 0.1;  // trade-off between target and neighborhood terms
  int k = 2;            // hop count; tied to the surrogate's depth
};

/// Cosine similarity; 0 when either vector has zero norm.
double cos_sim(const Vector& x, const Vector& y);

/// Target-injected node similarity: a convex blend of the candidate's
/// cosine against the target and its importance-weighted cosines against
/// the target's k-hop neighborhood. Neighborhood nodes outside the
/// importance support contribute zero; an empty neighborhood drops the
/// second term.
double ti_sim(NodeId target, const Vector& candidate_embedding,
              const EmbeddingMatrix& base_features,
              const ImportanceVector& importance,
              const std::vector<NodeId>& neighborhood,
              const TiSimConfig& config);

}  // namespace tgia
