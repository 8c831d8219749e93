#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <cstdint>

namespace tgia {

using Scalar = double;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<Scalar>;

using NodeId = std::int32_t;

/// Dense node-feature matrix, one row per node.
using EmbeddingMatrix = Matrix;

}  // namespace tgia
