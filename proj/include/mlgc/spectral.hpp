#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace mlgc {

struct Embedding {
  Eigen::MatrixXd coords;               // n x d
  std::vector<std::uint8_t> observed;   // optional per-row flag; empty means all rows observed
};

struct EigResult {
  Embedding vectors;       // n x K, orthonormal columns, deterministic signs
  Eigen::VectorXd values;  // K eigenvalues, ordered by |value| descending
};

// K eigenpairs of a symmetric matrix with largest |eigenvalue|. Ties broken by
// larger signed value, then by position in the ascending spectrum. Each
// eigenvector's first coordinate with |x| > 1e-12 is made positive.
EigResult top_abs_eigvecs(const Eigen::MatrixXd& s, int k);

// D^{-1/2} A D^{-1/2} with zero-degree rows/columns left at zero.
Eigen::MatrixXd normalized_laplacian(const Eigen::MatrixXd& a);

// Orthogonal O minimizing ||A - B O||_F, via SVD of B^T A.
Eigen::MatrixXd procrustes_align(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

// min over orthogonal O of ||A - B O||_F.
double procrustes_residual(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

}  // namespace mlgc
