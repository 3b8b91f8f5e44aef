#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mlgc/kmeans.hpp"
#include "mlgc/observation.hpp"
#include "mlgc/partition.hpp"

namespace mlgc {

// Shared-factor model: one n x K factor Q for all layers, one K x K core per
// layer. The orthonormality constraint on Q is relaxed during optimization.
struct OlmfState {
  Eigen::MatrixXd q;                 // n x K
  std::vector<Eigen::MatrixXd> b;    // L matrices, K x K
};

struct OlmfOptions {
  int max_iterations = 500;
  double function_tolerance = 1e-14;
  double gradient_tolerance = 1e-12;
  double parameter_tolerance = 1e-12;
  bool orthogonality_penalty = false;   // add weight * ||Q^T Q - I||_F^2
  double penalty_weight = 1.0;
  bool reorthonormalize = true;         // QR on Q before the final k-means
};

struct OlmfDiagnostics {
  double objective = 0.0;              // masked fit term at the solution
  double gradient_norm = 0.0;
  double orthogonality_defect = 0.0;   // ||Q^T Q - I||_F before any QR
  int iterations = 0;
  std::string termination;
};

// F(Q, B) = sum_l || A_l - Q_l B^(l) Q_l^T ||_F^2 where A_l is the
// zero-filled observed layer and Q_l is Q with rows outside J_l zeroed.
// Gradients of F: dF/dQ = -2 sum_l (R_l Q_l B_l^T + R_l^T Q_l B_l) with
// R_l = A_l - Q_l B_l Q_l^T, and dF/dB_l = -2 Q_l^T R_l Q_l. Null gradient
// pointers skip that gradient.
double olmf_objective_grads(const OlmfState& state, const MultilayerObservation& obs,
                            Eigen::MatrixXd* grad_q, std::vector<Eigen::MatrixXd>* grad_b);

struct OlmfResult {
  OlmfState state;     // q re-orthonormalized when requested
  Partition labels;    // k-means on the rows of q
  OlmfDiagnostics diagnostics;
};

// Quasi-Newton (L-BFGS) minimization of the relaxed objective, initialized
// from the mean-adjacency spectral subspace, with per-layer cores initialized
// by masked least squares.
OlmfResult olmfm(const MultilayerObservation& obs, int k, const OlmfOptions& opts,
                 const KmeansOptions& km);

}  // namespace mlgc
