#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "mlgc/kmeans.hpp"
#include "mlgc/observation.hpp"
#include "mlgc/olmf.hpp"
#include "mlgc/partition.hpp"

namespace mlgc {

struct MethodConfig {
  int k = 0;
  int iterations = 5;        // imputation rounds of sum_adj_iter
  int kpod_max_iter = 100;
  double kpod_tol = 1e-8;    // secondary stop on relative objective change
  OlmfOptions olmf;
  bool laplacian = false;    // sum_adj0 only
  int kmeans_restarts = 10;
  int kmeans_max_iter = 300;
  std::uint64_t seed = 0;

  KmeansOptions kmeans_options() const { return KmeansOptions{kmeans_restarts, kmeans_max_iter, seed}; }
};

// Spectral clustering of the mean zero-filled adjacency (optionally of its
// normalized Laplacian): top-|eigenvalue| K eigenvectors, then k-means.
Partition sum_adj0(const MultilayerObservation& obs, int k, bool laplacian,
                   const KmeansOptions& km);

// Block-average estimator (Z^T Z)^{-1} Z^T A Z (Z^T Z)^{-1}.
// Throws when a community is empty.
Eigen::MatrixXd estimate_connectivity(const Partition& zhat, const Eigen::MatrixXd& a);

// Iterative imputation: alternately cluster the mean matrix's spectral
// embedding, estimate per-layer connectivity, and replace entries in the
// unobserved blocks (diagonal included) by the clamped model value, keeping
// observed entries untouched. t imputation rounds, then a final k-means.
Partition sum_adj_iter(const MultilayerObservation& obs, int k, int t, const KmeansOptions& km);

// Aggregate spectral kernel: top-K eigenvectors of sum_l U_l U_l^T where U_l
// is the per-layer embedding, then k-means.
Partition aggr_kern(const MultilayerObservation& obs, int k, const KmeansOptions& km);

struct KpodResult {
  Partition labels;
  int iterations = 0;
  std::vector<double> objective_trace;  // masked objective per outer iteration
  bool converged = false;               // labels stabilized before max_iter
};

// k-means on the stacked per-layer embeddings with missing rows treated as
// missing data: alternate filling unobserved coordinates from the current
// centroids with a warm-started k-means, so the masked objective never rises.
// Requires every node observed in at least one layer.
KpodResult kpod(const MultilayerObservation& obs, int k, int max_iter, double tol,
                const KmeansOptions& km);

// Top-|eigenvalue| K eigenvectors of layer l restricted to its observed
// nodes, re-embedded as rows at J_l (zero rows elsewhere). If |J_l| < K the
// trailing columns are zero.
Eigen::MatrixXd layer_embedding(const MultilayerObservation& obs, int l, int k);

struct MethodOutput {
  Partition labels;
  nlohmann::json diagnostics;
};

// Dispatch by CLI id: sum-adj0 | sum-adj-iter | k-pod | olmfm | aggr-kern.
MethodOutput run_method(const std::string& id, const MultilayerObservation& obs,
                        const MethodConfig& cfg);

const std::vector<std::string>& method_ids();

}  // namespace mlgc
