#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "mlgc/connectivity.hpp"
#include "mlgc/observation.hpp"
#include "mlgc/partition.hpp"

namespace mlgc {

enum class MaskMode { nodes, edges };

// Per-layer connectivity drawn as: diagonal ~ U[diag_lo, diag_hi],
// off-diagonal = offdiag_factor * U[diag_lo, diag_hi].
struct ConnectivityRecipe {
  double diag_lo = 0.18;
  double diag_hi = 0.19;
  double offdiag_factor = 0.7;
};

struct MlsbmConfig {
  int n = 0;
  int k = 0;
  int layers = 1;
  std::vector<int> community_sizes;             // empty -> multinomial, uniform 1/K
  std::optional<ConnectivitySpec> connectivity; // fixed per-layer matrices
  ConnectivityRecipe recipe;                    // used when connectivity is absent
  double rho = 1.0;
  MaskMode mask_mode = MaskMode::nodes;
  std::uint64_t seed = 0;

  void validate() const;  // throws std::invalid_argument
};

struct SampledInstance {
  Partition truth;
  ConnectivitySpec connectivity;
  MultilayerObservation obs;
};

SampledInstance sample_instance(const MlsbmConfig& cfg);

// L independent Bernoulli(rho) presence vectors. Layer l's draws do not depend
// on the total layer count, and lowering rho with a fixed seed only removes nodes.
std::vector<LayerMask> sample_node_masks(int n, int layers, double rho, std::uint64_t seed);

struct DropResult {
  MultilayerObservation obs;
  Partition truth;           // empty when no truth was supplied
  std::vector<int> kept;     // kept[i] = original index of retained node i
};

// Removes nodes observed in zero layers, consistently across layers, masks and
// (optionally) ground truth.
DropResult drop_unobserved_everywhere(const MultilayerObservation& obs,
                                      const Partition* truth = nullptr);

// K=3, balanced multinomial communities, diag ~ U[0.18,0.19], off-diag 0.7x.
MlsbmConfig paper_synthetic(int n, int layers, double rho, std::uint64_t seed);

}  // namespace mlgc
