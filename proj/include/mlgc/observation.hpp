#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <utility>
#include <vector>

namespace mlgc {

/// Per-layer node presence vector w. Nodes with w[i]=0 contribute no entries
/// in that layer.
struct LayerMask {
  std::vector<std::uint8_t> present;

  LayerMask() = default;
  explicit LayerMask(std::vector<std::uint8_t> present_) : present(std::move(present_)) {}
  static LayerMask all_ones(int n) { return LayerMask(std::vector<std::uint8_t>(n, 1)); }

  int n() const { return static_cast<int>(present.size()); }
  bool observed(int i) const { return present[i] != 0; }

  /// J = { i : w_i = 1 }, ascending.
  std::vector<int> observed_indices() const;
  int num_observed() const;
};

/// A multilayer graph with per-layer missing nodes. Each layer is stored as
/// a full n x n symmetric matrix, zero outside the observed block J_l x J_l,
/// together with its presence vector. Sampled graphs and loaded datasets
/// are 0/1 with zero diagonal; the dense constructor also accepts
/// real-valued symmetric layers (e.g. expected matrices) so that methods
/// can be run on noiseless inputs.
class MultilayerObservation {
 public:
  MultilayerObservation() = default;

  /// Strict path used by the sampler and the dataset loader: entries must be
  /// 0/1, the diagonal zero, and the matrix symmetric and mask-consistent.
  static MultilayerObservation from_binary_layers(std::vector<Eigen::MatrixXd> layers,
                                                  std::vector<LayerMask> masks);

  /// Accepts any symmetric real-valued layers; only mask consistency and
  /// symmetry are enforced.
  static MultilayerObservation from_dense_layers(std::vector<Eigen::MatrixXd> layers,
                                                 std::vector<LayerMask> masks);

  int n() const { return n_; }
  int num_layers() const { return static_cast<int>(layers_.size()); }
  const Eigen::MatrixXd& layer(int l) const { return layers_.at(l); }
  const LayerMask& mask(int l) const { return masks_.at(l); }

  /// Mean of the zero-filled layers, (1/L) * sum_l A^(l) (.) Omega^(l).
  Eigen::MatrixXd mean_adjacency() const;

  /// True when node i is observed in at least one layer.
  bool observed_somewhere(int i) const;

 private:
  MultilayerObservation(std::vector<Eigen::MatrixXd> layers, std::vector<LayerMask> masks,
                        bool binary);

  int n_ = 0;
  std::vector<Eigen::MatrixXd> layers_;
  std::vector<LayerMask> masks_;
};

/// The |J_l| x |J_l| submatrix of layer l restricted to observed nodes,
/// together with the index list J_l (ascending node order).
std::pair<std::vector<int>, Eigen::MatrixXd> restrict_to_observed(
    const MultilayerObservation& obs, int l);

}  // namespace mlgc
