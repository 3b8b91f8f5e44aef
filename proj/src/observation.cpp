#include "mlgc/observation.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace mlgc {

std::vector<int> LayerMask::observed_indices() const {
  std::vector<int> idx;
  idx.reserve(present.size());
  for (int i = 0; i < n(); ++i)
    if (present[i]) idx.push_back(i);
  return idx;
}

int LayerMask::num_observed() const {
  int c = 0;
  for (auto v : present) c += (v != 0);
  return c;
}

namespace {

void check_common(const Eigen::MatrixXd& a, const LayerMask& mask, int n, int l) {
  const std::string where = "observation: layer " + std::to_string(l);
  if (a.rows() != n || a.cols() != n) throw std::invalid_argument(where + " is not n x n");
  if (mask.n() != n) throw std::invalid_argument(where + " mask length != n");
  if (n == 0) return;
  if (!a.allFinite()) throw std::invalid_argument(where + " has non-finite entries");
  if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-12)
    throw std::invalid_argument(where + " not symmetric");
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if ((!mask.observed(i) || !mask.observed(j)) && a(i, j) != 0.0)
        throw std::invalid_argument(where + " has a nonzero entry (" + std::to_string(i) + "," +
                                    std::to_string(j) + ") outside the observed block");
}

void check_binary(const Eigen::MatrixXd& a, int n, int l) {
  const std::string where = "observation: layer " + std::to_string(l);
  for (int i = 0; i < n; ++i) {
    if (a(i, i) != 0.0) throw std::invalid_argument(where + " has a self-loop at node " + std::to_string(i));
    for (int j = 0; j < n; ++j)
      if (a(i, j) != 0.0 && a(i, j) != 1.0)
        throw std::invalid_argument(where + " has a non 0/1 entry");
  }
}

}  // namespace

MultilayerObservation::MultilayerObservation(std::vector<Eigen::MatrixXd> layers,
                                             std::vector<LayerMask> masks, bool binary)
    : layers_(std::move(layers)), masks_(std::move(masks)) {
  if (layers_.empty()) throw std::invalid_argument("observation: need at least one layer");
  if (layers_.size() != masks_.size())
    throw std::invalid_argument("observation: layer/mask count mismatch");
  n_ = static_cast<int>(layers_[0].rows());
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    check_common(layers_[l], masks_[l], n_, static_cast<int>(l));
    if (binary) check_binary(layers_[l], n_, static_cast<int>(l));
  }
}

MultilayerObservation MultilayerObservation::from_binary_layers(
    std::vector<Eigen::MatrixXd> layers, std::vector<LayerMask> masks) {
  return MultilayerObservation(std::move(layers), std::move(masks), true);
}

MultilayerObservation MultilayerObservation::from_dense_layers(
    std::vector<Eigen::MatrixXd> layers, std::vector<LayerMask> masks) {
  return MultilayerObservation(std::move(layers), std::move(masks), false);
}

Eigen::MatrixXd MultilayerObservation::mean_adjacency() const {
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(n_, n_);
  for (const auto& a : layers_) sum += a;
  return sum / static_cast<double>(layers_.size());
}

bool MultilayerObservation::observed_somewhere(int i) const {
  for (const auto& m : masks_)
    if (m.observed(i)) return true;
  return false;
}

std::pair<std::vector<int>, Eigen::MatrixXd> restrict_to_observed(
    const MultilayerObservation& obs, int l) {
  if (l < 0 || l >= obs.num_layers()) throw std::invalid_argument("restrict_to_observed: bad layer index");
  std::vector<int> idx = obs.mask(l).observed_indices();
  const int m = static_cast<int>(idx.size());
  Eigen::MatrixXd sub(m, m);
  const auto& a = obs.layer(l);
  for (int r = 0; r < m; ++r)
    for (int c = 0; c < m; ++c) sub(r, c) = a(idx[r], idx[c]);
  return {std::move(idx), std::move(sub)};
}

}  // namespace mlgc
