#pragma once

#include <Eigen/Dense>
#include <vector>

namespace mlgc {

/// Per-layer K x K symmetric matrices of edge probabilities.
class ConnectivitySpec {
 public:
  ConnectivitySpec() = default;
  explicit ConnectivitySpec(std::vector<Eigen::MatrixXd> layers);

  int num_layers() const { return static_cast<int>(layers_.size()); }
  int k() const { return layers_.empty() ? 0 : static_cast<int>(layers_[0].rows()); }
  const Eigen::MatrixXd& layer(int l) const { return layers_.at(l); }
  const std::vector<Eigen::MatrixXd>& layers() const { return layers_; }

  double p_max_layer(int l) const;
  double p_max() const;

  /// K-th largest singular value of layer l's connectivity matrix.
  double lambda_k(int l) const;

 private:
  std::vector<Eigen::MatrixXd> layers_;
};

}  // namespace mlgc
