#include "mlgc/connectivity.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <stdexcept>
#include <string>

namespace mlgc {

namespace {
constexpr double kSymmetryTol = 1e-12;
}

ConnectivitySpec::ConnectivitySpec(std::vector<Eigen::MatrixXd> layers) : layers_(std::move(layers)) {
  if (layers_.empty()) throw std::invalid_argument("connectivity: need at least one layer");
  const Eigen::Index k = layers_[0].rows();
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const auto& m = layers_[l];
    if (m.rows() != k || m.cols() != k) {
      throw std::invalid_argument("connectivity: layer " + std::to_string(l) + " is not K x K");
    }
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > kSymmetryTol) {
      throw std::invalid_argument("connectivity: layer " + std::to_string(l) + " not symmetric");
    }
    if (m.minCoeff() < 0.0 || m.maxCoeff() > 1.0) {
      throw std::invalid_argument("connectivity: layer " + std::to_string(l) +
                                  " has entries outside [0,1]");
    }
  }
}

double ConnectivitySpec::p_max_layer(int l) const { return layers_.at(l).maxCoeff(); }

double ConnectivitySpec::p_max() const {
  double m = 0.0;
  for (const auto& pi : layers_) m = std::max(m, pi.maxCoeff());
  return m;
}

double ConnectivitySpec::lambda_k(int l) const {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(layers_.at(l));
  return svd.singularValues()(k() - 1);
}

}  // namespace mlgc
