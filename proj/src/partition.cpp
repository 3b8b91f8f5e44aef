#include "mlgc/partition.hpp"

#include <stdexcept>
#include <string>

namespace mlgc {

Partition::Partition(std::vector<int> labels_, int k_) : labels(std::move(labels_)), k(k_) {
  validate();
}

void Partition::validate() const {
  if (k < 1) throw std::invalid_argument("partition: community count must be >= 1");
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= k) {
      throw std::invalid_argument("partition: label " + std::to_string(labels[i]) +
                                  " at node " + std::to_string(i) + " outside [0," +
                                  std::to_string(k) + ")");
    }
  }
}

std::vector<int> Partition::community_sizes() const {
  std::vector<int> sizes(k, 0);
  for (int l : labels) ++sizes[l];
  return sizes;
}

Partition Partition::from_one_based(const std::vector<int>& labels, int k) {
  std::vector<int> shifted(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) shifted[i] = labels[i] - 1;
  return Partition(std::move(shifted), k);
}

std::vector<int> Partition::to_one_based() const {
  std::vector<int> out(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) out[i] = labels[i] + 1;
  return out;
}

Eigen::MatrixXd membership_matrix(const Partition& p) {
  p.validate();
  Eigen::MatrixXd z = Eigen::MatrixXd::Zero(p.n(), p.k);
  for (int i = 0; i < p.n(); ++i) z(i, p.labels[i]) = 1.0;
  return z;
}

Eigen::MatrixXd expected_matrix(const Partition& p, const Eigen::MatrixXd& pi) {
  p.validate();
  if (pi.rows() != p.k || pi.cols() != p.k) {
    throw std::invalid_argument("expected_matrix: connectivity must be K x K");
  }
  const int n = p.n();
  Eigen::MatrixXd out(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out(i, j) = pi(p.labels[i], p.labels[j]);
  return out;
}

Partition partition_from_membership(const Eigen::MatrixXd& z) {
  const int n = static_cast<int>(z.rows());
  const int k = static_cast<int>(z.cols());
  std::vector<int> labels(n);
  for (int i = 0; i < n; ++i) {
    int best = 0;
    z.row(i).maxCoeff(&best);
    labels[i] = best;
  }
  return Partition(std::move(labels), k);
}

}  // namespace mlgc
