#pragma once

#include <Eigen/Dense>
#include <vector>

namespace mlgc {

/// Node-to-community assignment. Labels are stored 0-based; the 1..K
/// convention used in files and CLI output is handled by the
/// from_one_based/to_one_based converters so the shift lives in one place.
struct Partition {
  std::vector<int> labels;  // labels[i] in [0, k)
  int k = 0;

  Partition() = default;
  Partition(std::vector<int> labels_, int k_);

  int n() const { return static_cast<int>(labels.size()); }

  /// Throws std::invalid_argument if any label is outside [0, k).
  void validate() const;

  std::vector<int> community_sizes() const;

  static Partition from_one_based(const std::vector<int>& labels, int k);
  std::vector<int> to_one_based() const;
};

/// n x K 0/1 matrix with a single 1 per row, at column labels[i].
Eigen::MatrixXd membership_matrix(const Partition& p);

/// P = Z Pi Z^T, the edge-probability matrix induced by a partition and a
/// K x K symmetric connectivity matrix.
Eigen::MatrixXd expected_matrix(const Partition& p, const Eigen::MatrixXd& pi);

/// Recovers labels from a membership-like matrix by per-row argmax.
Partition partition_from_membership(const Eigen::MatrixXd& z);

}  // namespace mlgc
