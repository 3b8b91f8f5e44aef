#pragma once

#include <string>

#include <Eigen/Dense>

#include "mlgc/partition.hpp"

namespace mlgc {

/// counts(a, b) = #{ i : zhat(i) = a and z(i) = b }, padded to a square
/// max(K, K') x max(K, K') table so permutation matching is always defined.
struct ConfusionTable {
  Eigen::MatrixXi counts;
  ConfusionTable(const Partition& zhat, const Partition& z);
  int total() const { return counts.sum(); }
};

/// (1/n) min over label permutations sigma of #{ i : zhat(i) != sigma(z(i)) }.
/// Exact: brute force over permutations for K <= 8, optimal assignment above.
double misclustering_rate(const Partition& zhat, const Partition& z);

// Both exact paths, exposed so they can be cross-checked.
double misclustering_rate_brute(const Partition& zhat, const Partition& z);
double misclustering_rate_hungarian(const Partition& zhat, const Partition& z);

enum class NmiNorm { sqrt, max, arith };

NmiNorm nmi_norm_from_string(const std::string& name);
std::string to_string(NmiNorm norm);

/// Normalized mutual information with natural logs. Default normalization is
/// the geometric mean sqrt(H(zhat) H(z)). Degenerate conventions: both
/// partitions single-cluster -> 1, exactly one single-cluster -> 0.
double nmi(const Partition& zhat, const Partition& z, NmiNorm norm = NmiNorm::sqrt);

}  // namespace mlgc
