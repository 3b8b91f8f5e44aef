#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "mlgc/partition.hpp"

namespace mlgc {

struct KmeansOptions {
  int restarts = 10;
  int max_iter = 300;
  std::uint64_t seed = 0;
};

struct KmeansResult {
  Partition labels;
  Eigen::MatrixXd centroids;  // K x d, mean of assigned rows at convergence
  double objective = 0.0;     // sum of squared distances to assigned centroid
  // One entry per candidate run (warm start first when given), holding the
  // Lloyd objective after each assignment step; each trace is non-increasing.
  std::vector<std::vector<double>> traces;
};

// Best-of-restarts Lloyd with k-means++ seeding. Ties (nearest centroid,
// seeding scan, equal objectives) always resolve to the lowest index, so a
// fixed seed gives a fixed result. Empty clusters are reseeded at the point
// farthest from its assigned centroid. When warm_centroids is given it is run
// as an extra first candidate, so the result is never worse than the warm start.
KmeansResult kmeans(const Eigen::MatrixXd& x, int k, const KmeansOptions& opts,
                    const Eigen::MatrixXd* warm_centroids = nullptr);

}  // namespace mlgc
