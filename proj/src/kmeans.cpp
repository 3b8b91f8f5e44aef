#include "mlgc/kmeans.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

#include "mlgc/rng.hpp"

namespace mlgc {

namespace {

struct Run {
  std::vector<int> labels;
  Eigen::MatrixXd centroids;
  double objective = std::numeric_limits<double>::infinity();
  std::vector<double> trace;
};

Eigen::MatrixXd seed_plus_plus(const Eigen::MatrixXd& x, int k, rng::SplitMix64& gen) {
  const int n = static_cast<int>(x.rows());
  Eigen::MatrixXd c(k, x.cols());
  c.row(0) = x.row(static_cast<int>(gen.below(static_cast<std::uint64_t>(n))));
  Eigen::VectorXd d2(n);
  for (int i = 0; i < n; ++i) d2(i) = (x.row(i) - c.row(0)).squaredNorm();
  for (int j = 1; j < k; ++j) {
    const double total = d2.sum();
    int pick = 0;
    if (total > 0.0) {
      const double u = gen.next_double() * total;
      double cum = 0.0;
      pick = n - 1;
      for (int i = 0; i < n; ++i) {
        cum += d2(i);
        if (u < cum) {
          pick = i;
          break;
        }
      }
    } else {
      pick = static_cast<int>(gen.below(static_cast<std::uint64_t>(n)));
    }
    c.row(j) = x.row(pick);
    for (int i = 0; i < n; ++i)
      d2(i) = std::min(d2(i), (x.row(i) - c.row(j)).squaredNorm());
  }
  return c;
}

Run lloyd(const Eigen::MatrixXd& x, int k, int max_iter, Eigen::MatrixXd centroids) {
  const int n = static_cast<int>(x.rows());
  Run run;
  std::vector<int> labels(n, -1), prev;
  std::vector<int> counts(k, 0);
  Eigen::VectorXd dist(n);

  for (int it = 0; it < max_iter; ++it) {
    // Assignment; ties go to the lowest centroid index.
    std::fill(counts.begin(), counts.end(), 0);
    for (int i = 0; i < n; ++i) {
      int best = 0;
      double bestd = (x.row(i) - centroids.row(0)).squaredNorm();
      for (int c = 1; c < k; ++c) {
        const double d = (x.row(i) - centroids.row(c)).squaredNorm();
        if (d < bestd) {
          bestd = d;
          best = c;
        }
      }
      labels[i] = best;
      dist(i) = bestd;
      ++counts[best];
    }
    // Empty-cluster repair: reseed at the point farthest from its centroid.
    // That point's contribution drops to zero, so the objective cannot rise.
    for (int c = 0; c < k; ++c) {
      if (counts[c] > 0) continue;
      int far = -1;
      double fard = -1.0;
      for (int i = 0; i < n; ++i) {
        if (counts[labels[i]] <= 1) continue;  // never empty another cluster
        if (dist(i) > fard) {
          fard = dist(i);
          far = i;
        }
      }
      if (far < 0) continue;  // n == k with duplicates; leave empty
      --counts[labels[far]];
      labels[far] = c;
      counts[c] = 1;
      centroids.row(c) = x.row(far);
      dist(far) = 0.0;
    }
    run.trace.push_back(dist.sum());
    if (labels == prev) break;
    prev = labels;
    // Update centroids to cluster means.
    centroids.setZero();
    for (int i = 0; i < n; ++i) centroids.row(labels[i]) += x.row(i);
    for (int c = 0; c < k; ++c)
      if (counts[c] > 0) centroids.row(c) /= static_cast<double>(counts[c]);
  }

  run.labels = std::move(labels);
  run.centroids = std::move(centroids);
  run.objective = run.trace.back();
  return run;
}

}  // namespace

KmeansResult kmeans(const Eigen::MatrixXd& x, int k, const KmeansOptions& opts,
                    const Eigen::MatrixXd* warm_centroids) {
  const int n = static_cast<int>(x.rows());
  if (k < 1) throw std::invalid_argument("kmeans: K must be >= 1");
  if (k > n) throw std::invalid_argument("kmeans: K exceeds number of rows");
  if (!x.allFinite()) throw std::invalid_argument("kmeans: non-finite input");
  if (opts.restarts < 1 && !warm_centroids)
    throw std::invalid_argument("kmeans: need at least one restart or a warm start");

  KmeansResult result;
  Run best;
  bool have_best = false;
  auto consider = [&](Run run) {
    result.traces.push_back(run.trace);
    if (!have_best || run.objective < best.objective) {
      best = std::move(run);
      have_best = true;
    }
  };

  if (warm_centroids) {
    if (warm_centroids->rows() != k || warm_centroids->cols() != x.cols())
      throw std::invalid_argument("kmeans: warm-start centroids must be K x d");
    consider(lloyd(x, k, opts.max_iter, *warm_centroids));
  }
  for (int r = 0; r < opts.restarts; ++r) {
    rng::SplitMix64 gen(rng::derive(opts.seed, rng::kStreamKmeans, static_cast<std::uint64_t>(r)));
    consider(lloyd(x, k, opts.max_iter, seed_plus_plus(x, k, gen)));
  }

  result.labels = Partition(std::move(best.labels), k);
  result.centroids = std::move(best.centroids);
  result.objective = best.objective;
  return result;
}

}  // namespace mlgc
