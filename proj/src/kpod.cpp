#include <cmath>
#include <stdexcept>

#include "mlgc/methods.hpp"
#include "mlgc/rng.hpp"

namespace mlgc {

KpodResult kpod(const MultilayerObservation& obs, int k, int max_iter, double tol,
                const KmeansOptions& km) {
  const int n = obs.n();
  const int num_layers = obs.num_layers();
  if (k < 1 || k > n) throw std::invalid_argument("k-pod: need 1 <= K <= n");
  if (max_iter < 1) throw std::invalid_argument("k-pod: max_iter must be >= 1");
  for (int i = 0; i < n; ++i)
    if (!obs.observed_somewhere(i))
      throw std::invalid_argument(
          "k-pod: node " + std::to_string(i) +
          " is observed in no layer; remove such nodes first (cluster --drop-unobserved, or "
          "drop_unobserved_everywhere in the library)");

  // Stacked per-layer spectral embeddings (n x KL) and the matching
  // row-observation mask, constant across each layer's K columns.
  const int d = k * num_layers;
  Eigen::MatrixXd u(n, d);
  Eigen::MatrixXd mask(n, d);
  for (int l = 0; l < num_layers; ++l) {
    u.middleCols(l * k, k) = layer_embedding(obs, l, k);
    for (int i = 0; i < n; ++i)
      mask.block(i, l * k, 1, k).setConstant(obs.mask(l).observed(i) ? 1.0 : 0.0);
  }

  auto masked_objective = [&](const Eigen::MatrixXd& fitted) {
    return ((u - fitted).cwiseProduct(mask)).squaredNorm();
  };

  KmeansOptions km0 = km;
  km0.seed = rng::derive(km.seed, rng::kStreamIter, 0);
  KmeansResult r = kmeans(u, k, km0);  // unobserved coordinates are zero-filled in u
  Eigen::MatrixXd fitted = membership_matrix(r.labels) * r.centroids;

  KpodResult out;
  out.labels = r.labels;
  out.objective_trace.push_back(masked_objective(fitted));

  const Eigen::MatrixXd ones = Eigen::MatrixXd::Ones(n, d);
  std::vector<int> prev = r.labels.labels;
  for (int it = 1; it <= max_iter; ++it) {
    const Eigen::MatrixXd x = u.cwiseProduct(mask) + fitted.cwiseProduct(ones - mask);
    KmeansOptions km_it = km;
    km_it.seed = rng::derive(km.seed, rng::kStreamIter, static_cast<std::uint64_t>(it));
    // Warm-starting with the previous centroids makes the refit at least as
    // good as keeping (Z, C): complete objective <= old masked objective, and
    // the new masked objective is bounded by the complete one.
    r = kmeans(x, k, km_it, &r.centroids);
    fitted = membership_matrix(r.labels) * r.centroids;

    out.labels = r.labels;
    out.iterations = it;
    out.objective_trace.push_back(masked_objective(fitted));

    if (r.labels.labels == prev) {
      out.converged = true;
      break;
    }
    const double before = out.objective_trace[out.objective_trace.size() - 2];
    const double after = out.objective_trace.back();
    if (before > 0.0 && std::abs(before - after) <= tol * before) {
      out.converged = true;
      break;
    }
    prev = r.labels.labels;
  }
  return out;
}

}  // namespace mlgc
