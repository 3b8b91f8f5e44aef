#include "mlgc/methods.hpp"

#include <algorithm>
#include <chrono>
#include <stdexcept>

#include "mlgc/rng.hpp"
#include "mlgc/spectral.hpp"

namespace mlgc {

Partition sum_adj0(const MultilayerObservation& obs, int k, bool laplacian,
                   const KmeansOptions& km) {
  Eigen::MatrixXd a = obs.mean_adjacency();
  if (laplacian) a = normalized_laplacian(a);
  const EigResult e = top_abs_eigvecs(a, k);
  return kmeans(e.vectors.coords, k, km).labels;
}

Eigen::MatrixXd estimate_connectivity(const Partition& zhat, const Eigen::MatrixXd& a) {
  zhat.validate();
  if (a.rows() != zhat.n() || a.cols() != zhat.n())
    throw std::invalid_argument("estimate_connectivity: matrix size != partition length");
  const std::vector<int> sizes = zhat.community_sizes();
  for (int c = 0; c < zhat.k; ++c)
    if (sizes[c] == 0)
      throw std::invalid_argument("estimate_connectivity: community " + std::to_string(c + 1) +
                                  " is empty");
  const Eigen::MatrixXd z = membership_matrix(zhat);
  const Eigen::MatrixXd block = z.transpose() * a * z;
  Eigen::MatrixXd pi(zhat.k, zhat.k);
  for (int c = 0; c < zhat.k; ++c)
    for (int d = 0; d < zhat.k; ++d)
      pi(c, d) = block(c, d) / (static_cast<double>(sizes[c]) * sizes[d]);
  return pi;
}

Partition sum_adj_iter(const MultilayerObservation& obs, int k, int t, const KmeansOptions& km) {
  if (t < 0) throw std::invalid_argument("sum_adj_iter: iteration count must be >= 0");
  const int n = obs.n();
  const int num_layers = obs.num_layers();

  std::vector<Eigen::MatrixXd> layers;
  layers.reserve(num_layers);
  for (int l = 0; l < num_layers; ++l) layers.push_back(obs.layer(l));

  auto mean_of = [&]() {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (const auto& a : layers) m += a;
    return Eigen::MatrixXd(m / static_cast<double>(num_layers));
  };

  EigResult e = top_abs_eigvecs(mean_of(), k);
  // Connectivity carried over per block when a community comes up empty;
  // such blocks are never read by the imputation (no node maps to them).
  std::vector<Eigen::MatrixXd> carry(num_layers, Eigen::MatrixXd::Zero(k, k));

  for (int it = 0; it < t; ++it) {
    KmeansOptions km_it = km;
    km_it.seed = rng::derive(km.seed, rng::kStreamIter, static_cast<std::uint64_t>(it));
    const Partition z = kmeans(e.vectors.coords, k, km_it).labels;
    const std::vector<int> sizes = z.community_sizes();
    const Eigen::MatrixXd zm = membership_matrix(z);

    for (int l = 0; l < num_layers; ++l) {
      const Eigen::MatrixXd block = zm.transpose() * layers[l] * zm;
      Eigen::MatrixXd pi(k, k);
      for (int c = 0; c < k; ++c)
        for (int d = 0; d < k; ++d)
          pi(c, d) = (sizes[c] > 0 && sizes[d] > 0)
                         ? block(c, d) / (static_cast<double>(sizes[c]) * sizes[d])
                         : carry[l](c, d);
      carry[l] = pi;

      const LayerMask& w = obs.mask(l);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          if (!w.observed(i) || !w.observed(j))
            layers[l](i, j) = std::clamp(pi(z.labels[i], z.labels[j]), 0.0, 1.0);
    }
    e = top_abs_eigvecs(mean_of(), k);
  }
  return kmeans(e.vectors.coords, k, km).labels;
}

Eigen::MatrixXd layer_embedding(const MultilayerObservation& obs, int l, int k) {
  auto [idx, sub] = restrict_to_observed(obs, l);
  const int m = static_cast<int>(idx.size());
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(obs.n(), k);
  if (m == 0) return out;
  const int kk = std::min(k, m);
  const EigResult e = top_abs_eigvecs(sub, kk);
  for (int r = 0; r < m; ++r) out.row(idx[r]).head(kk) = e.vectors.coords.row(r);
  return out;
}

Partition aggr_kern(const MultilayerObservation& obs, int k, const KmeansOptions& km) {
  const int n = obs.n();
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(n, n);
  for (int l = 0; l < obs.num_layers(); ++l) {
    const Eigen::MatrixXd u = layer_embedding(obs, l, k);
    s += u * u.transpose();
  }
  const EigResult e = top_abs_eigvecs(s, k);
  return kmeans(e.vectors.coords, k, km).labels;
}

const std::vector<std::string>& method_ids() {
  static const std::vector<std::string> ids = {"sum-adj0", "sum-adj-iter", "k-pod", "olmfm",
                                               "aggr-kern"};
  return ids;
}

MethodOutput run_method(const std::string& id, const MultilayerObservation& obs,
                        const MethodConfig& cfg) {
  if (cfg.k < 1) throw std::invalid_argument("method: K must be >= 1");
  if (cfg.laplacian && id != "sum-adj0")
    throw std::invalid_argument("--laplacian is only valid with method sum-adj0");
  const KmeansOptions km = cfg.kmeans_options();

  MethodOutput out;
  out.diagnostics["method"] = id;
  out.diagnostics["k"] = cfg.k;
  out.diagnostics["seed"] = cfg.seed;

  const auto t0 = std::chrono::steady_clock::now();
  if (id == "sum-adj0") {
    out.labels = sum_adj0(obs, cfg.k, cfg.laplacian, km);
    out.diagnostics["laplacian"] = cfg.laplacian;
  } else if (id == "sum-adj-iter") {
    out.labels = sum_adj_iter(obs, cfg.k, cfg.iterations, km);
    out.diagnostics["iterations"] = cfg.iterations;
  } else if (id == "k-pod") {
    KpodResult r = kpod(obs, cfg.k, cfg.kpod_max_iter, cfg.kpod_tol, km);
    out.labels = std::move(r.labels);
    out.diagnostics["iterations"] = r.iterations;
    out.diagnostics["converged"] = r.converged;
    out.diagnostics["masked_objective"] = r.objective_trace.back();
  } else if (id == "olmfm") {
    OlmfResult r = olmfm(obs, cfg.k, cfg.olmf, km);
    out.labels = std::move(r.labels);
    out.diagnostics["objective"] = r.diagnostics.objective;
    out.diagnostics["gradient_norm"] = r.diagnostics.gradient_norm;
    out.diagnostics["orthogonality_defect"] = r.diagnostics.orthogonality_defect;
    out.diagnostics["optimizer_iterations"] = r.diagnostics.iterations;
    out.diagnostics["termination"] = r.diagnostics.termination;
  } else if (id == "aggr-kern") {
    out.labels = aggr_kern(obs, cfg.k, km);
  } else {
    std::string known;
    for (const auto& m : method_ids()) known += (known.empty() ? "" : ", ") + m;
    throw std::invalid_argument("unknown method '" + id + "' (known: " + known + ")");
  }
  const auto t1 = std::chrono::steady_clock::now();
  out.diagnostics["wall_ms"] =
      std::chrono::duration_cast<std::chrono::duration<double, std::milli>>(t1 - t0).count();
  return out;
}

}  // namespace mlgc
