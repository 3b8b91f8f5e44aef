#include "mlgc/simulator.hpp"

#include <stdexcept>
#include <string>

#include "mlgc/rng.hpp"

namespace mlgc {

void MlsbmConfig::validate() const {
  if (n < 1) throw std::invalid_argument("config: n must be >= 1");
  if (k < 1 || k > n) throw std::invalid_argument("config: need 1 <= K <= n");
  if (layers < 1) throw std::invalid_argument("config: need at least one layer");
  if (!(rho > 0.0 && rho <= 1.0)) throw std::invalid_argument("config: rho must be in (0,1]");
  if (!community_sizes.empty()) {
    if (static_cast<int>(community_sizes.size()) != k)
      throw std::invalid_argument("config: community_sizes length != K");
    int total = 0;
    for (int s : community_sizes) {
      if (s < 1) throw std::invalid_argument("config: every community size must be >= 1");
      total += s;
    }
    if (total != n) throw std::invalid_argument("config: community sizes must sum to n");
  }
  if (connectivity) {
    if (connectivity->k() != k) throw std::invalid_argument("config: connectivity K mismatch");
    if (connectivity->num_layers() != layers)
      throw std::invalid_argument("config: connectivity layer count mismatch");
  } else {
    const auto& r = recipe;
    if (!(0.0 <= r.diag_lo && r.diag_lo <= r.diag_hi && r.diag_hi <= 1.0))
      throw std::invalid_argument("config: recipe diagonal range must satisfy 0 <= lo <= hi <= 1");
    if (r.offdiag_factor < 0.0 || r.offdiag_factor * r.diag_hi > 1.0)
      throw std::invalid_argument("config: recipe off-diagonal factor out of range");
  }
}

namespace {

Partition sample_partition(const MlsbmConfig& cfg) {
  std::vector<int> labels(cfg.n);
  if (!cfg.community_sizes.empty()) {
    int pos = 0;
    for (int c = 0; c < cfg.k; ++c)
      for (int s = 0; s < cfg.community_sizes[c]; ++s) labels[pos++] = c;
    return Partition(std::move(labels), cfg.k);
  }
  rng::SplitMix64 gen(rng::derive(cfg.seed, rng::kStreamPartition));
  constexpr int kMaxRetries = 1000;
  for (int attempt = 0; attempt < kMaxRetries; ++attempt) {
    std::vector<int> counts(cfg.k, 0);
    for (int i = 0; i < cfg.n; ++i) {
      labels[i] = static_cast<int>(gen.below(static_cast<std::uint64_t>(cfg.k)));
      ++counts[labels[i]];
    }
    bool ok = true;
    for (int c : counts) ok = ok && (c > 0);
    if (ok) return Partition(std::move(labels), cfg.k);
  }
  throw std::runtime_error("sample_instance: could not draw a partition with K nonempty communities");
}

ConnectivitySpec sample_connectivity(const MlsbmConfig& cfg) {
  if (cfg.connectivity) return *cfg.connectivity;
  std::vector<Eigen::MatrixXd> pis;
  pis.reserve(cfg.layers);
  const auto& r = cfg.recipe;
  const double span = r.diag_hi - r.diag_lo;
  for (int l = 0; l < cfg.layers; ++l) {
    rng::SplitMix64 gen(rng::derive(cfg.seed, rng::kStreamConnectivity, static_cast<std::uint64_t>(l)));
    Eigen::MatrixXd pi(cfg.k, cfg.k);
    for (int a = 0; a < cfg.k; ++a)
      for (int b = a; b < cfg.k; ++b) {
        const double u = r.diag_lo + span * gen.next_double();
        const double v = (a == b) ? u : r.offdiag_factor * u;
        pi(a, b) = v;
        pi(b, a) = v;
      }
    pis.push_back(std::move(pi));
  }
  return ConnectivitySpec(std::move(pis));
}

}  // namespace

std::vector<LayerMask> sample_node_masks(int n, int layers, double rho, std::uint64_t seed) {
  if (!(rho > 0.0 && rho <= 1.0)) throw std::invalid_argument("sample_node_masks: rho must be in (0,1]");
  std::vector<LayerMask> masks;
  masks.reserve(layers);
  for (int l = 0; l < layers; ++l) {
    rng::SplitMix64 gen(rng::derive(seed, rng::kStreamNodeMask, static_cast<std::uint64_t>(l)));
    std::vector<std::uint8_t> w(n);
    for (int i = 0; i < n; ++i) w[i] = gen.next_double() < rho ? 1 : 0;
    masks.emplace_back(std::move(w));
  }
  return masks;
}

SampledInstance sample_instance(const MlsbmConfig& cfg) {
  cfg.validate();
  Partition truth = sample_partition(cfg);
  ConnectivitySpec conn = sample_connectivity(cfg);

  std::vector<LayerMask> masks = cfg.mask_mode == MaskMode::nodes
                                     ? sample_node_masks(cfg.n, cfg.layers, cfg.rho, cfg.seed)
                                     : std::vector<LayerMask>(cfg.layers, LayerMask::all_ones(cfg.n));

  std::vector<Eigen::MatrixXd> layers;
  layers.reserve(cfg.layers);
  for (int l = 0; l < cfg.layers; ++l) {
    const Eigen::MatrixXd& pi = conn.layer(l);
    rng::SplitMix64 edges(rng::derive(cfg.seed, rng::kStreamAdjacency, static_cast<std::uint64_t>(l)));
    rng::SplitMix64 emask(rng::derive(cfg.seed, rng::kStreamEdgeMask, static_cast<std::uint64_t>(l)));
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(cfg.n, cfg.n);
    for (int i = 0; i < cfg.n; ++i)
      for (int j = i + 1; j < cfg.n; ++j) {
        // Draw the edge and (in edge mode) its observation indicator
        // unconditionally so the stream position never depends on outcomes.
        const double u = edges.next_double();
        double v = u < pi(truth.labels[i], truth.labels[j]) ? 1.0 : 0.0;
        if (cfg.mask_mode == MaskMode::edges) {
          if (!(emask.next_double() < cfg.rho)) v = 0.0;
        } else if (!masks[l].observed(i) || !masks[l].observed(j)) {
          v = 0.0;
        }
        a(i, j) = v;
        a(j, i) = v;
      }
    layers.push_back(std::move(a));
  }
  return SampledInstance{std::move(truth), std::move(conn),
                         MultilayerObservation::from_binary_layers(std::move(layers), std::move(masks))};
}

DropResult drop_unobserved_everywhere(const MultilayerObservation& obs, const Partition* truth) {
  const int n = obs.n();
  if (truth && truth->n() != n)
    throw std::invalid_argument("drop_unobserved_everywhere: truth length != n");
  std::vector<int> kept;
  kept.reserve(n);
  for (int i = 0; i < n; ++i)
    if (obs.observed_somewhere(i)) kept.push_back(i);
  const int m = static_cast<int>(kept.size());

  std::vector<Eigen::MatrixXd> layers;
  std::vector<LayerMask> masks;
  layers.reserve(obs.num_layers());
  masks.reserve(obs.num_layers());
  for (int l = 0; l < obs.num_layers(); ++l) {
    const Eigen::MatrixXd& a = obs.layer(l);
    Eigen::MatrixXd sub(m, m);
    std::vector<std::uint8_t> w(m);
    for (int r = 0; r < m; ++r) {
      w[r] = obs.mask(l).observed(kept[r]) ? 1 : 0;
      for (int c = 0; c < m; ++c) sub(r, c) = a(kept[r], kept[c]);
    }
    layers.push_back(std::move(sub));
    masks.emplace_back(std::move(w));
  }

  Partition new_truth;
  if (truth) {
    std::vector<int> labels(m);
    for (int r = 0; r < m; ++r) labels[r] = truth->labels[kept[r]];
    new_truth = Partition(std::move(labels), truth->k);
  }
  return DropResult{MultilayerObservation::from_binary_layers(std::move(layers), std::move(masks)),
                    std::move(new_truth), std::move(kept)};
}

MlsbmConfig paper_synthetic(int n, int layers, double rho, std::uint64_t seed) {
  MlsbmConfig cfg;
  cfg.n = n;
  cfg.k = 3;
  cfg.layers = layers;
  cfg.rho = rho;
  cfg.seed = seed;
  cfg.recipe = ConnectivityRecipe{0.18, 0.19, 0.7};
  return cfg;
}

}  // namespace mlgc
