#include <doctest.h>

#include <stdexcept>
#include <vector>

#include "mlgc/simulator.hpp"

using namespace mlgc;

namespace {

MlsbmConfig fixed_pi_config(int n, int k, int layers, const Eigen::MatrixXd& pi, double rho,
                            std::uint64_t seed) {
  MlsbmConfig cfg;
  cfg.n = n;
  cfg.k = k;
  cfg.layers = layers;
  cfg.connectivity = ConnectivitySpec(std::vector<Eigen::MatrixXd>(layers, pi));
  cfg.rho = rho;
  cfg.seed = seed;
  return cfg;
}

}  // namespace

TEST_CASE("zero connectivity yields edgeless layers") {
  const auto inst = sample_instance(fixed_pi_config(12, 2, 3, Eigen::MatrixXd::Zero(2, 2), 1.0, 7));
  for (int l = 0; l < 3; ++l) CHECK(inst.obs.layer(l).norm() == 0.0);
}

TEST_CASE("unit connectivity with full observation yields complete graphs") {
  const int n = 10;
  const auto inst =
      sample_instance(fixed_pi_config(n, 2, 2, Eigen::MatrixXd::Ones(2, 2), 1.0, 11));
  const Eigen::MatrixXd complete =
      Eigen::MatrixXd::Ones(n, n) - Eigen::MatrixXd::Identity(n, n);
  for (int l = 0; l < 2; ++l) {
    CHECK((inst.obs.layer(l) - complete).norm() == 0.0);
    CHECK(inst.obs.mask(l).num_observed() == n);
  }
}

TEST_CASE("rho one observes every node, tiny rho almost none") {
  const auto full = sample_node_masks(50, 4, 1.0, 3);
  for (const auto& m : full) CHECK(m.num_observed() == 50);

  const auto sparse = sample_node_masks(50, 4, 1e-9, 3);
  int observed = 0;
  for (const auto& m : sparse) observed += m.num_observed();
  CHECK(observed <= 1);  // 200 draws at p=1e-9
}

TEST_CASE("sampling is deterministic in the seed") {
  const auto cfg = paper_synthetic(60, 4, 0.6, 42);
  const auto a = sample_instance(cfg);
  const auto b = sample_instance(cfg);
  CHECK(a.truth.labels == b.truth.labels);
  for (int l = 0; l < 4; ++l) {
    CHECK((a.obs.layer(l) - b.obs.layer(l)).norm() == 0.0);
    CHECK(a.obs.mask(l).present == b.obs.mask(l).present);
    CHECK((a.connectivity.layer(l) - b.connectivity.layer(l)).norm() == 0.0);
  }

  const auto c = sample_instance(paper_synthetic(60, 4, 0.6, 43));
  bool any_diff = false;
  for (int l = 0; l < 4 && !any_diff; ++l)
    any_diff = (a.obs.layer(l) - c.obs.layer(l)).norm() != 0.0;
  CHECK(any_diff);
}

TEST_CASE("sampled layers are symmetric 0/1 with zero diagonal and mask-consistent") {
  const auto inst = sample_instance(paper_synthetic(40, 3, 0.5, 9));
  for (int l = 0; l < 3; ++l) {
    const auto& a = inst.obs.layer(l);
    const auto& w = inst.obs.mask(l);
    CHECK((a - a.transpose()).norm() == 0.0);
    CHECK(a.diagonal().norm() == 0.0);
    for (int i = 0; i < 40; ++i)
      for (int j = 0; j < 40; ++j) {
        CHECK((a(i, j) == 0.0 || a(i, j) == 1.0));
        if (!w.observed(i) || !w.observed(j)) CHECK(a(i, j) == 0.0);
      }
  }
}

TEST_CASE("lowering rho with a fixed seed only removes nodes") {
  const auto lo = sample_node_masks(80, 5, 0.3, 17);
  const auto hi = sample_node_masks(80, 5, 0.8, 17);
  for (int l = 0; l < 5; ++l)
    for (int i = 0; i < 80; ++i)
      if (lo[l].observed(i)) CHECK(hi[l].observed(i));
}

TEST_CASE("per-layer draws do not depend on the total layer count") {
  const auto few = sample_node_masks(30, 2, 0.5, 21);
  const auto many = sample_node_masks(30, 6, 0.5, 21);
  for (int l = 0; l < 2; ++l) CHECK(few[l].present == many[l].present);

  auto cfg2 = paper_synthetic(30, 2, 0.7, 23);
  auto cfg6 = paper_synthetic(30, 6, 0.7, 23);
  const auto a2 = sample_instance(cfg2);
  const auto a6 = sample_instance(cfg6);
  CHECK(a2.truth.labels == a6.truth.labels);
  for (int l = 0; l < 2; ++l) {
    CHECK((a2.obs.layer(l) - a6.obs.layer(l)).norm() == 0.0);
    CHECK(a2.obs.mask(l).present == a6.obs.mask(l).present);
  }
}

TEST_CASE("recipe-drawn connectivity matrices respect the recipe bounds") {
  const auto inst = sample_instance(paper_synthetic(30, 8, 1.0, 31));
  CHECK(inst.connectivity.num_layers() == 8);
  for (int l = 0; l < 8; ++l) {
    const auto& pi = inst.connectivity.layer(l);
    CHECK(pi.rows() == 3);
    CHECK((pi - pi.transpose()).norm() == 0.0);
    for (int c = 0; c < 3; ++c) {
      CHECK(pi(c, c) >= 0.18);
      CHECK(pi(c, c) <= 0.19);
      for (int d = 0; d < 3; ++d)
        if (c != d) {
          CHECK(pi(c, d) >= 0.7 * 0.18);
          CHECK(pi(c, d) <= 0.7 * 0.19);
        }
    }
  }
}

TEST_CASE("explicit community sizes are honored") {
  MlsbmConfig cfg = fixed_pi_config(10, 3, 1, Eigen::MatrixXd::Identity(3, 3) * 0.5, 1.0, 5);
  cfg.community_sizes = {5, 3, 2};
  const auto inst = sample_instance(cfg);
  CHECK(inst.truth.community_sizes() == std::vector<int>{5, 3, 2});
}

TEST_CASE("dropping never-observed nodes rebuilds a consistent instance") {
  // rho=1: nothing to drop, identity mapping.
  const auto full = sample_instance(paper_synthetic(20, 3, 1.0, 2));
  const auto kept_all = drop_unobserved_everywhere(full.obs, &full.truth);
  CHECK(kept_all.obs.n() == 20);
  CHECK(kept_all.truth.labels == full.truth.labels);
  for (int i = 0; i < 20; ++i) CHECK(kept_all.kept[i] == i);

  // Force node 0 to be absent from every layer.
  const auto base = sample_instance(paper_synthetic(20, 3, 1.0, 4));
  std::vector<Eigen::MatrixXd> layers;
  std::vector<LayerMask> masks;
  for (int l = 0; l < 3; ++l) {
    Eigen::MatrixXd a = base.obs.layer(l);
    a.row(0).setZero();
    a.col(0).setZero();
    layers.push_back(a);
    auto w = base.obs.mask(l).present;
    w[0] = 0;
    masks.emplace_back(w);
  }
  const auto obs = MultilayerObservation::from_binary_layers(layers, masks);
  const auto dropped = drop_unobserved_everywhere(obs, &base.truth);
  CHECK(dropped.obs.n() == 19);
  REQUIRE(dropped.kept.size() == 19);
  for (int i = 0; i < 19; ++i) {
    CHECK(dropped.kept[i] == i + 1);
    CHECK(dropped.truth.labels[i] == base.truth.labels[i + 1]);
    for (int l = 0; l < 3; ++l)
      CHECK(dropped.obs.mask(l).observed(i) == obs.mask(l).observed(i + 1));
  }
  for (int l = 0; l < 3; ++l)
    for (int i = 0; i < 19; ++i)
      for (int j = 0; j < 19; ++j)
        CHECK(dropped.obs.layer(l)(i, j) == obs.layer(l)(i + 1, j + 1));

  // Oracle for the kept set on a random partially observed instance.
  const auto part = sample_instance(paper_synthetic(40, 2, 0.35, 8));
  const auto d2 = drop_unobserved_everywhere(part.obs, &part.truth);
  std::vector<int> want;
  for (int i = 0; i < 40; ++i)
    if (part.obs.observed_somewhere(i)) want.push_back(i);
  CHECK(d2.kept == want);
  CHECK(d2.obs.n() == static_cast<int>(want.size()));
}

TEST_CASE("invalid configurations are rejected") {
  MlsbmConfig cfg;
  cfg.n = 10;
  cfg.k = 3;
  CHECK_NOTHROW(cfg.validate());

  auto bad = cfg;
  bad.k = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = cfg;
  bad.k = 11;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = cfg;
  bad.rho = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = cfg;
  bad.rho = 1.5;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = cfg;
  bad.layers = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = cfg;
  bad.community_sizes = {4, 4};  // wrong sum and wrong count for k=3
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = cfg;
  bad.recipe.offdiag_factor = 8.0;  // 8 * 0.19 > 1
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = cfg;
  bad.connectivity = ConnectivitySpec({Eigen::MatrixXd::Identity(2, 2)});  // K mismatch
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("edge mask mode keeps all nodes and removes edges") {
  auto cfg = fixed_pi_config(40, 2, 2, Eigen::MatrixXd::Ones(2, 2), 0.5, 19);
  cfg.mask_mode = MaskMode::edges;
  const auto inst = sample_instance(cfg);
  int edges = 0;
  for (int l = 0; l < 2; ++l) {
    CHECK(inst.obs.mask(l).num_observed() == 40);  // node masks stay all-ones
    edges += static_cast<int>(inst.obs.layer(l).sum()) / 2;
  }
  const int possible = 2 * 40 * 39 / 2;
  CHECK(edges > static_cast<int>(0.35 * possible));  // ~rho of a complete graph survives
  CHECK(edges < static_cast<int>(0.65 * possible));

  // Lowering the edge-retention rate with a fixed seed only removes edges.
  auto cfg_lo = cfg;
  cfg_lo.rho = 0.2;
  const auto lo = sample_instance(cfg_lo);
  for (int l = 0; l < 2; ++l)
    for (int i = 0; i < 40; ++i)
      for (int j = 0; j < 40; ++j)
        if (lo.obs.layer(l)(i, j) == 1.0) CHECK(inst.obs.layer(l)(i, j) == 1.0);
}

TEST_CASE("paper_synthetic preset matches its documented shape") {
  const auto cfg = paper_synthetic(300, 10, 0.7, 1);
  CHECK(cfg.n == 300);
  CHECK(cfg.k == 3);
  CHECK(cfg.layers == 10);
  CHECK(cfg.rho == 0.7);
  CHECK(!cfg.connectivity.has_value());
  CHECK(cfg.recipe.diag_lo == 0.18);
  CHECK(cfg.recipe.diag_hi == 0.19);
  CHECK(cfg.recipe.offdiag_factor == 0.7);
}
