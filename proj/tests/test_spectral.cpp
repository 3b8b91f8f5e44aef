#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "mlgc/partition.hpp"
#include "mlgc/rng.hpp"
#include "mlgc/spectral.hpp"

using namespace mlgc;
using mlgc::rng::SplitMix64;

namespace {

Eigen::MatrixXd random_symmetric(int n, SplitMix64& rng) {
  Eigen::MatrixXd s(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      const double v = 2.0 * rng.next_double() - 1.0;
      s(i, j) = v;
      s(j, i) = v;
    }
  return s;
}

Eigen::MatrixXd random_orthogonal(int k, SplitMix64& rng) {
  Eigen::MatrixXd g(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) g(i, j) = 2.0 * rng.next_double() - 1.0;
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(k, k);
  return q;
}

}  // namespace

TEST_CASE("top eigenpairs of a diagonal matrix, ordered by absolute value") {
  Eigen::MatrixXd s = Eigen::Vector3d(3.0, -2.0, 1.0).asDiagonal();
  const auto eig = top_abs_eigvecs(s, 2);
  CHECK(eig.values(0) == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(eig.values(1) == doctest::Approx(-2.0).epsilon(1e-14));
  // Eigenvectors are the coordinate axes, signs fixed positive.
  CHECK(eig.vectors.coords(0, 0) == doctest::Approx(1.0));
  CHECK(eig.vectors.coords(1, 1) == doctest::Approx(1.0));
  CHECK(std::abs(eig.vectors.coords(1, 0)) < 1e-14);
}

TEST_CASE("block-model embedding has constant rows within communities") {
  // Expected matrix of a 2-community block model: the top-2 eigenvector rows
  // are identical inside each community and have norm 1/sqrt(n_c) when the
  // embedding is orthonormal; for equal sizes that is 1/sqrt(n/2).
  const Partition z({0, 0, 0, 0, 1, 1, 1, 1}, 2);
  Eigen::MatrixXd pi(2, 2);
  pi << 0.9, 0.1, 0.1, 0.6;
  const Eigen::MatrixXd p = expected_matrix(z, pi);
  const auto eig = top_abs_eigvecs(p, 2);
  const auto& u = eig.vectors.coords;
  for (int i = 1; i < 4; ++i) CHECK((u.row(i) - u.row(0)).norm() < 1e-12);
  for (int i = 5; i < 8; ++i) CHECK((u.row(i) - u.row(4)).norm() < 1e-12);
  CHECK(u.row(0).norm() == doctest::Approx(1.0 / std::sqrt(4.0)).epsilon(1e-12));
  CHECK((u.row(0) - u.row(4)).norm() ==
        doctest::Approx(std::sqrt(2.0 / 4.0)).epsilon(1e-10));
  // Orthonormal columns.
  CHECK((u.transpose() * u - Eigen::MatrixXd::Identity(2, 2)).norm() < 1e-12);
}

TEST_CASE("top eigenpairs match an independent full decomposition") {
  SplitMix64 rng(0xABCDEF);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 3 + static_cast<int>(rng.below(20));
    const int k = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
    const Eigen::MatrixXd s = random_symmetric(n, rng);
    const auto eig = top_abs_eigvecs(s, k);

    // Oracle: full spectrum, re-sorted by |value| descending.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> full(s);
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      const double fa = std::abs(full.eigenvalues()(a));
      const double fb = std::abs(full.eigenvalues()(b));
      if (fa != fb) return fa > fb;
      return full.eigenvalues()(a) > full.eigenvalues()(b);
    });
    for (int j = 0; j < k; ++j)
      CHECK(eig.values(j) ==
            doctest::Approx(full.eigenvalues()(order[j])).epsilon(1e-10));

    // Residual invariant: S U = U diag(values).
    const Eigen::MatrixXd resid =
        s * eig.vectors.coords - eig.vectors.coords * eig.values.asDiagonal();
    CHECK(resid.norm() <= 1e-8 * std::max(1.0, s.norm()));

    // Subspace agreement per eigenvalue cluster (principal angles via SVD).
    int start = 0;
    while (start < k) {
      int end = start + 1;
      while (end < k && std::abs(eig.values(end) - eig.values(start)) < 1e-9) ++end;
      if (end == k && k < n &&
          std::abs(std::abs(full.eigenvalues()(order[k])) - std::abs(eig.values(start))) < 1e-9) {
        // Cluster straddles the cut; subspace comparison is ill-posed there.
        start = end;
        continue;
      }
      const Eigen::MatrixXd a = eig.vectors.coords.middleCols(start, end - start);
      Eigen::MatrixXd b(n, end - start);
      for (int j = start; j < end; ++j) b.col(j - start) = full.eigenvectors().col(order[j]);
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(a.transpose() * b);
      CHECK(svd.singularValues().minCoeff() > 1.0 - 1e-8);
      start = end;
    }
  }
}

TEST_CASE("eigenvector signs are deterministic") {
  SplitMix64 rng(77);
  const Eigen::MatrixXd s = random_symmetric(12, rng);
  const auto a = top_abs_eigvecs(s, 5);
  const auto b = top_abs_eigvecs(s, 5);
  CHECK((a.vectors.coords - b.vectors.coords).norm() == 0.0);
  for (int j = 0; j < 5; ++j) {
    int i = 0;
    while (i < 12 && std::abs(a.vectors.coords(i, j)) <= 1e-12) ++i;
    REQUIRE(i < 12);
    CHECK(a.vectors.coords(i, j) > 0.0);
  }
}

TEST_CASE("exactly degenerate spectra are handled robustly") {
  // Twice a rank-3 projector: eigenvalues are exactly {2,2,2,0,...,0}, which
  // can stall the plain iterative solver.
  std::vector<int> labels(60);
  for (int i = 0; i < 60; ++i) labels[i] = i < 24 ? 0 : (i < 44 ? 1 : 2);
  const Partition z(labels, 3);
  const Eigen::MatrixXd zm = membership_matrix(z);
  const Eigen::MatrixXd u =
      zm * (zm.transpose() * zm).diagonal().cwiseSqrt().cwiseInverse().asDiagonal();
  const Eigen::MatrixXd s = 2.0 * u * u.transpose();

  const auto eig = top_abs_eigvecs(s, 4);
  for (int j = 0; j < 3; ++j) CHECK(eig.values(j) == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(std::abs(eig.values(3)) < 1e-9);
  const Eigen::MatrixXd resid =
      s * eig.vectors.coords - eig.vectors.coords * eig.values.asDiagonal();
  CHECK(resid.norm() < 1e-7);
  CHECK((eig.vectors.coords.transpose() * eig.vectors.coords - Eigen::MatrixXd::Identity(4, 4))
            .norm() < 1e-9);
}

TEST_CASE("top_abs_eigvecs rejects bad inputs") {
  Eigen::MatrixXd asym(2, 2);
  asym << 0, 1, 0, 0;
  CHECK_THROWS_AS(top_abs_eigvecs(asym, 1), std::invalid_argument);
  CHECK_THROWS_AS(top_abs_eigvecs(Eigen::MatrixXd::Identity(3, 3), 4), std::invalid_argument);
  CHECK_THROWS_AS(top_abs_eigvecs(Eigen::MatrixXd::Identity(3, 3), 0), std::invalid_argument);
}

TEST_CASE("normalized laplacian on hand-checked graphs") {
  // Single edge: degrees 1,1 so the off-diagonal becomes 1.
  Eigen::MatrixXd edge = Eigen::MatrixXd::Zero(2, 2);
  edge(0, 1) = edge(1, 0) = 1.0;
  const Eigen::MatrixXd l_edge = normalized_laplacian(edge);
  CHECK(l_edge(0, 1) == doctest::Approx(1.0));
  CHECK(l_edge(0, 0) == 0.0);

  // Zero matrix stays zero (zero-degree convention).
  CHECK(normalized_laplacian(Eigen::MatrixXd::Zero(3, 3)).norm() == 0.0);

  // Complete graph on 4 nodes: every degree 3, off-diagonals 1/3.
  const Eigen::MatrixXd k4 =
      Eigen::MatrixXd::Ones(4, 4) - Eigen::MatrixXd::Identity(4, 4);
  const Eigen::MatrixXd l_k4 = normalized_laplacian(k4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      CHECK(l_k4(i, j) == doctest::Approx(i == j ? 0.0 : 1.0 / 3.0));

  // Isolated node: its row and column stay zero.
  Eigen::MatrixXd iso = Eigen::MatrixXd::Zero(3, 3);
  iso(0, 1) = iso(1, 0) = 1.0;
  const Eigen::MatrixXd l_iso = normalized_laplacian(iso);
  CHECK(l_iso.row(2).norm() == 0.0);
  CHECK(l_iso.col(2).norm() == 0.0);
  CHECK(l_iso(0, 1) == doctest::Approx(1.0));

  Eigen::MatrixXd neg = Eigen::MatrixXd::Zero(2, 2);
  neg(0, 1) = neg(1, 0) = -1.0;
  CHECK_THROWS_AS(normalized_laplacian(neg), std::invalid_argument);
}

TEST_CASE("procrustes alignment recovers a planted rotation") {
  SplitMix64 rng(0x5157);
  Eigen::MatrixXd b(10, 3);
  for (int i = 0; i < 10; ++i)
    for (int j = 0; j < 3; ++j) b(i, j) = 2.0 * rng.next_double() - 1.0;

  // B = A: identity, residual 0.
  const Eigen::MatrixXd o_id = procrustes_align(b, b);
  CHECK((o_id - Eigen::MatrixXd::Identity(3, 3)).norm() < 1e-12);
  CHECK(procrustes_residual(b, b) < 1e-12);

  // A = B R: exact recovery of R.
  const Eigen::MatrixXd r = random_orthogonal(3, rng);
  const Eigen::MatrixXd o = procrustes_align(b * r, b);
  CHECK((o - r).norm() < 1e-10);
  CHECK(procrustes_residual(b * r, b) < 1e-10);

  // Minimality: no random orthogonal beats the aligned residual.
  Eigen::MatrixXd a(10, 3);
  for (int i = 0; i < 10; ++i)
    for (int j = 0; j < 3; ++j) a(i, j) = 2.0 * rng.next_double() - 1.0;
  const double best = procrustes_residual(a, b);
  for (int t = 0; t < 1000; ++t) {
    const Eigen::MatrixXd q = random_orthogonal(3, rng);
    CHECK((a - b * q).norm() >= best - 1e-12);
  }
}

TEST_CASE("k-th eigenvalue of the expected matrix dominates n_min * sigma_k(pi)") {
  SplitMix64 rng(0xE16);
  for (int trial = 0; trial < 100; ++trial) {
    const int k = 2 + static_cast<int>(rng.below(3));
    const int n = 3 * k + static_cast<int>(rng.below(20));
    // Random partition with every community nonempty.
    std::vector<int> labels(n);
    for (int i = 0; i < k; ++i) labels[i] = i;
    for (int i = k; i < n; ++i) labels[i] = static_cast<int>(rng.below(k));
    const Partition z(labels, k);
    Eigen::MatrixXd pi(k, k);
    for (int i = 0; i < k; ++i)
      for (int j = i; j < k; ++j) {
        const double v = rng.next_double();
        pi(i, j) = v;
        pi(j, i) = v;
      }
    const Eigen::MatrixXd zm = membership_matrix(z);
    const Eigen::MatrixXd p = zm * pi * zm.transpose();
    const auto sizes = z.community_sizes();
    const int n_min = *std::min_element(sizes.begin(), sizes.end());

    Eigen::JacobiSVD<Eigen::MatrixXd> svd_p(p);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd_pi(pi);
    CHECK(svd_p.singularValues()(k - 1) >=
          n_min * svd_pi.singularValues()(k - 1) - 1e-8);
  }
}
