#include "mlgc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace mlgc {

ConfusionTable::ConfusionTable(const Partition& zhat, const Partition& z) {
  if (zhat.n() != z.n()) throw std::invalid_argument("confusion table: partition lengths differ");
  const int k = std::max(zhat.k, z.k);
  counts = Eigen::MatrixXi::Zero(k, k);
  for (int i = 0; i < z.n(); ++i) ++counts(zhat.labels[i], z.labels[i]);
}

namespace {

// Max over bijections sigma of sum_b counts(sigma(b), b): the number of
// nodes a best relabeling keeps in agreement.
long best_agreement_brute(const Eigen::MatrixXi& counts) {
  const int k = static_cast<int>(counts.rows());
  std::vector<int> perm(k);
  std::iota(perm.begin(), perm.end(), 0);
  long best = 0;
  do {
    long s = 0;
    for (int b = 0; b < k; ++b) s += counts(perm[b], b);
    best = std::max(best, s);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

// Kuhn-Munkres with potentials, O(k^3), minimizing total cost.
// Returns the minimum cost of a perfect matching of rows to columns.
double hungarian_min_cost(const Eigen::MatrixXd& cost) {
  const int k = static_cast<int>(cost.rows());
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(k + 1, 0.0), v(k + 1, 0.0);
  std::vector<int> match(k + 1, 0), way(k + 1, 0);  // match[j] = row assigned to column j
  for (int i = 1; i <= k; ++i) {
    match[0] = i;
    int j0 = 0;
    std::vector<double> minv(k + 1, inf);
    std::vector<char> used(k + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = match[j0];
      int j1 = -1;
      double delta = inf;
      for (int j = 1; j <= k; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= k; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const int j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0);
  }
  double total = 0.0;
  for (int j = 1; j <= k; ++j) total += cost(match[j] - 1, j - 1);
  return total;
}

long best_agreement_hungarian(const Eigen::MatrixXi& counts) {
  // Maximize agreement = minimize (max_entry - counts).
  const double top = static_cast<double>(counts.maxCoeff());
  const Eigen::MatrixXd cost =
      Eigen::MatrixXd::Constant(counts.rows(), counts.cols(), top) - counts.cast<double>();
  const double mincost = hungarian_min_cost(cost);
  return std::lround(top * static_cast<double>(counts.rows()) - mincost);
}

double rate_from_agreement(long agreement, int n) {
  return static_cast<double>(n - agreement) / static_cast<double>(n);
}

void check_nonempty(const Partition& zhat, const Partition& z) {
  if (zhat.n() != z.n()) throw std::invalid_argument("metric: partition lengths differ");
  if (z.n() == 0) throw std::invalid_argument("metric: empty partitions");
}

}  // namespace

double misclustering_rate_brute(const Partition& zhat, const Partition& z) {
  check_nonempty(zhat, z);
  return rate_from_agreement(best_agreement_brute(ConfusionTable(zhat, z).counts), z.n());
}

double misclustering_rate_hungarian(const Partition& zhat, const Partition& z) {
  check_nonempty(zhat, z);
  return rate_from_agreement(best_agreement_hungarian(ConfusionTable(zhat, z).counts), z.n());
}

double misclustering_rate(const Partition& zhat, const Partition& z) {
  check_nonempty(zhat, z);
  const ConfusionTable table(zhat, z);
  const long agreement = table.counts.rows() <= 8 ? best_agreement_brute(table.counts)
                                                  : best_agreement_hungarian(table.counts);
  return rate_from_agreement(agreement, z.n());
}

NmiNorm nmi_norm_from_string(const std::string& name) {
  if (name == "sqrt") return NmiNorm::sqrt;
  if (name == "max") return NmiNorm::max;
  if (name == "arith") return NmiNorm::arith;
  throw std::invalid_argument("unknown NMI normalization '" + name + "' (expected sqrt|max|arith)");
}

std::string to_string(NmiNorm norm) {
  switch (norm) {
    case NmiNorm::sqrt: return "sqrt";
    case NmiNorm::max: return "max";
    case NmiNorm::arith: return "arith";
  }
  return "sqrt";
}

double nmi(const Partition& zhat, const Partition& z, NmiNorm norm) {
  check_nonempty(zhat, z);
  const ConfusionTable table(zhat, z);
  const int k = static_cast<int>(table.counts.rows());
  const double n = static_cast<double>(z.n());

  const Eigen::VectorXi row_sum = table.counts.rowwise().sum();
  const Eigen::VectorXi col_sum = table.counts.colwise().sum();

  auto entropy = [&](const Eigen::VectorXi& marg) {
    double h = 0.0;
    for (int a = 0; a < k; ++a) {
      if (marg(a) == 0) continue;
      const double p = marg(a) / n;
      h -= p * std::log(p);
    }
    return h;
  };
  const double ha = entropy(row_sum), hb = entropy(col_sum);
  if (ha == 0.0 && hb == 0.0) return 1.0;
  if (ha == 0.0 || hb == 0.0) return 0.0;

  double mi = 0.0;
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b) {
      const int c = table.counts(a, b);
      if (c == 0) continue;
      mi += (c / n) * std::log(c * n / (static_cast<double>(row_sum(a)) * col_sum(b)));
    }

  double denom = 0.0;
  switch (norm) {
    case NmiNorm::sqrt: denom = std::sqrt(ha * hb); break;
    case NmiNorm::max: denom = std::max(ha, hb); break;
    case NmiNorm::arith: denom = (ha + hb) / 2.0; break;
  }
  return std::clamp(mi / denom, 0.0, 1.0);
}

}  // namespace mlgc
