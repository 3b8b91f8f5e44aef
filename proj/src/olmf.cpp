#include "mlgc/olmf.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

#include <ceres/gradient_problem.h>
#include <ceres/gradient_problem_solver.h>

#include "mlgc/spectral.hpp"

namespace mlgc {

namespace {

Eigen::MatrixXd masked_rows(const Eigen::MatrixXd& q, const LayerMask& w) {
  Eigen::MatrixXd out = q;
  for (int i = 0; i < out.rows(); ++i)
    if (!w.observed(i)) out.row(i).setZero();
  return out;
}

}  // namespace

double olmf_objective_grads(const OlmfState& state, const MultilayerObservation& obs,
                            Eigen::MatrixXd* grad_q, std::vector<Eigen::MatrixXd>* grad_b) {
  const int n = obs.n();
  const int num_layers = obs.num_layers();
  const int k = static_cast<int>(state.q.cols());
  if (state.q.rows() != n || static_cast<int>(state.b.size()) != num_layers)
    throw std::invalid_argument("olmf: state shape does not match observation");
  if (grad_q) grad_q->setZero(n, k);
  if (grad_b) grad_b->assign(num_layers, Eigen::MatrixXd());

  double value = 0.0;
  for (int l = 0; l < num_layers; ++l) {
    const Eigen::MatrixXd& bl = state.b[l];
    if (bl.rows() != k || bl.cols() != k)
      throw std::invalid_argument("olmf: core matrix is not K x K");
    const Eigen::MatrixXd ql = masked_rows(state.q, obs.mask(l));
    const Eigen::MatrixXd qb = ql * bl;
    const Eigen::MatrixXd r = obs.layer(l) - qb * ql.transpose();
    value += r.squaredNorm();
    // Rows of r outside J_l vanish, so these terms already have zero
    // gradient rows for nodes unobserved in layer l.
    if (grad_q) *grad_q -= 2.0 * (r * ql * bl.transpose() + r.transpose() * qb);
    if (grad_b) (*grad_b)[l] = -2.0 * ql.transpose() * r * ql;
  }
  return value;
}

namespace {

class RelaxedObjective : public ceres::FirstOrderFunction {
 public:
  RelaxedObjective(const MultilayerObservation& obs, int k, const OlmfOptions& opts)
      : obs_(obs), n_(obs.n()), num_layers_(obs.num_layers()), k_(k), opts_(opts) {}

  int NumParameters() const override { return n_ * k_ + num_layers_ * k_ * k_; }

  bool Evaluate(const double* params, double* cost, double* gradient) const override {
    OlmfState state;
    state.q = Eigen::Map<const Eigen::MatrixXd>(params, n_, k_);
    state.b.resize(num_layers_);
    for (int l = 0; l < num_layers_; ++l)
      state.b[l] = Eigen::Map<const Eigen::MatrixXd>(params + n_ * k_ + l * k_ * k_, k_, k_);

    Eigen::MatrixXd gq;
    std::vector<Eigen::MatrixXd> gb;
    double value = olmf_objective_grads(state, obs_, gradient ? &gq : nullptr,
                                        gradient ? &gb : nullptr);
    if (opts_.orthogonality_penalty) {
      const Eigen::MatrixXd defect =
          state.q.transpose() * state.q - Eigen::MatrixXd::Identity(k_, k_);
      value += opts_.penalty_weight * defect.squaredNorm();
      if (gradient) gq += 4.0 * opts_.penalty_weight * state.q * defect;
    }
    *cost = value;
    if (gradient) {
      Eigen::Map<Eigen::MatrixXd>(gradient, n_, k_) = gq;
      for (int l = 0; l < num_layers_; ++l)
        Eigen::Map<Eigen::MatrixXd>(gradient + n_ * k_ + l * k_ * k_, k_, k_) = gb[l];
    }
    return std::isfinite(value);
  }

 private:
  const MultilayerObservation& obs_;
  int n_, num_layers_, k_;
  OlmfOptions opts_;
};

}  // namespace

OlmfResult olmfm(const MultilayerObservation& obs, int k, const OlmfOptions& opts,
                 const KmeansOptions& km) {
  const int n = obs.n();
  const int num_layers = obs.num_layers();
  if (k < 1 || k > n) throw std::invalid_argument("olmfm: need 1 <= K <= n");

  // Initialize Q from the mean-adjacency spectral subspace and each core by
  // masked least squares B = (Q_l^T Q_l)^+ Q_l^T A_l Q_l (Q_l^T Q_l)^+.
  OlmfState state;
  state.q = top_abs_eigvecs(obs.mean_adjacency(), k).vectors.coords;
  state.b.resize(num_layers);
  for (int l = 0; l < num_layers; ++l) {
    const Eigen::MatrixXd ql = masked_rows(state.q, obs.mask(l));
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> gram(
        Eigen::MatrixXd(ql.transpose() * ql));
    const Eigen::MatrixXd pinv = gram.pseudoInverse();
    state.b[l] = pinv * ql.transpose() * obs.layer(l) * ql * pinv;
  }

  const int nq = n * k;
  const int nb = k * k;
  std::vector<double> params(nq + num_layers * nb);
  Eigen::Map<Eigen::MatrixXd>(params.data(), n, k) = state.q;
  for (int l = 0; l < num_layers; ++l)
    Eigen::Map<Eigen::MatrixXd>(params.data() + nq + l * nb, k, k) = state.b[l];

  ceres::GradientProblemSolver::Options options;
  options.line_search_direction_type = ceres::LBFGS;
  options.max_num_iterations = opts.max_iterations;
  options.function_tolerance = opts.function_tolerance;
  options.gradient_tolerance = opts.gradient_tolerance;
  options.parameter_tolerance = opts.parameter_tolerance;
  options.logging_type = ceres::SILENT;
  options.minimizer_progress_to_stdout = false;

  ceres::GradientProblem problem(new RelaxedObjective(obs, k, opts));
  ceres::GradientProblemSolver::Summary summary;
  ceres::Solve(options, problem, params.data(), &summary);

  state.q = Eigen::Map<const Eigen::MatrixXd>(params.data(), n, k);
  for (int l = 0; l < num_layers; ++l)
    state.b[l] = Eigen::Map<const Eigen::MatrixXd>(params.data() + nq + l * nb, k, k);

  OlmfResult out;
  Eigen::MatrixXd gq;
  std::vector<Eigen::MatrixXd> gb;
  out.diagnostics.objective = olmf_objective_grads(state, obs, &gq, &gb);
  double grad_sq = gq.squaredNorm();
  for (const auto& g : gb) grad_sq += g.squaredNorm();
  out.diagnostics.gradient_norm = std::sqrt(grad_sq);
  out.diagnostics.orthogonality_defect =
      (state.q.transpose() * state.q - Eigen::MatrixXd::Identity(k, k)).norm();
  out.diagnostics.iterations = static_cast<int>(summary.iterations.size());
  out.diagnostics.termination = ceres::TerminationTypeToString(summary.termination_type);

  bool finite = state.q.allFinite();
  for (const auto& b : state.b) finite = finite && b.allFinite();
  if (!finite || summary.termination_type == ceres::FAILURE)
    throw std::runtime_error("olmfm: optimizer failed (" + summary.message + ")");

  if (opts.reorthonormalize) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(state.q);
    state.q = qr.householderQ() * Eigen::MatrixXd::Identity(n, k);
  }
  out.labels = kmeans(state.q, k, km).labels;
  out.state = std::move(state);
  return out;
}

}  // namespace mlgc
