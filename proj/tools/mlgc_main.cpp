#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mlgc/dataset_io.hpp"
#include "mlgc/experiment.hpp"
#include "mlgc/methods.hpp"
#include "mlgc/metrics.hpp"
#include "mlgc/simulator.hpp"

namespace {

using nlohmann::json;

json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
  return j;
}

int default_jobs() {
  if (const char* env = std::getenv("MLGC_JOBS")) {
    try {
      return std::max(1, std::stoi(env));
    } catch (...) {
      throw std::runtime_error("MLGC_JOBS is not an integer");
    }
  }
  return 1;
}

mlgc::MlsbmConfig mlsbm_from_json(const json& j) {
  mlgc::MlsbmConfig cfg = mlgc::paper_synthetic(300, 10, 1.0, 0);
  if (j.contains("n")) cfg.n = j.at("n").get<int>();
  if (j.contains("k")) cfg.k = j.at("k").get<int>();
  if (j.contains("layers")) cfg.layers = j.at("layers").get<int>();
  if (j.contains("rho")) cfg.rho = j.at("rho").get<double>();
  if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("community_sizes"))
    cfg.community_sizes = j.at("community_sizes").get<std::vector<int>>();
  if (j.contains("mask_mode")) {
    const std::string m = j.at("mask_mode").get<std::string>();
    if (m == "nodes") cfg.mask_mode = mlgc::MaskMode::nodes;
    else if (m == "edges") cfg.mask_mode = mlgc::MaskMode::edges;
    else throw std::runtime_error("unknown mask_mode '" + m + "'");
  }
  if (j.contains("recipe")) {
    const auto& r = j.at("recipe");
    if (r.contains("diag_lo")) cfg.recipe.diag_lo = r.at("diag_lo").get<double>();
    if (r.contains("diag_hi")) cfg.recipe.diag_hi = r.at("diag_hi").get<double>();
    if (r.contains("offdiag_factor"))
      cfg.recipe.offdiag_factor = r.at("offdiag_factor").get<double>();
  }
  if (j.contains("connectivity")) {
    std::vector<Eigen::MatrixXd> mats;
    for (const auto& layer : j.at("connectivity")) {
      const int k = static_cast<int>(layer.size());
      Eigen::MatrixXd pi(k, k);
      for (int a = 0; a < k; ++a) {
        if (static_cast<int>(layer.at(a).size()) != k)
          throw std::runtime_error("connectivity rows must be K long");
        for (int b = 0; b < k; ++b) pi(a, b) = layer.at(a).at(b).get<double>();
      }
      mats.push_back(std::move(pi));
    }
    cfg.connectivity = mlgc::ConnectivitySpec(std::move(mats));
  }
  return cfg;
}

// "node label" per line, labels 1-based, any node id order.
std::map<int, int> read_label_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::map<int, int> labels;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream ss(line);
    int node = 0, label = 0;
    if (!(ss >> node >> label))
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected 'node label'");
    std::string rest;
    if (ss >> rest)
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": trailing content");
    if (label < 1)
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": labels are 1-based");
    if (!labels.emplace(node, label).second)
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": duplicate node " +
                               std::to_string(node));
  }
  if (labels.empty()) throw std::runtime_error(path + ": no labels found");
  return labels;
}

double elapsed_ms(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration_cast<std::chrono::duration<double, std::milli>>(
             std::chrono::steady_clock::now() - since)
      .count();
}

struct GenerateArgs {
  std::string config_path, out_dir, preset = "paper-synthetic", mask_mode = "nodes";
  int n = 300, k = 3, layers = 10;
  double rho = 1.0;
  std::uint64_t seed = 0;
};

int cmd_generate(const GenerateArgs& a, const CLI::App* cmd) {
  mlgc::MlsbmConfig cfg;
  if (!a.config_path.empty()) {
    cfg = mlsbm_from_json(read_json_file(a.config_path));
  } else if (a.preset == "paper-synthetic") {
    cfg = mlgc::paper_synthetic(a.n, a.layers, a.rho, a.seed);
  } else {
    throw std::runtime_error("unknown preset '" + a.preset + "' (use paper-synthetic or --config)");
  }
  // Explicit flags override whatever the config/preset set.
  if (cmd->count("--n")) cfg.n = a.n;
  if (cmd->count("--k")) cfg.k = a.k;
  if (cmd->count("--layers")) cfg.layers = a.layers;
  if (cmd->count("--rho")) cfg.rho = a.rho;
  if (cmd->count("--seed")) cfg.seed = a.seed;
  if (cmd->count("--mask-mode")) {
    if (a.mask_mode == "nodes") cfg.mask_mode = mlgc::MaskMode::nodes;
    else if (a.mask_mode == "edges") cfg.mask_mode = mlgc::MaskMode::edges;
    else throw std::runtime_error("unknown mask mode '" + a.mask_mode + "'");
  }

  const mlgc::SampledInstance inst = mlgc::sample_instance(cfg);
  mlgc::save_dataset(a.out_dir, inst.obs, &inst.truth, cfg.k);
  std::cout << "wrote dataset: n=" << cfg.n << " K=" << cfg.k << " layers=" << cfg.layers
            << " rho=" << cfg.rho << " -> " << a.out_dir << "\n";
  return 0;
}

struct ClusterArgs {
  std::string in_dir, method, out_path, diagnostics_path;
  int k = 0, iterations = 5, kmeans_restarts = 10, olmf_max_iter = 500;
  double drop_rho = 0.0, kpod_tol = 1e-8;
  std::uint64_t seed = 0;
  bool laplacian = false, drop_unobserved = false;
};

int cmd_cluster(const ClusterArgs& a, const CLI::App* cmd) {
  const auto t_load = std::chrono::steady_clock::now();
  mlgc::Dataset ds = mlgc::load_dataset(a.in_dir);
  if (cmd->count("--drop-rho"))
    ds.obs = mlgc::apply_drop_rho(ds.obs, a.drop_rho, a.seed);

  int k = a.k;
  if (!cmd->count("--k")) {
    if (!ds.k) throw std::runtime_error("dataset manifest has no K; pass --k");
    k = *ds.k;
  }

  std::vector<int> kept(ds.obs.n());
  for (int i = 0; i < ds.obs.n(); ++i) kept[i] = i;
  if (a.drop_unobserved) {
    mlgc::DropResult dropped = mlgc::drop_unobserved_everywhere(ds.obs);
    const int removed = ds.obs.n() - dropped.obs.n();
    ds.obs = std::move(dropped.obs);
    kept = std::move(dropped.kept);
    if (removed > 0)
      std::cerr << "dropped " << removed << " node(s) observed in no layer\n";
  }
  const double load_ms = elapsed_ms(t_load);

  mlgc::MethodConfig mcfg;
  mcfg.k = k;
  mcfg.iterations = a.iterations;
  mcfg.kpod_tol = a.kpod_tol;
  mcfg.kmeans_restarts = a.kmeans_restarts;
  mcfg.olmf.max_iterations = a.olmf_max_iter;
  mcfg.laplacian = a.laplacian;
  mcfg.seed = a.seed;

  const auto t_cluster = std::chrono::steady_clock::now();
  mlgc::MethodOutput out = mlgc::run_method(a.method, ds.obs, mcfg);
  const double cluster_ms = elapsed_ms(t_cluster);

  const auto t_write = std::chrono::steady_clock::now();
  {
    std::ofstream labels(a.out_path, std::ios::binary | std::ios::trunc);
    if (!labels) throw std::runtime_error("cannot write " + a.out_path);
    const std::vector<int> one_based = out.labels.to_one_based();
    for (int i = 0; i < out.labels.n(); ++i) labels << kept[i] << " " << one_based[i] << "\n";
  }
  json diag = out.diagnostics;
  diag["input"] = a.in_dir;
  diag["retained_nodes"] = out.labels.n();
  diag["stage_ms"] = {{"load", load_ms}, {"cluster", cluster_ms}, {"write", elapsed_ms(t_write)}};
  const std::string diag_path =
      a.diagnostics_path.empty() ? a.out_path + ".diag.json" : a.diagnostics_path;
  {
    std::ofstream dout(diag_path, std::ios::binary | std::ios::trunc);
    if (!dout) throw std::runtime_error("cannot write " + diag_path);
    dout << diag.dump(2) << "\n";
  }
  std::cout << "clustered " << out.labels.n() << " nodes with " << a.method << " (K=" << k
            << ") -> " << a.out_path << "\n";
  return 0;
}

struct EvaluateArgs {
  std::string pred_path, truth_path, nmi_norm = "sqrt";
  std::vector<std::string> metrics;
};

int cmd_evaluate(const EvaluateArgs& a) {
  const auto pred = read_label_file(a.pred_path);
  const auto truth = read_label_file(a.truth_path);
  if (pred.size() != truth.size())
    throw std::runtime_error("node sets differ: " + std::to_string(pred.size()) +
                             " predicted vs " + std::to_string(truth.size()) + " truth nodes");
  for (const auto& [node, _] : pred)
    if (!truth.count(node))
      throw std::runtime_error("node sets differ: node " + std::to_string(node) +
                               " has a prediction but no truth label");

  std::vector<int> zh, zt;
  int kh = 0, kt = 0;
  for (const auto& [node, label] : pred) {
    zh.push_back(label);
    kh = std::max(kh, label);
    zt.push_back(truth.at(node));
    kt = std::max(kt, truth.at(node));
  }
  const mlgc::Partition p = mlgc::Partition::from_one_based(zh, kh);
  const mlgc::Partition t = mlgc::Partition::from_one_based(zt, kt);

  std::vector<std::string> metrics = a.metrics;
  if (metrics.empty()) metrics = {"nmi", "misclustering"};
  for (const auto& m : metrics) {
    double value = 0.0;
    if (m == "nmi") value = mlgc::nmi(p, t, mlgc::nmi_norm_from_string(a.nmi_norm));
    else if (m == "misclustering") value = mlgc::misclustering_rate(p, t);
    else throw std::runtime_error("unknown metric '" + m + "' (nmi|misclustering)");
    std::printf("%s %.4f\n", m.c_str(), value);
  }
  return 0;
}

struct ExperimentArgs {
  std::string config_path, out_dir, nmi_norm;
  std::vector<double> rhos;
  std::vector<int> layers, ns;
  int trials = 0, jobs = 0;
  std::uint64_t seed = 0;
  bool plot = false;
};

int cmd_experiment(const ExperimentArgs& a, const CLI::App* cmd) {
  mlgc::ExperimentConfig cfg;
  if (!a.config_path.empty())
    cfg = mlgc::experiment_config_from_json(read_json_file(a.config_path));
  cfg.jobs = default_jobs();
  if (cmd->count("--rho")) cfg.rhos = a.rhos;
  if (cmd->count("--layers")) cfg.layer_counts = a.layers;
  if (cmd->count("--n")) cfg.ns = a.ns;
  if (cmd->count("--trials")) cfg.trials = a.trials;
  if (cmd->count("--seed")) cfg.seed = a.seed;
  if (cmd->count("--jobs")) cfg.jobs = a.jobs;
  if (cmd->count("--out")) cfg.out_dir = a.out_dir;
  if (cmd->count("--nmi-norm")) cfg.nmi_norm = mlgc::nmi_norm_from_string(a.nmi_norm);
  if (cmd->count("--plot")) cfg.plot = a.plot;

  const int fresh = mlgc::run_experiment(cfg);
  std::cout << "computed " << fresh << " new result rows -> " << cfg.out_dir << "/results.csv\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multilayer graph clustering with missing nodes"};
  app.require_subcommand(1);

  GenerateArgs gen;
  CLI::App* generate = app.add_subcommand("generate", "Sample a dataset to a directory");
  generate->add_option("--config", gen.config_path, "Model config JSON");
  generate->add_option("--preset", gen.preset, "Named preset (paper-synthetic)");
  generate->add_option("--n", gen.n, "Node count");
  generate->add_option("--k", gen.k, "Community count");
  generate->add_option("--layers", gen.layers, "Layer count");
  generate->add_option("--rho", gen.rho, "Observation probability in (0,1]");
  generate->add_option("--seed", gen.seed, "Base seed");
  generate->add_option("--mask-mode", gen.mask_mode, "nodes|edges");
  generate->add_option("--out", gen.out_dir, "Output directory")->required();

  ClusterArgs clu;
  CLI::App* cluster = app.add_subcommand("cluster", "Cluster a dataset with one method");
  cluster->add_option("--in", clu.in_dir, "Dataset directory")->required();
  cluster->add_option("--method", clu.method, "sum-adj0|sum-adj-iter|k-pod|olmfm|aggr-kern")
      ->required();
  cluster->add_option("--k", clu.k, "Community count (default: manifest)");
  cluster->add_option("--iterations", clu.iterations, "Imputation rounds (sum-adj-iter)");
  cluster->add_option("--kmeans-restarts", clu.kmeans_restarts, "k-means restarts");
  cluster->add_option("--olmf-max-iter", clu.olmf_max_iter, "Optimizer iteration cap (olmfm)");
  cluster->add_option("--kpod-tol", clu.kpod_tol, "Relative objective tolerance (k-pod)");
  cluster->add_option("--drop-rho", clu.drop_rho, "Remove nodes per layer with prob 1-rho first");
  cluster->add_option("--seed", clu.seed, "Seed (k-means, --drop-rho)");
  cluster->add_flag("--laplacian", clu.laplacian, "Use the normalized Laplacian (sum-adj0)");
  cluster->add_flag("--drop-unobserved", clu.drop_unobserved,
                    "Remove nodes observed in no layer before clustering");
  cluster->add_option("--out", clu.out_path, "Labels output file")->required();
  cluster->add_option("--diagnostics", clu.diagnostics_path,
                      "Diagnostics JSON path (default: <out>.diag.json)");

  EvaluateArgs ev;
  CLI::App* evaluate = app.add_subcommand("evaluate", "Compare two label files");
  evaluate->add_option("--pred", ev.pred_path, "Predicted labels file")->required();
  evaluate->add_option("--truth", ev.truth_path, "Ground-truth labels file")->required();
  evaluate->add_option("--metric", ev.metrics, "nmi|misclustering (repeatable; default both)");
  evaluate->add_option("--nmi-norm", ev.nmi_norm, "sqrt|max|arith");

  ExperimentArgs ex;
  CLI::App* experiment = app.add_subcommand("experiment", "Run a Monte-Carlo sweep");
  experiment->add_option("--config", ex.config_path, "Experiment config JSON");
  experiment->add_option("--rho", ex.rhos, "Rho axis values")->delimiter(',');
  experiment->add_option("--layers", ex.layers, "Layer-count axis values")->delimiter(',');
  experiment->add_option("--n", ex.ns, "Node-count axis values")->delimiter(',');
  experiment->add_option("--trials", ex.trials, "Monte-Carlo trials per cell");
  experiment->add_option("--seed", ex.seed, "Base seed");
  experiment->add_option("--jobs", ex.jobs, "Worker threads (default: MLGC_JOBS or 1)");
  experiment->add_option("--out", ex.out_dir, "Output directory");
  experiment->add_option("--nmi-norm", ex.nmi_norm, "sqrt|max|arith");
  experiment->add_flag("--plot", ex.plot, "Write SVG plots of mean NMI per swept axis");

  CLI11_PARSE(app, argc, argv);

  try {
    if (generate->parsed()) return cmd_generate(gen, generate);
    if (cluster->parsed()) return cmd_cluster(clu, cluster);
    if (evaluate->parsed()) return cmd_evaluate(ev);
    if (experiment->parsed()) return cmd_experiment(ex, experiment);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
