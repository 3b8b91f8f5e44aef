#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "mlgc/methods.hpp"
#include "mlgc/metrics.hpp"
#include "mlgc/simulator.hpp"

namespace mlgc {

// A full factorial Monte-Carlo sweep: axes (n, layers, rho) x methods x
// trials. Within a cell, trial t of every method shares one sampled instance;
// the instance seed does not depend on rho or the layer count, so sweeps
// along those axes are paired.
struct ExperimentConfig {
  std::string preset = "paper-synthetic";  // "paper-synthetic" | "custom"

  // Custom-model fields ("custom" preset). K is also used by the methods.
  int k = 3;
  std::vector<int> community_sizes;          // empty -> multinomial uniform
  ConnectivityRecipe recipe{0.18, 0.19, 0.7};
  MaskMode mask_mode = MaskMode::nodes;

  // Sweep axes.
  std::vector<int> ns{300};
  std::vector<int> layer_counts{10};
  std::vector<double> rhos{1.0};

  std::vector<std::string> methods{"sum-adj0"};
  MethodConfig method_base;                  // k/seed overridden per trial
  int trials = 20;
  std::uint64_t seed = 0;
  std::vector<std::string> metrics{"nmi"};   // "nmi" | "misclustering"
  NmiNorm nmi_norm = NmiNorm::sqrt;
  bool drop_unobserved = true;               // remove never-observed nodes first
  std::string out_dir = "results";
  int jobs = 1;
  bool plot = false;

  void validate() const;
};

ExperimentConfig experiment_config_from_json(const nlohmann::json& j);

// Runs the sweep and writes results.csv (row per trial), results_agg.csv
// (mean/std per cell), timings.csv (wall times; not deterministic) and, with
// plot=true, SVG line charts of mean NMI against each swept axis. Existing
// rows in results.csv are kept and their work skipped; the files are
// rewritten in one canonical order either way, so a finished sweep produces
// byte-identical CSVs on every rerun. Returns the number of rows computed by
// this call.
int run_experiment(const ExperimentConfig& cfg);

}  // namespace mlgc
