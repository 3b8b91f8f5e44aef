#include "mlgc/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <tuple>

#include "mlgc/rng.hpp"

namespace mlgc {

namespace {

using nlohmann::json;

constexpr const char* kResultsHeader = "# mlgc-results-v1";
constexpr const char* kResultsColumns = "method,n,k,layers,rho,trial,metric,value,status";
constexpr const char* kAggHeader = "# mlgc-results-agg-v1";
constexpr const char* kAggColumns = "method,n,k,layers,rho,metric,trials,mean,std";
constexpr const char* kTimingsHeader = "# mlgc-timings-v1 (wall times; informational, not deterministic)";
constexpr const char* kTimingsColumns = "method,n,k,layers,rho,trial,wall_ms";

// Shortest round-tripping decimal form, so equal doubles always print the
// same bytes.
std::string fmt(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) return "nan";
  return std::string(buf, end);
}

std::string sanitize(std::string s) {
  for (char& c : s)
    if (c == ',' || c == '\n' || c == '\r') c = ' ';
  return s;
}

struct TrialRow {
  std::string method;
  int n = 0, k = 0, layers = 0;
  double rho = 1.0;
  int trial = 0;
  std::string metric;
  double value = std::numeric_limits<double>::quiet_NaN();
  std::string status = "ok";
};

std::string row_key(const TrialRow& r) {
  return r.method + "|" + std::to_string(r.n) + "|" + std::to_string(r.layers) + "|" + fmt(r.rho) +
         "|" + std::to_string(r.trial) + "|" + r.metric;
}

std::vector<TrialRow> read_existing_rows(const std::filesystem::path& path) {
  std::vector<TrialRow> rows;
  std::ifstream in(path, std::ios::binary);
  if (!in) return rows;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#' || line == kResultsColumns) continue;
    std::istringstream ss(line);
    TrialRow r;
    std::string field;
    auto next = [&](const char* what) {
      if (!std::getline(ss, field, ','))
        throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                                 ": missing field " + what);
      return field;
    };
    r.method = next("method");
    r.n = std::stoi(next("n"));
    r.k = std::stoi(next("k"));
    r.layers = std::stoi(next("layers"));
    r.rho = std::stod(next("rho"));
    r.trial = std::stoi(next("trial"));
    r.metric = next("metric");
    const std::string value = next("value");
    r.value = value.empty() ? std::numeric_limits<double>::quiet_NaN() : std::stod(value);
    std::getline(ss, r.status);
    rows.push_back(std::move(r));
  }
  return rows;
}

int index_or_end(const std::vector<std::string>& v, const std::string& s) {
  const auto it = std::find(v.begin(), v.end(), s);
  return static_cast<int>(it - v.begin());
}

// Simple fixed palette for the SVG lines.
const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

void write_svg_plot(const std::filesystem::path& path, const std::string& axis_label,
                    const std::vector<double>& xs,
                    const std::vector<std::pair<std::string, std::vector<double>>>& series) {
  const double w = 640, h = 420, ml = 60, mr = 150, mt = 20, mb = 50;
  const double pw = w - ml - mr, ph = h - mt - mb;
  const double xmin = xs.front(), xmax = xs.back();
  const double span = xmax > xmin ? xmax - xmin : 1.0;
  auto sx = [&](double x) { return ml + (x - xmin) / span * pw; };
  auto sy = [&](double y) { return mt + (1.0 - std::clamp(y, 0.0, 1.0)) * ph; };

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  // Axes and ticks.
  out << "<line x1=\"" << ml << "\" y1=\"" << mt + ph << "\" x2=\"" << ml + pw << "\" y2=\""
      << mt + ph << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << mt + ph
      << "\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 5; ++t) {
    const double y = t / 5.0;
    out << "<line x1=\"" << ml - 4 << "\" y1=\"" << sy(y) << "\" x2=\"" << ml << "\" y2=\""
        << sy(y) << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << ml - 8 << "\" y=\"" << sy(y) + 4
        << "\" text-anchor=\"end\">" << fmt(y) << "</text>\n";
  }
  for (double x : xs) {
    out << "<line x1=\"" << sx(x) << "\" y1=\"" << mt + ph << "\" x2=\"" << sx(x) << "\" y2=\""
        << mt + ph + 4 << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << sx(x) << "\" y=\"" << mt + ph + 18
        << "\" text-anchor=\"middle\">" << fmt(x) << "</text>\n";
  }
  out << "<text x=\"" << ml + pw / 2 << "\" y=\"" << h - 12
      << "\" text-anchor=\"middle\">" << axis_label << "</text>\n";
  out << "<text x=\"16\" y=\"" << mt + ph / 2
      << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " << mt + ph / 2
      << ")\">mean nmi</text>\n";
  // Series.
  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = kPalette[s % (sizeof(kPalette) / sizeof(kPalette[0]))];
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < xs.size(); ++i)
      out << sx(xs[i]) << "," << sy(series[s].second[i]) << " ";
    out << "\"/>\n";
    for (std::size_t i = 0; i < xs.size(); ++i)
      out << "<circle cx=\"" << sx(xs[i]) << "\" cy=\"" << sy(series[s].second[i])
          << "\" r=\"3\" fill=\"" << color << "\"/>\n";
    const double ly = mt + 16 + 18 * static_cast<double>(s);
    out << "<line x1=\"" << ml + pw + 10 << "\" y1=\"" << ly - 4 << "\" x2=\"" << ml + pw + 34
        << "\" y2=\"" << ly - 4 << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << ml + pw + 40 << "\" y=\"" << ly << "\">" << series[s].first
        << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace

void ExperimentConfig::validate() const {
  if (preset != "paper-synthetic" && preset != "custom")
    throw std::invalid_argument("experiment: unknown preset '" + preset + "'");
  if (ns.empty() || layer_counts.empty() || rhos.empty())
    throw std::invalid_argument("experiment: every axis needs at least one value");
  if (methods.empty()) throw std::invalid_argument("experiment: no methods listed");
  for (const auto& m : methods)
    if (std::find(method_ids().begin(), method_ids().end(), m) == method_ids().end())
      throw std::invalid_argument("experiment: unknown method '" + m + "'");
  if (trials < 1) throw std::invalid_argument("experiment: trials must be >= 1");
  if (metrics.empty()) throw std::invalid_argument("experiment: no metrics listed");
  for (const auto& m : metrics)
    if (m != "nmi" && m != "misclustering")
      throw std::invalid_argument("experiment: unknown metric '" + m + "'");
  for (double r : rhos)
    if (!(r > 0.0 && r <= 1.0)) throw std::invalid_argument("experiment: rho must be in (0,1]");
  if (k < 1) throw std::invalid_argument("experiment: K must be >= 1");
  if (jobs < 1) throw std::invalid_argument("experiment: jobs must be >= 1");
  if (out_dir.empty()) throw std::invalid_argument("experiment: output directory not set");
}

ExperimentConfig experiment_config_from_json(const json& j) {
  ExperimentConfig cfg;
  if (j.contains("preset")) cfg.preset = j.at("preset").get<std::string>();
  if (j.contains("k")) cfg.k = j.at("k").get<int>();
  if (j.contains("community_sizes"))
    cfg.community_sizes = j.at("community_sizes").get<std::vector<int>>();
  if (j.contains("recipe")) {
    const auto& r = j.at("recipe");
    if (r.contains("diag_lo")) cfg.recipe.diag_lo = r.at("diag_lo").get<double>();
    if (r.contains("diag_hi")) cfg.recipe.diag_hi = r.at("diag_hi").get<double>();
    if (r.contains("offdiag_factor"))
      cfg.recipe.offdiag_factor = r.at("offdiag_factor").get<double>();
  }
  if (j.contains("mask_mode")) {
    const std::string m = j.at("mask_mode").get<std::string>();
    if (m == "nodes") cfg.mask_mode = MaskMode::nodes;
    else if (m == "edges") cfg.mask_mode = MaskMode::edges;
    else throw std::invalid_argument("experiment: unknown mask_mode '" + m + "'");
  }
  auto int_list = [&](const char* key, std::vector<int>& out) {
    if (!j.contains(key)) return;
    if (j.at(key).is_array()) out = j.at(key).get<std::vector<int>>();
    else out = {j.at(key).get<int>()};
  };
  int_list("n", cfg.ns);
  int_list("layers", cfg.layer_counts);
  if (j.contains("rho")) {
    if (j.at("rho").is_array()) cfg.rhos = j.at("rho").get<std::vector<double>>();
    else cfg.rhos = {j.at("rho").get<double>()};
  }
  if (j.contains("methods")) cfg.methods = j.at("methods").get<std::vector<std::string>>();
  if (j.contains("trials")) cfg.trials = j.at("trials").get<int>();
  if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("metrics")) cfg.metrics = j.at("metrics").get<std::vector<std::string>>();
  if (j.contains("nmi_norm")) cfg.nmi_norm = nmi_norm_from_string(j.at("nmi_norm").get<std::string>());
  if (j.contains("drop_unobserved")) cfg.drop_unobserved = j.at("drop_unobserved").get<bool>();
  if (j.contains("out")) cfg.out_dir = j.at("out").get<std::string>();
  if (j.contains("plot")) cfg.plot = j.at("plot").get<bool>();
  if (j.contains("method_options")) {
    const auto& m = j.at("method_options");
    if (m.contains("iterations")) cfg.method_base.iterations = m.at("iterations").get<int>();
    if (m.contains("kpod_max_iter")) cfg.method_base.kpod_max_iter = m.at("kpod_max_iter").get<int>();
    if (m.contains("kpod_tol")) cfg.method_base.kpod_tol = m.at("kpod_tol").get<double>();
    if (m.contains("laplacian")) cfg.method_base.laplacian = m.at("laplacian").get<bool>();
    if (m.contains("kmeans_restarts"))
      cfg.method_base.kmeans_restarts = m.at("kmeans_restarts").get<int>();
    if (m.contains("kmeans_max_iter"))
      cfg.method_base.kmeans_max_iter = m.at("kmeans_max_iter").get<int>();
    if (m.contains("olmf_max_iterations"))
      cfg.method_base.olmf.max_iterations = m.at("olmf_max_iterations").get<int>();
    if (m.contains("olmf_gradient_tolerance"))
      cfg.method_base.olmf.gradient_tolerance = m.at("olmf_gradient_tolerance").get<double>();
  }
  return cfg;
}

namespace {

struct Task {
  int n = 0, layers = 0, trial = 0;
  double rho = 1.0;
};

struct TaskOutput {
  std::vector<TrialRow> rows;
  std::vector<std::pair<TrialRow, double>> timings;  // key fields + wall_ms
};

std::uint64_t instance_seed(std::uint64_t base, int n, int trial) {
  // Deliberately independent of rho and the layer count so those sweeps are
  // paired: rho only thresholds the mask uniforms and layer streams are
  // derived per layer index.
  return rng::derive(rng::derive(base, rng::kStreamTrial, static_cast<std::uint64_t>(trial)),
                     0x6EULL, static_cast<std::uint64_t>(n));
}

TaskOutput run_task(const ExperimentConfig& cfg, const Task& task,
                    const std::set<std::string>& done) {
  TaskOutput out;
  MlsbmConfig mc;
  if (cfg.preset == "paper-synthetic") {
    mc = paper_synthetic(task.n, task.layers, task.rho, 0);
  } else {
    mc.n = task.n;
    mc.k = cfg.k;
    mc.layers = task.layers;
    mc.rho = task.rho;
    mc.community_sizes = cfg.community_sizes;
    mc.recipe = cfg.recipe;
    mc.mask_mode = cfg.mask_mode;
  }
  mc.seed = instance_seed(cfg.seed, task.n, task.trial);

  auto make_row = [&](const std::string& method, const std::string& metric) {
    TrialRow r;
    r.method = method;
    r.n = task.n;
    r.k = mc.k;
    r.layers = task.layers;
    r.rho = task.rho;
    r.trial = task.trial;
    r.metric = metric;
    return r;
  };

  std::vector<std::string> pending;
  for (const auto& method : cfg.methods) {
    bool missing = false;
    for (const auto& metric : cfg.metrics)
      missing = missing || !done.count(row_key(make_row(method, metric)));
    if (missing) pending.push_back(method);
  }
  if (pending.empty()) return out;

  SampledInstance inst = sample_instance(mc);
  const MultilayerObservation* obs = &inst.obs;
  const Partition* truth = &inst.truth;
  DropResult dropped;
  if (cfg.drop_unobserved) {
    dropped = drop_unobserved_everywhere(inst.obs, &inst.truth);
    obs = &dropped.obs;
    truth = &dropped.truth;
  }

  for (const auto& method : pending) {
    MethodConfig mcfg = cfg.method_base;
    mcfg.k = mc.k;
    mcfg.seed = mc.seed;
    try {
      MethodOutput res = run_method(method, *obs, mcfg);
      for (const auto& metric : cfg.metrics) {
        TrialRow r = make_row(method, metric);
        r.value = metric == "nmi" ? nmi(res.labels, *truth, cfg.nmi_norm)
                                  : misclustering_rate(res.labels, *truth);
        out.rows.push_back(std::move(r));
      }
      out.timings.emplace_back(make_row(method, ""), res.diagnostics.at("wall_ms").get<double>());
    } catch (const std::exception& e) {
      for (const auto& metric : cfg.metrics) {
        TrialRow r = make_row(method, metric);
        r.status = "error: " + sanitize(e.what());
        out.rows.push_back(std::move(r));
      }
    }
  }
  return out;
}

}  // namespace

int run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const std::filesystem::path dir(cfg.out_dir);
  std::filesystem::create_directories(dir);
  const auto results_path = dir / "results.csv";

  std::vector<TrialRow> rows = read_existing_rows(results_path);
  std::set<std::string> done;
  for (const auto& r : rows) done.insert(row_key(r));

  std::vector<Task> tasks;
  for (int n : cfg.ns)
    for (int layers : cfg.layer_counts)
      for (double rho : cfg.rhos)
        for (int trial = 0; trial < cfg.trials; ++trial)
          tasks.push_back(Task{n, layers, trial, rho});

  std::vector<TaskOutput> outputs(tasks.size());
  std::atomic<std::size_t> cursor{0};
  std::atomic<bool> failed{false};
  std::string failure;
  std::mutex failure_mutex;
  auto worker = [&]() {
    for (;;) {
      const std::size_t i = cursor.fetch_add(1);
      if (i >= tasks.size() || failed.load()) break;
      try {
        outputs[i] = run_task(cfg, tasks[i], done);
      } catch (const std::exception& e) {
        // Method errors become rows; anything else (sampler/config) aborts.
        std::lock_guard<std::mutex> lock(failure_mutex);
        failure = e.what();
        failed.store(true);
      }
    }
  };
  const int jobs = std::max(1, std::min<int>(cfg.jobs, static_cast<int>(tasks.size())));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failed.load()) throw std::runtime_error("experiment: " + failure);

  int fresh = 0;
  for (const auto& o : outputs) {
    for (const auto& r : o.rows) {
      if (done.insert(row_key(r)).second) {
        rows.push_back(r);
        ++fresh;
      }
    }
  }

  // One canonical order no matter what mix of resumed and fresh rows we have.
  auto order = [&](const TrialRow& a, const TrialRow& b) {
    if (a.n != b.n) return a.n < b.n;
    if (a.layers != b.layers) return a.layers < b.layers;
    if (a.rho != b.rho) return a.rho < b.rho;
    if (a.trial != b.trial) return a.trial < b.trial;
    const int ma = index_or_end(cfg.methods, a.method), mb = index_or_end(cfg.methods, b.method);
    if (ma != mb) return ma < mb;
    if (a.method != b.method) return a.method < b.method;
    const int ka = index_or_end(cfg.metrics, a.metric), kb = index_or_end(cfg.metrics, b.metric);
    if (ka != kb) return ka < kb;
    return a.metric < b.metric;
  };
  std::sort(rows.begin(), rows.end(), order);

  {
    std::ofstream out(results_path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + results_path.string());
    out << kResultsHeader << "\n" << kResultsColumns << "\n";
    for (const auto& r : rows) {
      out << r.method << "," << r.n << "," << r.k << "," << r.layers << "," << fmt(r.rho) << ","
          << r.trial << "," << r.metric << "," << (std::isnan(r.value) ? "" : fmt(r.value)) << ","
          << r.status << "\n";
    }
  }

  // Aggregates, recomputed from the trial rows.
  struct Agg {
    TrialRow proto;
    std::vector<double> values;
  };
  std::vector<Agg> aggs;
  std::map<std::string, std::size_t> agg_index;
  for (const auto& r : rows) {
    if (r.status != "ok") continue;
    const std::string key = r.method + "|" + std::to_string(r.n) + "|" +
                            std::to_string(r.layers) + "|" + fmt(r.rho) + "|" + r.metric;
    auto it = agg_index.find(key);
    if (it == agg_index.end()) {
      it = agg_index.emplace(key, aggs.size()).first;
      aggs.push_back(Agg{r, {}});
    }
    aggs[it->second].values.push_back(r.value);
  }
  {
    const auto agg_path = dir / "results_agg.csv";
    std::ofstream out(agg_path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + agg_path.string());
    out << kAggHeader << "\n" << kAggColumns << "\n";
    for (const auto& a : aggs) {
      const auto& v = a.values;
      const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
      double var = 0.0;
      for (double x : v) var += (x - mean) * (x - mean);
      const double sd = v.size() > 1 ? std::sqrt(var / static_cast<double>(v.size() - 1)) : 0.0;
      out << a.proto.method << "," << a.proto.n << "," << a.proto.k << "," << a.proto.layers << ","
          << fmt(a.proto.rho) << "," << a.proto.metric << "," << v.size() << "," << fmt(mean)
          << "," << fmt(sd) << "\n";
    }
  }

  {
    const auto timings_path = dir / "timings.csv";
    std::ofstream out(timings_path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + timings_path.string());
    out << kTimingsHeader << "\n" << kTimingsColumns << "\n";
    for (const auto& o : outputs)
      for (const auto& [r, ms] : o.timings)
        out << r.method << "," << r.n << "," << r.k << "," << r.layers << "," << fmt(r.rho) << ","
            << r.trial << "," << fmt(ms) << "\n";
  }

  if (cfg.plot && std::find(cfg.metrics.begin(), cfg.metrics.end(), "nmi") != cfg.metrics.end()) {
    auto mean_at = [&](const std::string& method, int n, int layers, double rho) {
      double sum = 0.0;
      int count = 0;
      for (const auto& a : aggs)
        if (a.proto.method == method && a.proto.n == n && a.proto.layers == layers &&
            a.proto.rho == rho && a.proto.metric == "nmi") {
          for (double v : a.values) sum += v, ++count;
        }
      return count > 0 ? sum / count : std::numeric_limits<double>::quiet_NaN();
    };
    auto emit = [&](const std::string& axis, const std::vector<double>& xs,
                    auto point_of) {
      if (xs.size() < 2) return;
      std::vector<std::pair<std::string, std::vector<double>>> series;
      for (const auto& method : cfg.methods) {
        std::vector<double> ys;
        for (double x : xs) {
          const auto [n, layers, rho] = point_of(x);
          ys.push_back(mean_at(method, n, layers, rho));
        }
        series.emplace_back(method, std::move(ys));
      }
      write_svg_plot(dir / ("plot_nmi_vs_" + axis + ".svg"), axis, xs, series);
    };
    // Unswept axes pinned to their first listed value.
    emit("rho", cfg.rhos, [&](double x) {
      return std::tuple<int, int, double>(cfg.ns.front(), cfg.layer_counts.front(), x);
    });
    {
      std::vector<double> xs(cfg.layer_counts.begin(), cfg.layer_counts.end());
      emit("layers", xs, [&](double x) {
        return std::tuple<int, int, double>(cfg.ns.front(), static_cast<int>(x), cfg.rhos.front());
      });
    }
    {
      std::vector<double> xs(cfg.ns.begin(), cfg.ns.end());
      emit("n", xs, [&](double x) {
        return std::tuple<int, int, double>(static_cast<int>(x), cfg.layer_counts.front(),
                                            cfg.rhos.front());
      });
    }
  }
  return fresh;
}

}  // namespace mlgc
