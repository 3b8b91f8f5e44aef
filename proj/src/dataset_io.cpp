#include "mlgc/dataset_io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "mlgc/rng.hpp"

namespace mlgc {

namespace {

using nlohmann::json;

std::string edges_name(int l) { return "layer_" + std::to_string(l) + ".edges"; }
std::string nodes_name(int l) { return "layer_" + std::to_string(l) + ".nodes"; }
constexpr const char* kTruthName = "truth.labels";
constexpr const char* kManifestName = "manifest.json";

[[noreturn]] void fail_at(const std::filesystem::path& file, int line, const std::string& what) {
  throw std::runtime_error(file.string() + ":" + std::to_string(line) + ": " + what);
}

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  return out;
}

std::ifstream open_in(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  return in;
}

// Parses exactly `want` integers from a line, rejecting trailing junk.
std::vector<long> parse_ints(const std::string& line, int want,
                             const std::filesystem::path& file, int lineno) {
  std::istringstream ss(line);
  std::vector<long> out;
  long v;
  while (ss >> v) out.push_back(v);
  std::string rest;
  if (ss.fail() && !ss.eof()) fail_at(file, lineno, "expected integers, got '" + line + "'");
  if (static_cast<int>(out.size()) != want)
    fail_at(file, lineno, "expected " + std::to_string(want) + " integers, got '" + line + "'");
  return out;
}

bool is_blank(const std::string& s) {
  return s.find_first_not_of(" \t\r") == std::string::npos;
}

}  // namespace

void save_dataset(const std::filesystem::path& dir, const MultilayerObservation& obs,
                  const Partition* truth, std::optional<int> k) {
  std::filesystem::create_directories(dir);
  const int n = obs.n();
  const int num_layers = obs.num_layers();
  if (truth && truth->n() != n)
    throw std::invalid_argument("save_dataset: truth length != n");

  json manifest;
  manifest["format"] = "mlgc-dataset-v1";
  manifest["n"] = n;
  manifest["layers"] = num_layers;
  if (k) manifest["k"] = *k;
  json files = json::array();
  for (int l = 0; l < num_layers; ++l)
    files.push_back({{"edges", edges_name(l)}, {"nodes", nodes_name(l)}});
  manifest["layer_files"] = files;
  if (truth) manifest["truth"] = kTruthName;
  {
    auto out = open_out(dir / kManifestName);
    out << manifest.dump(2) << "\n";
  }

  for (int l = 0; l < num_layers; ++l) {
    auto edges = open_out(dir / edges_name(l));
    const Eigen::MatrixXd& a = obs.layer(l);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (a(i, j) != 0.0) edges << i << " " << j << "\n";
    auto nodes = open_out(dir / nodes_name(l));
    for (int i = 0; i < n; ++i)
      if (obs.mask(l).observed(i)) nodes << i << "\n";
  }

  if (truth) {
    auto out = open_out(dir / kTruthName);
    const std::vector<int> one_based = truth->to_one_based();
    for (int i = 0; i < n; ++i) out << i << " " << one_based[i] << "\n";
  }
}

Dataset load_dataset(const std::filesystem::path& dir) {
  const auto manifest_path = dir / kManifestName;
  json manifest;
  {
    auto in = open_in(manifest_path);
    try {
      in >> manifest;
    } catch (const json::exception& e) {
      throw std::runtime_error(manifest_path.string() + ": " + e.what());
    }
  }
  if (!manifest.contains("n") || !manifest.contains("layers"))
    throw std::runtime_error(manifest_path.string() + ": missing required keys n/layers");
  const int n = manifest.at("n").get<int>();
  const int num_layers = manifest.at("layers").get<int>();
  if (n < 1 || num_layers < 1)
    throw std::runtime_error(manifest_path.string() + ": n and layers must be >= 1");

  std::vector<std::string> edge_files(num_layers), node_files(num_layers);
  if (manifest.contains("layer_files")) {
    const auto& files = manifest.at("layer_files");
    if (static_cast<int>(files.size()) != num_layers)
      throw std::runtime_error(manifest_path.string() + ": layer_files length != layers");
    for (int l = 0; l < num_layers; ++l) {
      edge_files[l] = files.at(l).at("edges").get<std::string>();
      node_files[l] = files.at(l).at("nodes").get<std::string>();
    }
  } else {
    for (int l = 0; l < num_layers; ++l) {
      edge_files[l] = edges_name(l);
      node_files[l] = nodes_name(l);
    }
  }

  std::vector<Eigen::MatrixXd> layers;
  std::vector<LayerMask> masks;
  layers.reserve(num_layers);
  masks.reserve(num_layers);
  for (int l = 0; l < num_layers; ++l) {
    const auto nodes_path = dir / node_files[l];
    std::vector<std::uint8_t> present(n, 0);
    {
      auto in = open_in(nodes_path);
      std::string line;
      int lineno = 0;
      while (std::getline(in, line)) {
        ++lineno;
        if (is_blank(line)) continue;
        const long i = parse_ints(line, 1, nodes_path, lineno)[0];
        if (i < 0 || i >= n) fail_at(nodes_path, lineno, "node id out of range");
        present[i] = 1;
      }
    }
    LayerMask mask(std::move(present));

    const auto edges_path = dir / edge_files[l];
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    {
      auto in = open_in(edges_path);
      std::string line;
      int lineno = 0;
      while (std::getline(in, line)) {
        ++lineno;
        if (is_blank(line)) continue;
        const auto ij = parse_ints(line, 2, edges_path, lineno);
        const long i = ij[0], j = ij[1];
        if (i < 0 || j < 0 || i >= n || j >= n) fail_at(edges_path, lineno, "node id out of range");
        if (i == j) fail_at(edges_path, lineno, "self-loop not allowed");
        if (i > j) fail_at(edges_path, lineno, "expected i < j");
        if (!mask.observed(static_cast<int>(i)) || !mask.observed(static_cast<int>(j)))
          fail_at(edges_path, lineno,
                  "edge (" + std::to_string(i) + "," + std::to_string(j) +
                      ") touches a node absent from layer " + std::to_string(l));
        a(i, j) = 1.0;  // duplicates collapse
        a(j, i) = 1.0;
      }
    }
    layers.push_back(std::move(a));
    masks.push_back(std::move(mask));
  }

  Dataset out{MultilayerObservation::from_binary_layers(std::move(layers), std::move(masks)),
              std::nullopt, std::nullopt};
  if (manifest.contains("k") && !manifest.at("k").is_null())
    out.k = manifest.at("k").get<int>();

  std::string truth_file;
  if (manifest.contains("truth") && !manifest.at("truth").is_null())
    truth_file = manifest.at("truth").get<std::string>();
  else if (std::filesystem::exists(dir / kTruthName))
    truth_file = kTruthName;
  if (!truth_file.empty()) {
    const auto truth_path = dir / truth_file;
    std::vector<int> labels(n, 0);
    std::vector<char> seen(n, 0);
    auto in = open_in(truth_path);
    std::string line;
    int lineno = 0;
    int max_label = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (is_blank(line)) continue;
      const auto rec = parse_ints(line, 2, truth_path, lineno);
      const long i = rec[0], lab = rec[1];
      if (i < 0 || i >= n) fail_at(truth_path, lineno, "node id out of range");
      if (seen[i]) fail_at(truth_path, lineno, "duplicate label for node " + std::to_string(i));
      if (lab < 1) fail_at(truth_path, lineno, "labels are 1-based");
      seen[i] = 1;
      labels[i] = static_cast<int>(lab);
      max_label = std::max(max_label, static_cast<int>(lab));
    }
    for (int i = 0; i < n; ++i)
      if (!seen[i])
        throw std::runtime_error(truth_path.string() + ": no label for node " + std::to_string(i));
    const int k = out.k ? std::max(*out.k, max_label) : max_label;
    out.truth = Partition::from_one_based(labels, k);
  }
  return out;
}

MultilayerObservation apply_drop_rho(const MultilayerObservation& obs, double rho,
                                     std::uint64_t seed) {
  if (!(rho > 0.0 && rho <= 1.0)) throw std::invalid_argument("drop-rho must be in (0,1]");
  const int n = obs.n();
  std::vector<Eigen::MatrixXd> layers;
  std::vector<LayerMask> masks;
  for (int l = 0; l < obs.num_layers(); ++l) {
    rng::SplitMix64 gen(rng::derive(seed, rng::kStreamDrop, static_cast<std::uint64_t>(l)));
    std::vector<std::uint8_t> w(n);
    for (int i = 0; i < n; ++i)
      w[i] = (gen.next_double() < rho && obs.mask(l).observed(i)) ? 1 : 0;
    Eigen::MatrixXd a = obs.layer(l);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (!w[i] || !w[j]) a(i, j) = 0.0;
    layers.push_back(std::move(a));
    masks.emplace_back(std::move(w));
  }
  return MultilayerObservation::from_binary_layers(std::move(layers), std::move(masks));
}

}  // namespace mlgc
