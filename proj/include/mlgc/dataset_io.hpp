#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>

#include "mlgc/observation.hpp"
#include "mlgc/partition.hpp"

namespace mlgc {

struct Dataset {
  MultilayerObservation obs;
  std::optional<Partition> truth;
  std::optional<int> k;  // from the manifest, when recorded
};

// Writes manifest.json, layer_<l>.edges (0-based "i j" per line, i < j),
// layer_<l>.nodes (one observed id per line) and, when truth is given,
// truth.labels ("node label" with 1-based labels). Output is byte-stable:
// rows are emitted in ascending order.
void save_dataset(const std::filesystem::path& dir, const MultilayerObservation& obs,
                  const Partition* truth, std::optional<int> k);

// Parses a dataset directory back. Malformed lines raise errors carrying the
// file name and line number; edges touching a node absent from that layer's
// presence list are rejected.
Dataset load_dataset(const std::filesystem::path& dir);

// Bernoulli(rho) node removal per layer on top of the existing masks,
// zeroing the affected entries. Deterministic under (rho, seed).
MultilayerObservation apply_drop_rho(const MultilayerObservation& obs, double rho,
                                     std::uint64_t seed);

}  // namespace mlgc
