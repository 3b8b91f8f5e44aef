#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>

#include "mlgc/dataset_io.hpp"
#include "mlgc/simulator.hpp"

using namespace mlgc;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("mlgc_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  return std::string(std::istreambuf_iterator<char>(in), {});
}

void append_line(const fs::path& p, const std::string& line) {
  std::ofstream out(p, std::ios::binary | std::ios::app);
  out << line << "\n";
}

}  // namespace

TEST_CASE("datasets round trip through save and load") {
  const auto inst = sample_instance(paper_synthetic(40, 3, 0.6, 77));
  const fs::path dir = fresh_dir("roundtrip");
  save_dataset(dir, inst.obs, &inst.truth, 3);

  const Dataset ds = load_dataset(dir);
  CHECK(ds.obs.n() == 40);
  CHECK(ds.obs.num_layers() == 3);
  REQUIRE(ds.k.has_value());
  CHECK(*ds.k == 3);
  REQUIRE(ds.truth.has_value());
  CHECK(ds.truth->labels == inst.truth.labels);
  CHECK(ds.truth->k == 3);
  for (int l = 0; l < 3; ++l) {
    CHECK((ds.obs.layer(l) - inst.obs.layer(l)).norm() == 0.0);
    CHECK(ds.obs.mask(l).present == inst.obs.mask(l).present);
  }

  // Re-saving the loaded dataset reproduces every file byte for byte.
  const fs::path dir2 = fresh_dir("roundtrip2");
  save_dataset(dir2, ds.obs, &*ds.truth, ds.k);
  for (const auto& entry : fs::directory_iterator(dir)) {
    const fs::path other = dir2 / entry.path().filename();
    REQUIRE(fs::exists(other));
    CHECK(slurp(entry.path()) == slurp(other));
  }
}

TEST_CASE("datasets without truth omit the labels file") {
  const auto inst = sample_instance(paper_synthetic(20, 2, 1.0, 5));
  const fs::path dir = fresh_dir("notruth");
  save_dataset(dir, inst.obs, nullptr, std::nullopt);
  CHECK(!fs::exists(dir / "truth.labels"));
  const Dataset ds = load_dataset(dir);
  CHECK(!ds.truth.has_value());
  CHECK(ds.obs.n() == 20);
}

TEST_CASE("malformed files are reported with file and line") {
  const auto inst = sample_instance(paper_synthetic(10, 1, 1.0, 3));
  const fs::path dir = fresh_dir("malformed");
  save_dataset(dir, inst.obs, &inst.truth, 3);
  append_line(dir / "layer_0.edges", "3 four");
  try {
    load_dataset(dir);
    FAIL("expected exception");
  } catch (const std::runtime_error& e) {
    const std::string what = e.what();
    CHECK(what.find("layer_0.edges") != std::string::npos);
    CHECK(what.find(":") != std::string::npos);
  }
}

TEST_CASE("edges touching a node absent from the layer are rejected") {
  const auto inst = sample_instance(paper_synthetic(10, 1, 1.0, 9));
  const fs::path dir = fresh_dir("absent");
  save_dataset(dir, inst.obs, nullptr, std::nullopt);

  // Shrink the presence list to nodes 0..4, keeping an edge into the rest.
  {
    std::ofstream nodes(dir / "layer_0.nodes", std::ios::binary | std::ios::trunc);
    for (int i = 0; i < 5; ++i) nodes << i << "\n";
  }
  std::ofstream edges(dir / "layer_0.edges", std::ios::binary | std::ios::trunc);
  edges << "1 7\n";
  edges.close();
  try {
    load_dataset(dir);
    FAIL("expected exception");
  } catch (const std::runtime_error& e) {
    const std::string what = e.what();
    CHECK(what.find("absent") != std::string::npos);
  }
}

TEST_CASE("self-loops and wrongly ordered edges are rejected") {
  const auto inst = sample_instance(paper_synthetic(10, 1, 1.0, 13));
  const fs::path dir = fresh_dir("edgeorder");
  save_dataset(dir, inst.obs, nullptr, std::nullopt);

  auto with_edge_line = [&](const std::string& line) {
    std::ofstream edges(dir / "layer_0.edges", std::ios::binary | std::ios::trunc);
    edges << line << "\n";
  };
  with_edge_line("4 4");
  CHECK_THROWS_AS(load_dataset(dir), std::runtime_error);
  with_edge_line("5 2");
  CHECK_THROWS_AS(load_dataset(dir), std::runtime_error);
  with_edge_line("0 99");
  CHECK_THROWS_AS(load_dataset(dir), std::runtime_error);
  with_edge_line("-1 3");
  CHECK_THROWS_AS(load_dataset(dir), std::runtime_error);
}

TEST_CASE("truth files must label every node exactly once") {
  const auto inst = sample_instance(paper_synthetic(10, 1, 1.0, 21));
  const fs::path dir = fresh_dir("truthdup");
  save_dataset(dir, inst.obs, &inst.truth, 3);

  // Duplicate node entry.
  append_line(dir / "truth.labels", "3 1");
  CHECK_THROWS_AS(load_dataset(dir), std::runtime_error);

  // Missing node entry.
  {
    std::ofstream truth(dir / "truth.labels", std::ios::binary | std::ios::trunc);
    for (int i = 0; i < 9; ++i) truth << i << " 1\n";
  }
  CHECK_THROWS_AS(load_dataset(dir), std::runtime_error);

  // Label outside 1..K is still loadable when it defines K itself; zero is not.
  {
    std::ofstream truth(dir / "truth.labels", std::ios::binary | std::ios::trunc);
    for (int i = 0; i < 10; ++i) truth << i << " 0\n";
  }
  CHECK_THROWS_AS(load_dataset(dir), std::runtime_error);
}

TEST_CASE("loader k is the larger of manifest k and max truth label") {
  const auto inst = sample_instance(paper_synthetic(12, 1, 1.0, 33));
  const fs::path dir = fresh_dir("kinfer");
  save_dataset(dir, inst.obs, &inst.truth, 5);
  const Dataset ds = load_dataset(dir);
  CHECK(*ds.k == 5);
  REQUIRE(ds.truth.has_value());
  CHECK(ds.truth->k == 5);
}

TEST_CASE("missing manifest is an error") {
  const fs::path dir = fresh_dir("nomanifest");
  CHECK_THROWS_AS(load_dataset(dir), std::runtime_error);
}

TEST_CASE("node dropping is deterministic and only removes nodes") {
  const auto inst = sample_instance(paper_synthetic(50, 4, 1.0, 55));
  const auto a = apply_drop_rho(inst.obs, 0.6, 17);
  const auto b = apply_drop_rho(inst.obs, 0.6, 17);
  for (int l = 0; l < 4; ++l) {
    CHECK(a.mask(l).present == b.mask(l).present);
    CHECK((a.layer(l) - b.layer(l)).norm() == 0.0);
  }

  const auto c = apply_drop_rho(inst.obs, 0.6, 18);
  bool differs = false;
  for (int l = 0; l < 4 && !differs; ++l) differs = a.mask(l).present != c.mask(l).present;
  CHECK(differs);

  int kept = 0, total = 0;
  for (int l = 0; l < 4; ++l) {
    for (int i = 0; i < 50; ++i) {
      // Subset of the original mask.
      if (a.mask(l).observed(i)) CHECK(inst.obs.mask(l).observed(i));
      kept += a.mask(l).observed(i) ? 1 : 0;
      ++total;
    }
    // Entries outside the new observed block are zeroed.
    for (int i = 0; i < 50; ++i)
      for (int j = 0; j < 50; ++j)
        if (!a.mask(l).observed(i) || !a.mask(l).observed(j))
          CHECK(a.layer(l)(i, j) == 0.0);
  }
  CHECK(kept > static_cast<int>(0.4 * total));
  CHECK(kept < static_cast<int>(0.8 * total));

  // Applying a lower retention rate with the same seed keeps a subset.
  const auto lower = apply_drop_rho(inst.obs, 0.3, 17);
  for (int l = 0; l < 4; ++l)
    for (int i = 0; i < 50; ++i)
      if (lower.mask(l).observed(i)) CHECK(a.mask(l).observed(i));
}
