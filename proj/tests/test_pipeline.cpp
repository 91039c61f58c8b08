#include <cstdlib>
#include <random>

#include "doctest.h"
#include "fairmap/errors.hpp"
#include "fairmap/fairness.hpp"
#include "fairmap/fixtures.hpp"
#include "fairmap/ingest.hpp"
#include "fairmap/kernels.hpp"
#include "fairmap/pipeline.hpp"
#include "fairmap/render.hpp"
#include "support.hpp"

using namespace fairmap;

namespace {

std::string graph_bytes(const PointCloud& cloud, const LensValues& lens, const MapperConfig& config) {
  auto result = run_mapper(cloud, lens, config);
  return to_graph_file(colorize(result.complex, lens, ColorMap::heat()));
}

}  // namespace

TEST_CASE("fixtures are reproducible") {
  CHECK(fixtures::noisy_circle(50, 0.05, 9) == fixtures::noisy_circle(50, 0.05, 9));
  CHECK_FALSE(fixtures::noisy_circle(50, 0.05, 9) == fixtures::noisy_circle(50, 0.05, 10));
  auto blobs = fixtures::two_blobs(10, 5, 4.0, 1.0, 3);
  CHECK(blobs.cloud.size() == 20);
  CHECK(blobs.labels.at("a000") == 1);
  CHECK(blobs.labels.at("b009") == -1);
  CHECK(std::abs(norm(blobs.direction) - 1.0) <= 1e-12);
}

TEST_CASE("lens keys must match the cloud") {
  auto cloud = fixtures::noisy_circle(20, 0.05, 1);
  auto lens = coordinate_lens(fixtures::noisy_circle(10, 0.05, 1), 0);
  CHECK_THROWS_AS(run_mapper(cloud, lens, {}), InvalidArgumentError);
}

TEST_CASE("circle with three intervals recovers a loop") {
  auto cloud = fixtures::noisy_circle(1000, 0.05, 42);
  MapperConfig config;
  config.cover = {3, 0.5};
  config.cluster.normalize = false;
  auto result = run_mapper(cloud, coordinate_lens(cloud, 0), config);
  CHECK(result.complex.nodes.size() == 4);
  CHECK(result.complex.edge_count() == 4);
  CHECK(betti_numbers_1skeleton(result.complex) == BettiNumbers{1, 1});
}

TEST_CASE("single interval degenerates to plain clustering") {
  auto blobs = fixtures::two_blobs(30, 8, 6.0, 1.0, 5);
  MapperConfig config;
  config.cover = {1, 0.0};
  auto result = run_mapper(blobs.cloud, project_lens(blobs.cloud, blobs.direction), config);
  CHECK(result.complex.nodes.size() >= 1);
  CHECK(result.complex.edge_count() == 0);
}

TEST_CASE("separated blobs stay separated") {
  auto blobs = fixtures::two_blobs(200, 64, 4.0, 1.0, 42);
  auto lens = project_lens(blobs.cloud, blobs.direction);
  auto result = run_mapper(blobs.cloud, lens, {});
  auto report = separation_report(result.complex, blobs.labels);
  CHECK(report.component_count == 2);
  CHECK(report.cross_edges == 0);
  for (const auto& p : report.per_component_purity) CHECK(p == 1.0);
}

TEST_CASE("output does not depend on the thread count") {
  auto blobs = fixtures::two_blobs(80, 16, 4.0, 1.0, 8);
  auto lens = project_lens(blobs.cloud, blobs.direction);
  for (auto method : {ClusterMethod::kSingleLinkageGap, ClusterMethod::kDbscan}) {
    MapperConfig config;
    config.cover = {8, 0.5};
    config.cluster.method = method;
    config.cluster.eps = 0.9;
    config.cluster.min_pts = 3;
    config.max_dim = 3;
    const std::string base = graph_bytes(blobs.cloud, lens, config);
    for (std::size_t threads : {2u, 3u, 4u, 8u}) {
      config.threads = threads;
      CHECK(graph_bytes(blobs.cloud, lens, config) == base);
    }
  }
}

TEST_CASE("output does not depend on the kernel backend") {
  auto cloud = load_precomputed(testing::data_dir() / "bundle_embeddings.txt");
  auto fd = load_direction(testing::data_dir() / "bundle_direction.json");
  auto lens = score_corpus(cloud, fd);
  MapperConfig config;
  config.cover = {6, 0.4};
  const auto before = kernels::active_backend();
  REQUIRE(kernels::set_backend(kernels::Backend::kScalar));
  const std::string base = graph_bytes(cloud, lens, config);
  for (auto b : kernels::available_backends()) {
    REQUIRE(kernels::set_backend(b));
    CHECK(graph_bytes(cloud, lens, config) == base);
  }
  kernels::set_backend(before);
}

TEST_CASE("preimages and nodes are consistent") {
  auto cloud = fixtures::noisy_circle(300, 0.05, 4);
  auto lens = coordinate_lens(cloud, 1);
  MapperConfig config;
  config.cover = {6, 0.3};
  auto result = run_mapper(cloud, lens, config);
  REQUIRE(result.preimages.size() == 6);
  std::size_t members = 0, assigned = 0;
  for (const auto& node : result.complex.nodes) members += node.size();
  for (const auto& p : result.preimages) assigned += p.size();
  CHECK(members == assigned);
  for (std::size_t i = 1; i < result.complex.nodes.size(); ++i) {
    const auto& a = result.complex.nodes[i - 1];
    const auto& b = result.complex.nodes[i];
    CHECK((a.interval_index < b.interval_index ||
           (a.interval_index == b.interval_index && a.cluster_index + 1 == b.cluster_index)));
  }
}

TEST_CASE("kernel override from the environment") {
  const char* forced = std::getenv("FAIRMAP_KERNEL");
  if (forced == nullptr || std::string(forced) != "scalar") return;
  CHECK(kernels::active_backend() == kernels::Backend::kScalar);
}
