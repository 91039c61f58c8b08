#pragma once

#include <cstddef>
#include <vector>

#include "fairmap/clustering.hpp"
#include "fairmap/cover.hpp"
#include "fairmap/nerve.hpp"
#include "fairmap/vectorspace.hpp"

namespace fairmap {

struct MapperConfig {
  CoverParams cover;
  ClusterParams cluster;
  std::size_t max_dim = 1;
  std::size_t threads = 1;  // workers for per-interval clustering and nerve counting
};

struct MapperResult {
  Cover cover;
  std::vector<std::vector<std::size_t>> preimages;  // cloud row indices per interval
  SimplicialComplex complex;                        // mean_lens attached
};

// Cover the lens image, cluster every preimage in the ambient space and take
// the nerve. `lens` must be keyed by exactly the cloud's ids. The result does
// not depend on config.threads.
MapperResult run_mapper(const PointCloud& cloud, const LensValues& lens, const MapperConfig& config);

// Hardware concurrency, at least 1.
std::size_t default_thread_count() noexcept;

}  // namespace fairmap
