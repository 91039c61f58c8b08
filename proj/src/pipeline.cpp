#include "fairmap/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <ranges>
#include <thread>

#include "fairmap/errors.hpp"

namespace fairmap {

std::size_t default_thread_count() noexcept {
  return std::max(1u, std::thread::hardware_concurrency());
}

MapperResult run_mapper(const PointCloud& cloud, const LensValues& lens, const MapperConfig& config) {
  config.cover.validate();
  config.cluster.validate();
  if (!std::ranges::equal(lens.ids(), cloud.ids())) {
    throw InvalidArgumentError("lens keys do not match the point cloud ids");
  }
  MapperResult result;
  result.cover = build_uniform_cover(lens, config.cover);
  result.preimages = assign_preimage_indices(lens.values(), result.cover);

  const PointCloud normalized = config.cluster.normalize ? normalized_rows(cloud) : PointCloud{};
  const PointCloud& prepared = config.cluster.normalize ? normalized : cloud;

  const std::size_t n_intervals = result.preimages.size();
  std::vector<std::vector<std::vector<std::size_t>>> clusters(n_intervals);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t k = next.fetch_add(1); k < n_intervals; k = next.fetch_add(1)) {
      try {
        clusters[k] = cluster_rows(prepared, result.preimages[k], config.cluster);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::clamp<std::size_t>(config.threads, 1, std::max<std::size_t>(1, n_intervals));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  result.complex = build_nerve_indexed(clusters, cloud.ids(), config.max_dim, std::max<std::size_t>(1, config.threads));
  attach_mean_lens(result.complex, lens);
  return result;
}

}  // namespace fairmap
