#include "fairmap/fixtures.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <string>

namespace fairmap::fixtures {
namespace {

std::string padded(char prefix, std::size_t i, int width) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%c%0*zu", prefix, width, i);
  return buf;
}

}  // namespace

PointCloud noisy_circle(std::size_t n, double sigma, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  std::normal_distribution<double> noise(0.0, sigma);
  std::vector<std::pair<std::string, Vector>> rows;
  rows.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = angle(rng);
    const double x = std::cos(t) + noise(rng);
    const double y = std::sin(t) + noise(rng);
    rows.emplace_back(padded('c', i, 4), Vector{x, y});
  }
  return PointCloud::from_records(2, std::move(rows));
}

TwoBlobs two_blobs(std::size_t per_blob, std::size_t dim, double separation, double sigma,
                   std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> unit(0.0, 1.0);
  std::vector<double> axis(dim);
  double n2 = 0.0;
  do {
    n2 = 0.0;
    for (double& x : axis) {
      x = unit(rng);
      n2 += x * x;
    }
  } while (n2 == 0.0);
  const double len = std::sqrt(n2);
  for (double& x : axis) x /= len;

  TwoBlobs out;
  out.direction = Vector(axis);
  std::vector<std::pair<std::string, Vector>> rows;
  rows.reserve(2 * per_blob);
  for (int blob = 0; blob < 2; ++blob) {
    const double sign = blob == 0 ? 1.0 : -1.0;
    const char prefix = blob == 0 ? 'a' : 'b';
    for (std::size_t i = 0; i < per_blob; ++i) {
      std::vector<double> p(dim);
      for (std::size_t k = 0; k < dim; ++k) p[k] = sign * separation * sigma * axis[k] + sigma * unit(rng);
      auto id = padded(prefix, i, 3);
      out.labels.emplace(id, blob == 0 ? 1 : -1);
      rows.emplace_back(std::move(id), Vector(std::move(p)));
    }
  }
  out.cloud = PointCloud::from_records(dim, std::move(rows));
  return out;
}

}  // namespace fairmap::fixtures
