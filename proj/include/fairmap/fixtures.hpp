#pragma once

#include <cstddef>
#include <cstdint>

#include "fairmap/nerve.hpp"
#include "fairmap/vectorspace.hpp"

namespace fairmap::fixtures {

// `n` points at uniform random angles on the unit circle plus isotropic
// Gaussian noise. Ids are "c0000", "c0001", ...
PointCloud noisy_circle(std::size_t n, double sigma, std::uint64_t seed);

struct TwoBlobs {
  PointCloud cloud;
  LabelMap labels;   // +1 for blob "a", -1 for blob "b"
  Vector direction;  // unit axis joining the blob centers
};

// Two isotropic Gaussian blobs of standard deviation `sigma` centered at
// +/- separation * sigma along a random unit direction. Ids are "a000"... and
// "b000"...
TwoBlobs two_blobs(std::size_t per_blob, std::size_t dim, double separation, double sigma,
                   std::uint64_t seed);

}  // namespace fairmap::fixtures
