#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "fairmap/vectorspace.hpp"

namespace fairmap {

struct CoverParams {
  std::size_t n_intervals = 15;  // resolution
  double overlap = 0.4;          // gain, in [0, 1)

  // Throws InvalidArgumentError.
  void validate() const;
};

// Closed interval [lo, hi].
struct Interval {
  double lo;
  double hi;

  bool contains(double v) const noexcept { return lo <= v && v <= hi; }
  double length() const noexcept { return hi - lo; }
};

struct Cover {
  std::vector<Interval> intervals;
  CoverParams params;
  double nominal_length = 0.0;  // L before outer padding; 0 for a single padded interval
};

// Ascending record ids per interval, aligned with Cover::intervals.
struct PreimageAssignment {
  std::vector<std::vector<std::string>> per_interval;
};

// Outer-endpoint padding applied to a lens range.
double cover_padding(double range) noexcept;

// Uniform-width intervals of length L = range / (n - (n-1) g) whose left
// endpoints are spaced L (1 - g) apart. The outer endpoints are padded by
// cover_padding(range). A single padded interval is emitted when n == 1 or
// every lens value is equal. Throws EmptyInputError on an empty lens.
Cover build_uniform_cover(const LensValues& lens, const CoverParams& params);

PreimageAssignment assign_preimages(const LensValues& lens, const Cover& cover);

// Same membership rule on positional values; returns ascending indices.
std::vector<std::vector<std::size_t>> assign_preimage_indices(std::span<const double> values,
                                                              const Cover& cover);

}  // namespace fairmap
