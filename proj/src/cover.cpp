#include "fairmap/cover.hpp"

#include <algorithm>
#include <cmath>

#include "fairmap/errors.hpp"

namespace fairmap {

void CoverParams::validate() const {
  if (n_intervals < 1) throw InvalidArgumentError("cover needs at least one interval");
  if (!(overlap >= 0.0 && overlap < 1.0)) {
    throw InvalidArgumentError("cover overlap must lie in [0, 1)");
  }
}

double cover_padding(double range) noexcept { return 1e-9 * std::max(1.0, std::abs(range)); }

Cover build_uniform_cover(const LensValues& lens, const CoverParams& params) {
  params.validate();
  if (lens.empty()) throw EmptyInputError("cannot build a cover of an empty lens");
  const double lo = lens.min();
  const double hi = lens.max();
  const double range = hi - lo;
  const double eps = cover_padding(range);

  Cover cover;
  cover.params = params;
  if (params.n_intervals == 1 || range == 0.0) {
    cover.intervals.push_back({lo - eps, hi + eps});
    return cover;
  }

  const auto n = static_cast<double>(params.n_intervals);
  const double g = params.overlap;
  const double length = range / (n - (n - 1.0) * g);
  const double step = length * (1.0 - g);
  cover.nominal_length = length;
  cover.intervals.reserve(params.n_intervals);
  for (std::size_t k = 0; k < params.n_intervals; ++k) {
    const double start = lo + static_cast<double>(k) * step;
    cover.intervals.push_back({start, start + length});
  }
  // In exact arithmetic hi_k - lo_{k+1} = g L >= 0; rounding must not open a hole.
  for (std::size_t k = 0; k + 1 < cover.intervals.size(); ++k) {
    cover.intervals[k].hi = std::max(cover.intervals[k].hi, cover.intervals[k + 1].lo);
  }
  cover.intervals.front().lo = lo - eps;
  cover.intervals.back().hi = hi + eps;
  return cover;
}

std::vector<std::vector<std::size_t>> assign_preimage_indices(std::span<const double> values,
                                                              const Cover& cover) {
  std::vector<std::vector<std::size_t>> out(cover.intervals.size());
  for (std::size_t k = 0; k < cover.intervals.size(); ++k) {
    const Interval& iv = cover.intervals[k];
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (iv.contains(values[i])) out[k].push_back(i);
    }
  }
  return out;
}

PreimageAssignment assign_preimages(const LensValues& lens, const Cover& cover) {
  const auto indices = assign_preimage_indices(lens.values(), cover);
  PreimageAssignment out;
  out.per_interval.resize(indices.size());
  for (std::size_t k = 0; k < indices.size(); ++k) {
    out.per_interval[k].reserve(indices[k].size());
    for (std::size_t i : indices[k]) out.per_interval[k].push_back(lens.ids()[i]);
  }
  return out;
}

}  // namespace fairmap
