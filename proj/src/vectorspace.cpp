#include "fairmap/vectorspace.hpp"

#include <algorithm>
#include <cmath>

#include "fairmap/errors.hpp"

namespace fairmap {
namespace {

void require_finite(std::span<const double> values) {
  for (double x : values) {
    if (!std::isfinite(x)) throw InvalidArgumentError("vector contains a non-finite value");
  }
}

void require_same_dim(std::size_t a, std::size_t b) {
  if (a != b) {
    throw DimensionError("dimension mismatch: " + std::to_string(a) + " vs " + std::to_string(b));
  }
}

}  // namespace

Vector::Vector(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw InvalidArgumentError("vector must have positive dimension");
  require_finite(values_);
}

Vector Vector::zeros(std::size_t dim) { return Vector(std::vector<double>(dim, 0.0)); }

Vector Vector::operator-() const {
  std::vector<double> out(values_.size());
  std::transform(values_.begin(), values_.end(), out.begin(), [](double x) { return -x; });
  return Vector(std::move(out));
}

double norm(std::span<const double> v) noexcept { return std::sqrt(kernels::squared_norm(v)); }

PointCloud PointCloud::from_records(std::size_t dim,
                                    std::vector<std::pair<std::string, Vector>> records) {
  std::sort(records.begin(), records.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  PointCloud cloud(dim);
  cloud.ids_.reserve(records.size());
  cloud.data_.reserve(records.size() * dim);
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (!cloud.ids_.empty() && records[i].first == cloud.ids_.back()) {
      throw InvalidArgumentError("duplicate record id '" + records[i].first + "'");
    }
    if (records[i].second.dim() != dim) {
      throw DimensionError("record '" + records[i].first + "' has dimension " +
                           std::to_string(records[i].second.dim()) + ", expected " +
                           std::to_string(dim));
    }
    cloud.ids_.push_back(std::move(records[i].first));
    const auto values = records[i].second.values();
    cloud.data_.insert(cloud.data_.end(), values.begin(), values.end());
  }
  return cloud;
}

void PointCloud::insert(std::string id, const Vector& v) {
  if (v.dim() != dim_) {
    throw DimensionError("record '" + id + "' has dimension " + std::to_string(v.dim()) +
                         ", expected " + std::to_string(dim_));
  }
  const auto pos = std::lower_bound(ids_.begin(), ids_.end(), id);
  if (pos != ids_.end() && *pos == id) throw InvalidArgumentError("duplicate record id '" + id + "'");
  const auto row = static_cast<std::size_t>(pos - ids_.begin());
  ids_.insert(pos, std::move(id));
  data_.insert(data_.begin() + static_cast<std::ptrdiff_t>(row * dim_), v.values().begin(),
               v.values().end());
}

Vector PointCloud::vector(std::size_t row) const {
  const auto r = this->row(row);
  return Vector(std::vector<double>(r.begin(), r.end()));
}

std::optional<std::size_t> PointCloud::index_of(std::string_view id) const noexcept {
  const auto pos = std::lower_bound(ids_.begin(), ids_.end(), id);
  if (pos == ids_.end() || *pos != id) return std::nullopt;
  return static_cast<std::size_t>(pos - ids_.begin());
}

std::span<const double> PointCloud::at(std::string_view id) const {
  const auto idx = index_of(id);
  if (!idx) throw UnknownRecordError("unknown record id '" + std::string(id) + "'");
  return row(*idx);
}

LensValues::LensValues(std::vector<std::string> ids, std::vector<double> values)
    : ids_(std::move(ids)), values_(std::move(values)) {
  if (ids_.size() != values_.size()) throw InvalidArgumentError("lens ids and values differ in length");
  for (std::size_t i = 1; i < ids_.size(); ++i) {
    if (!(ids_[i - 1] < ids_[i])) throw InvalidArgumentError("lens ids must be strictly ascending");
  }
  require_finite(values_);
}

std::optional<double> LensValues::find(std::string_view id) const noexcept {
  const auto pos = std::lower_bound(ids_.begin(), ids_.end(), id);
  if (pos == ids_.end() || *pos != id) return std::nullopt;
  return values_[static_cast<std::size_t>(pos - ids_.begin())];
}

double LensValues::at(std::string_view id) const {
  if (auto v = find(id)) return *v;
  throw UnknownRecordError("no lens value for record '" + std::string(id) + "'");
}

double LensValues::min() const {
  if (empty()) throw EmptyInputError("lens is empty");
  return *std::min_element(values_.begin(), values_.end());
}

double LensValues::max() const {
  if (empty()) throw EmptyInputError("lens is empty");
  return *std::max_element(values_.begin(), values_.end());
}

double cosine_from_parts(double dot, double sqnorm_a, double sqnorm_b) noexcept {
  const double c = dot / (std::sqrt(sqnorm_a) * std::sqrt(sqnorm_b));
  return std::clamp(c, -1.0, 1.0);
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  require_same_dim(a.size(), b.size());
  const double aa = kernels::squared_norm(a);
  const double bb = kernels::squared_norm(b);
  if (aa == 0.0 || bb == 0.0) throw DegenerateVectorError("cosine similarity of a zero vector");
  return cosine_from_parts(kernels::dot(a, b), aa, bb);
}

Vector l2_normalize(const Vector& v) {
  const double n = norm(v);
  if (n == 0.0) throw DegenerateVectorError("cannot normalize a zero vector");
  std::vector<double> out(v.values().begin(), v.values().end());
  for (double& x : out) x /= n;
  return Vector(std::move(out));
}

Vector linear_combination(std::span<const WeightedVector> terms) {
  if (terms.empty()) throw EmptyInputError("linear combination of no terms");
  const std::size_t dim = terms.front().vector.get().dim();
  for (const auto& t : terms) require_same_dim(t.vector.get().dim(), dim);
  std::vector<double> acc(dim, 0.0);
  const auto& k = kernels::active();
  for (const auto& t : terms) {
    if (!std::isfinite(t.coefficient)) throw InvalidArgumentError("non-finite coefficient");
    k.axpy(t.coefficient, t.vector.get().values().data(), acc.data(), dim);
  }
  return Vector(std::move(acc));
}

LensValues project_lens(const PointCloud& cloud, const Vector& direction) {
  if (cloud.empty()) return {};
  require_same_dim(direction.dim(), cloud.dim());
  const double dd = kernels::squared_norm(direction.values());
  if (std::abs(std::sqrt(dd) - 1.0) > 1e-9) {
    throw InvalidArgumentError("lens direction must have unit norm");
  }
  const auto& k = kernels::active();
  std::vector<double> dots(cloud.size());
  std::vector<double> sqnorms(cloud.size());
  k.row_dots(cloud.block(), direction.values().data(), dots.data());
  k.row_sqnorms(cloud.block(), sqnorms.data());
  std::vector<double> values(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (sqnorms[i] == 0.0) {
      throw DegenerateVectorError("record '" + cloud.id(i) + "' is a zero vector");
    }
    values[i] = cosine_from_parts(dots[i], sqnorms[i], dd);
  }
  const auto ids = cloud.ids();
  return LensValues(std::vector<std::string>(ids.begin(), ids.end()), std::move(values));
}

LensValues coordinate_lens(const PointCloud& cloud, std::size_t axis) {
  if (!cloud.empty() && axis >= cloud.dim()) {
    throw DimensionError("lens axis " + std::to_string(axis) + " outside dimension " +
                         std::to_string(cloud.dim()));
  }
  std::vector<double> values(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) values[i] = cloud.row(i)[axis];
  const auto ids = cloud.ids();
  return LensValues(std::vector<std::string>(ids.begin(), ids.end()), std::move(values));
}

PointCloud normalized_rows(const PointCloud& cloud) {
  std::vector<std::pair<std::string, Vector>> rows;
  rows.reserve(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    try {
      rows.emplace_back(cloud.id(i), l2_normalize(cloud.vector(i)));
    } catch (const DegenerateVectorError&) {
      throw DegenerateVectorError("record '" + cloud.id(i) + "' is a zero vector");
    }
  }
  return PointCloud::from_records(cloud.dim(), std::move(rows));
}

}  // namespace fairmap
