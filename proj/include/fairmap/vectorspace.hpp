#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fairmap/kernels.hpp"

namespace fairmap {

// Fixed-dimension real vector. Values are always finite.
class Vector {
 public:
  Vector() = default;
  // Throws InvalidArgumentError on an empty or non-finite input.
  explicit Vector(std::vector<double> values);
  Vector(std::initializer_list<double> values) : Vector(std::vector<double>(values)) {}

  static Vector zeros(std::size_t dim);

  std::size_t dim() const noexcept { return values_.size(); }
  std::span<const double> values() const noexcept { return values_; }
  double operator[](std::size_t i) const noexcept { return values_[i]; }

  Vector operator-() const;

  friend bool operator==(const Vector&, const Vector&) = default;

 private:
  std::vector<double> values_;
};

double norm(std::span<const double> v) noexcept;
inline double norm(const Vector& v) noexcept { return norm(v.values()); }

// Embedding sample keyed by record id. Rows are stored contiguously in
// ascending id order, so row index order is id order.
class PointCloud {
 public:
  PointCloud() = default;
  explicit PointCloud(std::size_t dim) : dim_(dim) {}

  // Sorts by id. Throws InvalidArgumentError on duplicate ids and
  // DimensionError when a vector does not match `dim`.
  static PointCloud from_records(std::size_t dim, std::vector<std::pair<std::string, Vector>> records);

  void insert(std::string id, const Vector& v);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return ids_.size(); }
  bool empty() const noexcept { return ids_.empty(); }

  std::span<const std::string> ids() const noexcept { return ids_; }
  const std::string& id(std::size_t row) const { return ids_[row]; }
  std::span<const double> row(std::size_t i) const noexcept {
    return {data_.data() + i * dim_, dim_};
  }
  Vector vector(std::size_t row) const;

  std::optional<std::size_t> index_of(std::string_view id) const noexcept;
  bool contains(std::string_view id) const noexcept { return index_of(id).has_value(); }
  // Throws UnknownRecordError.
  std::span<const double> at(std::string_view id) const;

  kernels::RowBlock block() const noexcept { return {data_.data(), ids_.size(), dim_}; }

  friend bool operator==(const PointCloud&, const PointCloud&) = default;

 private:
  std::size_t dim_ = 0;
  std::vector<std::string> ids_;
  std::vector<double> data_;
};

// Scalar lens image f(X), keyed by record id in ascending order.
class LensValues {
 public:
  LensValues() = default;
  // `ids` must be strictly ascending and aligned with finite `values`.
  LensValues(std::vector<std::string> ids, std::vector<double> values);

  std::size_t size() const noexcept { return ids_.size(); }
  bool empty() const noexcept { return ids_.empty(); }
  std::span<const std::string> ids() const noexcept { return ids_; }
  std::span<const double> values() const noexcept { return values_; }

  std::optional<double> find(std::string_view id) const noexcept;
  double at(std::string_view id) const;

  // Throws EmptyInputError when empty.
  double min() const;
  double max() const;

  friend bool operator==(const LensValues&, const LensValues&) = default;

 private:
  std::vector<std::string> ids_;
  std::vector<double> values_;
};

// dot(a,b) / (|a| |b|), clamped to [-1, 1].
double cosine_similarity(std::span<const double> a, std::span<const double> b);
inline double cosine_similarity(const Vector& a, const Vector& b) {
  return cosine_similarity(a.values(), b.values());
}

// Combines precomputed parts exactly as cosine_similarity does.
double cosine_from_parts(double dot, double sqnorm_a, double sqnorm_b) noexcept;

Vector l2_normalize(const Vector& v);

struct WeightedVector {
  double coefficient;
  std::reference_wrapper<const Vector> vector;
};

// Componentwise sum of coefficient * vector, accumulated in input order.
Vector linear_combination(std::span<const WeightedVector> terms);

// Cosine of every point against a unit `direction`. Errors name the record.
LensValues project_lens(const PointCloud& cloud, const Vector& direction);

// Raw coordinate `axis` of every point.
LensValues coordinate_lens(const PointCloud& cloud, std::size_t axis);

// Copy of `cloud` with every row scaled to unit norm.
PointCloud normalized_rows(const PointCloud& cloud);

}  // namespace fairmap
