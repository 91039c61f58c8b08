#pragma once

// Dense double-precision inner loops used by the lens projection and the
// clustering distance scans.
//
// Every backend keeps one accumulator per output row and adds the per-dimension
// terms in ascending dimension order, using separate multiply and add (never
// fused). Vector backends therefore parallelize across rows, not along a row,
// and produce results bit-identical to the scalar reference.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace fairmap::kernels {

enum class Backend { kScalar, kAvx2, kNeon };

std::string_view backend_name(Backend b) noexcept;

// Row-major matrix of `rows` rows by `dim` columns.
struct RowBlock {
  const double* data;
  std::size_t rows;
  std::size_t dim;
};

struct KernelTable {
  Backend backend;
  // out[r] = sum_k block[r][k] * v[k]
  void (*row_dots)(RowBlock block, const double* v, double* out);
  // out[r] = sum_k block[r][k]^2
  void (*row_sqnorms)(RowBlock block, double* out);
  // out[r] = sum_k (block[r][k] - x[k])^2
  void (*row_sqdists)(RowBlock block, const double* x, double* out);
  // y[k] = y[k] + c * x[k]
  void (*axpy)(double c, const double* x, double* y, std::size_t n);
};

const KernelTable& scalar_table() noexcept;

// Backends compiled into this binary and supported by the running CPU.
std::vector<Backend> available_backends();

// Throws InvalidArgumentError when the backend is not available.
const KernelTable& table(Backend b);

// The process-wide selection. Initialized on first use to the widest available
// backend, or to the FAIRMAP_KERNEL environment variable (scalar|avx2|neon).
const KernelTable& active() noexcept;
Backend active_backend() noexcept;

// Returns false, leaving the selection unchanged, when `b` is unavailable.
bool set_backend(Backend b) noexcept;

// Single-row conveniences on the active table.
double dot(std::span<const double> a, std::span<const double> b) noexcept;
double squared_norm(std::span<const double> a) noexcept;
double squared_distance(std::span<const double> a, std::span<const double> b) noexcept;

namespace detail {
// Per-ISA entry points, defined in separately compiled translation units.
const KernelTable* avx2_table() noexcept;
const KernelTable* neon_table() noexcept;
}  // namespace detail

}  // namespace fairmap::kernels
