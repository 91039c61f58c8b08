#include "fairmap/kernels.hpp"

namespace fairmap::kernels {
namespace {

void row_dots_ref(RowBlock block, const double* v, double* out) {
  for (std::size_t r = 0; r < block.rows; ++r) {
    const double* row = block.data + r * block.dim;
    double s = 0.0;
    for (std::size_t k = 0; k < block.dim; ++k) {
      const double p = row[k] * v[k];
      s = s + p;
    }
    out[r] = s;
  }
}

void row_sqnorms_ref(RowBlock block, double* out) {
  for (std::size_t r = 0; r < block.rows; ++r) {
    const double* row = block.data + r * block.dim;
    double s = 0.0;
    for (std::size_t k = 0; k < block.dim; ++k) {
      const double p = row[k] * row[k];
      s = s + p;
    }
    out[r] = s;
  }
}

void row_sqdists_ref(RowBlock block, const double* x, double* out) {
  for (std::size_t r = 0; r < block.rows; ++r) {
    const double* row = block.data + r * block.dim;
    double s = 0.0;
    for (std::size_t k = 0; k < block.dim; ++k) {
      const double t = row[k] - x[k];
      const double p = t * t;
      s = s + p;
    }
    out[r] = s;
  }
}

void axpy_ref(double c, const double* x, double* y, std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) {
    const double p = c * x[k];
    y[k] = y[k] + p;
  }
}

constexpr KernelTable kScalarTable{Backend::kScalar, row_dots_ref, row_sqnorms_ref, row_sqdists_ref,
                                   axpy_ref};

}  // namespace

const KernelTable& scalar_table() noexcept { return kScalarTable; }

}  // namespace fairmap::kernels
