// AArch64 NEON backend. Two rows per 128-bit register.

#include "fairmap/kernels.hpp"

#if defined(__aarch64__) && defined(__ARM_NEON)
#include <arm_neon.h>
#endif

namespace fairmap::kernels::detail {

#if defined(__aarch64__) && defined(__ARM_NEON)
namespace {

template <typename Term, typename ScalarRow>
void rows2(RowBlock block, double* out, Term term, ScalarRow scalar_row) {
  const std::size_t dim = block.dim;
  std::size_t r = 0;
  for (; r + 2 <= block.rows; r += 2) {
    const double* r0 = block.data + r * dim;
    const double* r1 = r0 + dim;
    float64x2_t acc = vdupq_n_f64(0.0);
    std::size_t k = 0;
    for (; k + 2 <= dim; k += 2) {
      const float64x2_t a0 = vld1q_f64(r0 + k);
      const float64x2_t a1 = vld1q_f64(r1 + k);
      acc = vaddq_f64(acc, term(vzip1q_f64(a0, a1), k));
      acc = vaddq_f64(acc, term(vzip2q_f64(a0, a1), k + 1));
    }
    for (; k < dim; ++k) {
      const double lanes[2] = {r0[k], r1[k]};
      acc = vaddq_f64(acc, term(vld1q_f64(lanes), k));
    }
    vst1q_f64(out + r, acc);
  }
  for (; r < block.rows; ++r) {
    out[r] = scalar_row(block.data + r * dim);
  }
}

void row_dots_neon(RowBlock block, const double* v, double* out) {
  const std::size_t dim = block.dim;
  rows2(
      block, out, [v](float64x2_t col, std::size_t k) { return vmulq_f64(col, vdupq_n_f64(v[k])); },
      [v, dim](const double* row) {
        double s = 0.0;
        for (std::size_t k = 0; k < dim; ++k) {
          const double p = row[k] * v[k];
          s = s + p;
        }
        return s;
      });
}

void row_sqnorms_neon(RowBlock block, double* out) {
  const std::size_t dim = block.dim;
  rows2(
      block, out, [](float64x2_t col, std::size_t) { return vmulq_f64(col, col); },
      [dim](const double* row) {
        double s = 0.0;
        for (std::size_t k = 0; k < dim; ++k) {
          const double p = row[k] * row[k];
          s = s + p;
        }
        return s;
      });
}

void row_sqdists_neon(RowBlock block, const double* x, double* out) {
  const std::size_t dim = block.dim;
  rows2(
      block, out,
      [x](float64x2_t col, std::size_t k) {
        const float64x2_t t = vsubq_f64(col, vdupq_n_f64(x[k]));
        return vmulq_f64(t, t);
      },
      [x, dim](const double* row) {
        double s = 0.0;
        for (std::size_t k = 0; k < dim; ++k) {
          const double t = row[k] - x[k];
          const double p = t * t;
          s = s + p;
        }
        return s;
      });
}

void axpy_neon(double c, const double* x, double* y, std::size_t n) {
  const float64x2_t vc = vdupq_n_f64(c);
  std::size_t k = 0;
  for (; k + 2 <= n; k += 2) {
    const float64x2_t p = vmulq_f64(vc, vld1q_f64(x + k));
    vst1q_f64(y + k, vaddq_f64(vld1q_f64(y + k), p));
  }
  for (; k < n; ++k) {
    const double p = c * x[k];
    y[k] = y[k] + p;
  }
}

const KernelTable kNeonTable{Backend::kNeon, row_dots_neon, row_sqnorms_neon, row_sqdists_neon,
                             axpy_neon};

}  // namespace

const KernelTable* neon_table() noexcept { return &kNeonTable; }

#else

const KernelTable* neon_table() noexcept { return nullptr; }

#endif

}  // namespace fairmap::kernels::detail
