// Built with -mavx2 (and without -mfma) on x86-64; only reached after a
// runtime CPU check in dispatch.cpp.

#include "fairmap/kernels.hpp"

#if defined(__AVX2__)
#include <immintrin.h>
#endif

namespace fairmap::kernels::detail {

#if defined(__AVX2__)
namespace {

// Loads a 4x4 tile (rows r..r+3, columns k..k+3) and returns its columns, so
// lane j of cols[c] holds row j's element k+c.
inline void load_tile_columns(const double* base, std::size_t dim, __m256d cols[4]) {
  const __m256d a0 = _mm256_loadu_pd(base);
  const __m256d a1 = _mm256_loadu_pd(base + dim);
  const __m256d a2 = _mm256_loadu_pd(base + 2 * dim);
  const __m256d a3 = _mm256_loadu_pd(base + 3 * dim);
  const __m256d t0 = _mm256_unpacklo_pd(a0, a1);
  const __m256d t1 = _mm256_unpackhi_pd(a0, a1);
  const __m256d t2 = _mm256_unpacklo_pd(a2, a3);
  const __m256d t3 = _mm256_unpackhi_pd(a2, a3);
  cols[0] = _mm256_permute2f128_pd(t0, t2, 0x20);
  cols[1] = _mm256_permute2f128_pd(t1, t3, 0x20);
  cols[2] = _mm256_permute2f128_pd(t0, t2, 0x31);
  cols[3] = _mm256_permute2f128_pd(t1, t3, 0x31);
}

inline __m256d load_column(const double* base, std::size_t dim) {
  return _mm256_set_pd(base[3 * dim], base[2 * dim], base[dim], base[0]);
}

// Shared driver: Term(col, k) yields the per-lane term for dimension k, which is
// added to the running lane sums in ascending k.
template <typename Term, typename ScalarRow>
void rows4(RowBlock block, double* out, Term term, ScalarRow scalar_row) {
  const std::size_t dim = block.dim;
  const std::size_t dim4 = dim - dim % 4;
  std::size_t r = 0;
  for (; r + 4 <= block.rows; r += 4) {
    const double* base = block.data + r * dim;
    __m256d acc = _mm256_setzero_pd();
    std::size_t k = 0;
    for (; k < dim4; k += 4) {
      __m256d cols[4];
      load_tile_columns(base + k, dim, cols);
      acc = _mm256_add_pd(acc, term(cols[0], k));
      acc = _mm256_add_pd(acc, term(cols[1], k + 1));
      acc = _mm256_add_pd(acc, term(cols[2], k + 2));
      acc = _mm256_add_pd(acc, term(cols[3], k + 3));
    }
    for (; k < dim; ++k) {
      acc = _mm256_add_pd(acc, term(load_column(base + k, dim), k));
    }
    _mm256_storeu_pd(out + r, acc);
  }
  for (; r < block.rows; ++r) {
    out[r] = scalar_row(block.data + r * dim);
  }
}

void row_dots_avx2(RowBlock block, const double* v, double* out) {
  const std::size_t dim = block.dim;
  rows4(
      block, out, [v](__m256d col, std::size_t k) { return _mm256_mul_pd(col, _mm256_set1_pd(v[k])); },
      [v, dim](const double* row) {
        double s = 0.0;
        for (std::size_t k = 0; k < dim; ++k) {
          const double p = row[k] * v[k];
          s = s + p;
        }
        return s;
      });
}

void row_sqnorms_avx2(RowBlock block, double* out) {
  const std::size_t dim = block.dim;
  rows4(
      block, out, [](__m256d col, std::size_t) { return _mm256_mul_pd(col, col); },
      [dim](const double* row) {
        double s = 0.0;
        for (std::size_t k = 0; k < dim; ++k) {
          const double p = row[k] * row[k];
          s = s + p;
        }
        return s;
      });
}

void row_sqdists_avx2(RowBlock block, const double* x, double* out) {
  const std::size_t dim = block.dim;
  rows4(
      block, out,
      [x](__m256d col, std::size_t k) {
        const __m256d t = _mm256_sub_pd(col, _mm256_set1_pd(x[k]));
        return _mm256_mul_pd(t, t);
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

void axpy_avx2(double c, const double* x, double* y, std::size_t n) {
  const __m256d vc = _mm256_set1_pd(c);
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    const __m256d p = _mm256_mul_pd(vc, _mm256_loadu_pd(x + k));
    _mm256_storeu_pd(y + k, _mm256_add_pd(_mm256_loadu_pd(y + k), p));
  }
  for (; k < n; ++k) {
    const double p = c * x[k];
    y[k] = y[k] + p;
  }
}

const KernelTable kAvx2Table{Backend::kAvx2, row_dots_avx2, row_sqnorms_avx2, row_sqdists_avx2,
                             axpy_avx2};

}  // namespace

const KernelTable* avx2_table() noexcept { return &kAvx2Table; }

#else

const KernelTable* avx2_table() noexcept { return nullptr; }

#endif

}  // namespace fairmap::kernels::detail
