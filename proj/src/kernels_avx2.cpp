// AVX2+FMA kernel variants. This translation unit is the only one compiled
// with -mavx2 -mfma; callers must go through the dispatch in kernels.cpp.
#include "jcr/kernels.hpp"

#if defined(JCR_KERNELS_AVX2)

#include <immintrin.h>

#include <cmath>

namespace jcr::kernels::detail {

namespace {

inline void zero_or_scale_row(double* c, std::size_t n, double beta) {
  if (beta == 0.0) {
    std::size_t j = 0;
    const __m256d z = _mm256_setzero_pd();
    for (; j + 4 <= n; j += 4) _mm256_storeu_pd(c + j, z);
    for (; j < n; ++j) c[j] = 0.0;
  } else if (beta != 1.0) {
    std::size_t j = 0;
    const __m256d vb = _mm256_set1_pd(beta);
    for (; j + 4 <= n; j += 4)
      _mm256_storeu_pd(c + j, _mm256_mul_pd(_mm256_loadu_pd(c + j), vb));
    for (; j < n; ++j) c[j] *= beta;
  }
}

// crow += aip * brow, vectorized over the row.
inline void fma_row(double* crow, const double* brow, double aip,
                    std::size_t n) {
  const __m256d va = _mm256_set1_pd(aip);
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    __m256d vc = _mm256_loadu_pd(crow + j);
    vc = _mm256_fmadd_pd(va, _mm256_loadu_pd(brow + j), vc);
    _mm256_storeu_pd(crow + j, vc);
  }
  for (; j < n; ++j) crow[j] += aip * brow[j];
}

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

}  // namespace

void gemm_nn_avx2(std::size_t m, std::size_t n, std::size_t k, const double* a,
                  const double* b, double* c, double beta) {
  for (std::size_t i = 0; i < m; ++i) {
    double* crow = c + i * n;
    zero_or_scale_row(crow, n, beta);
    for (std::size_t p = 0; p < k; ++p)
      fma_row(crow, b + p * n, a[i * k + p], n);
  }
}

void gemm_tn_avx2(std::size_t m, std::size_t n, std::size_t k, const double* a,
                  const double* b, double* c, double beta) {
  for (std::size_t i = 0; i < m; ++i) {
    double* crow = c + i * n;
    zero_or_scale_row(crow, n, beta);
    for (std::size_t p = 0; p < k; ++p)
      fma_row(crow, b + p * n, a[p * m + i], n);
  }
}

void gemm_nt_avx2(std::size_t m, std::size_t n, std::size_t k, const double* a,
                  const double* b, double* c, double beta) {
  for (std::size_t i = 0; i < m; ++i) {
    const double* arow = a + i * k;
    double* crow = c + i * n;
    for (std::size_t j = 0; j < n; ++j) {
      const double* brow = b + j * k;
      __m256d acc = _mm256_setzero_pd();
      std::size_t p = 0;
      for (; p + 4 <= k; p += 4)
        acc = _mm256_fmadd_pd(_mm256_loadu_pd(arow + p),
                              _mm256_loadu_pd(brow + p), acc);
      double s = hsum(acc);
      for (; p < k; ++p) s += arow[p] * brow[p];
      crow[j] = (beta == 0.0 ? 0.0 : beta * crow[j]) + s;
    }
  }
}

void relu_forward_avx2(std::size_t n, const double* z, double* out) {
  const __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(out + i, _mm256_max_pd(_mm256_loadu_pd(z + i), zero));
  for (; i < n; ++i) out[i] = z[i] > 0.0 ? z[i] : 0.0;
}

void relu_backward_avx2(std::size_t n, const double* z, const double* grad_out,
                        double* grad_in) {
  const __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d mask = _mm256_cmp_pd(_mm256_loadu_pd(z + i), zero, _CMP_GT_OQ);
    _mm256_storeu_pd(grad_in + i,
                     _mm256_and_pd(mask, _mm256_loadu_pd(grad_out + i)));
  }
  for (; i < n; ++i) grad_in[i] = z[i] > 0.0 ? grad_out[i] : 0.0;
}

void add_bias_rows_avx2(std::size_t rows, std::size_t cols, double* x,
                        const double* bias) {
  for (std::size_t r = 0; r < rows; ++r) {
    double* xr = x + r * cols;
    std::size_t j = 0;
    for (; j + 4 <= cols; j += 4)
      _mm256_storeu_pd(
          xr + j, _mm256_add_pd(_mm256_loadu_pd(xr + j),
                                _mm256_loadu_pd(bias + j)));
    for (; j < cols; ++j) xr[j] += bias[j];
  }
}

void bias_grad_cols_avx2(std::size_t rows, std::size_t cols, const double* dz,
                         double* db) {
  std::size_t j = 0;
  for (; j + 4 <= cols; j += 4) _mm256_storeu_pd(db + j, _mm256_setzero_pd());
  for (; j < cols; ++j) db[j] = 0.0;
  for (std::size_t r = 0; r < rows; ++r) {
    const double* row = dz + r * cols;
    std::size_t c = 0;
    for (; c + 4 <= cols; c += 4)
      _mm256_storeu_pd(db + c, _mm256_add_pd(_mm256_loadu_pd(db + c),
                                             _mm256_loadu_pd(row + c)));
    for (; c < cols; ++c) db[c] += row[c];
  }
}

void axpy_avx2(std::size_t n, double alpha, const double* x, double* y) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vy = _mm256_loadu_pd(y + i);
    vy = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), vy);
    _mm256_storeu_pd(y + i, vy);
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void scale_avx2(std::size_t n, double alpha, double* x) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(x + i, _mm256_mul_pd(_mm256_loadu_pd(x + i), va));
  for (; i < n; ++i) x[i] *= alpha;
}

double sq_diff_sum_avx2(std::size_t n, const double* a, const double* b) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d =
        _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    acc = _mm256_fmadd_pd(d, d, acc);
  }
  double s = hsum(acc);
  for (; i < n; ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

void sgd_momentum_avx2(std::size_t n, double* w, double* v, const double* g,
                       double lr, double momentum) {
  const __m256d vm = _mm256_set1_pd(momentum);
  const __m256d vlr = _mm256_set1_pd(lr);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vv = _mm256_fmadd_pd(vm, _mm256_loadu_pd(v + i),
                                 _mm256_loadu_pd(g + i));
    _mm256_storeu_pd(v + i, vv);
    __m256d vw = _mm256_loadu_pd(w + i);
    vw = _mm256_fnmadd_pd(vlr, vv, vw);
    _mm256_storeu_pd(w + i, vw);
  }
  for (; i < n; ++i) {
    v[i] = momentum * v[i] + g[i];
    w[i] -= lr * v[i];
  }
}

void adam_avx2(std::size_t n, double* w, double* m, double* v, const double* g,
               double lr, double beta1, double beta2, double eps, double c1,
               double c2) {
  const __m256d vb1 = _mm256_set1_pd(beta1);
  const __m256d vb1c = _mm256_set1_pd(1.0 - beta1);
  const __m256d vb2 = _mm256_set1_pd(beta2);
  const __m256d vb2c = _mm256_set1_pd(1.0 - beta2);
  const __m256d veps = _mm256_set1_pd(eps);
  const __m256d vlr = _mm256_set1_pd(lr);
  const __m256d vc1 = _mm256_set1_pd(c1);
  const __m256d vc2 = _mm256_set1_pd(c2);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d vg = _mm256_loadu_pd(g + i);
    __m256d vmm = _mm256_fmadd_pd(vb1, _mm256_loadu_pd(m + i),
                                  _mm256_mul_pd(vb1c, vg));
    _mm256_storeu_pd(m + i, vmm);
    __m256d vvv = _mm256_fmadd_pd(vb2, _mm256_loadu_pd(v + i),
                                  _mm256_mul_pd(vb2c, _mm256_mul_pd(vg, vg)));
    _mm256_storeu_pd(v + i, vvv);
    const __m256d denom =
        _mm256_add_pd(_mm256_sqrt_pd(_mm256_mul_pd(vvv, vc2)), veps);
    const __m256d step =
        _mm256_div_pd(_mm256_mul_pd(vlr, _mm256_mul_pd(vmm, vc1)), denom);
    _mm256_storeu_pd(w + i, _mm256_sub_pd(_mm256_loadu_pd(w + i), step));
  }
  for (; i < n; ++i) {
    m[i] = beta1 * m[i] + (1.0 - beta1) * g[i];
    v[i] = beta2 * v[i] + (1.0 - beta2) * g[i] * g[i];
    w[i] -= lr * (m[i] * c1) / (std::sqrt(v[i] * c2) + eps);
  }
}

}  // namespace jcr::kernels::detail

#endif  // JCR_KERNELS_AVX2
