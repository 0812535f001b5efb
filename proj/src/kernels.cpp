// Scalar reference kernels and the runtime backend dispatch table.
#include "jcr/kernels.hpp"

#include <atomic>
#include <cmath>

namespace jcr::kernels {

namespace detail {

void gemm_nn_scalar(std::size_t m, std::size_t n, std::size_t k,
                    const double* a, const double* b, double* c, double beta) {
  for (std::size_t i = 0; i < m; ++i) {
    double* crow = c + i * n;
    if (beta == 0.0) {
      for (std::size_t j = 0; j < n; ++j) crow[j] = 0.0;
    } else if (beta != 1.0) {
      for (std::size_t j = 0; j < n; ++j) crow[j] *= beta;
    }
    for (std::size_t p = 0; p < k; ++p) {
      const double aip = a[i * k + p];
      const double* brow = b + p * n;
      for (std::size_t j = 0; j < n; ++j) crow[j] += aip * brow[j];
    }
  }
}

void gemm_tn_scalar(std::size_t m, std::size_t n, std::size_t k,
                    const double* a, const double* b, double* c, double beta) {
  // a is k x m, accessed as a[p*m + i]
  for (std::size_t i = 0; i < m; ++i) {
    double* crow = c + i * n;
    if (beta == 0.0) {
      for (std::size_t j = 0; j < n; ++j) crow[j] = 0.0;
    } else if (beta != 1.0) {
      for (std::size_t j = 0; j < n; ++j) crow[j] *= beta;
    }
    for (std::size_t p = 0; p < k; ++p) {
      const double aip = a[p * m + i];
      const double* brow = b + p * n;
      for (std::size_t j = 0; j < n; ++j) crow[j] += aip * brow[j];
    }
  }
}

void gemm_nt_scalar(std::size_t m, std::size_t n, std::size_t k,
                    const double* a, const double* b, double* c, double beta) {
  // b is n x k, accessed as b[j*k + p]
  for (std::size_t i = 0; i < m; ++i) {
    const double* arow = a + i * k;
    double* crow = c + i * n;
    for (std::size_t j = 0; j < n; ++j) {
      const double* brow = b + j * k;
      double acc = 0.0;
      for (std::size_t p = 0; p < k; ++p) acc += arow[p] * brow[p];
      crow[j] = (beta == 0.0 ? 0.0 : beta * crow[j]) + acc;
    }
  }
}

void relu_forward_scalar(std::size_t n, const double* z, double* out) {
  for (std::size_t i = 0; i < n; ++i) out[i] = z[i] > 0.0 ? z[i] : 0.0;
}

void relu_backward_scalar(std::size_t n, const double* z,
                          const double* grad_out, double* grad_in) {
  for (std::size_t i = 0; i < n; ++i)
    grad_in[i] = z[i] > 0.0 ? grad_out[i] : 0.0;
}

void add_bias_rows_scalar(std::size_t rows, std::size_t cols, double* x,
                          const double* bias) {
  for (std::size_t r = 0; r < rows; ++r) {
    double* xr = x + r * cols;
    for (std::size_t j = 0; j < cols; ++j) xr[j] += bias[j];
  }
}

void bias_grad_cols_scalar(std::size_t rows, std::size_t cols,
                           const double* dz, double* db) {
  for (std::size_t j = 0; j < cols; ++j) db[j] = 0.0;
  for (std::size_t r = 0; r < rows; ++r) {
    const double* row = dz + r * cols;
    for (std::size_t j = 0; j < cols; ++j) db[j] += row[j];
  }
}

void axpy_scalar(std::size_t n, double alpha, const double* x, double* y) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void scale_scalar(std::size_t n, double alpha, double* x) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= alpha;
}

double sq_diff_sum_scalar(std::size_t n, const double* a, const double* b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

void sgd_momentum_scalar(std::size_t n, double* w, double* v, const double* g,
                         double lr, double momentum) {
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = momentum * v[i] + g[i];
    w[i] -= lr * v[i];
  }
}

void adam_scalar(std::size_t n, double* w, double* m, double* v,
                 const double* g, double lr, double beta1, double beta2,
                 double eps, double c1, double c2) {
  for (std::size_t i = 0; i < n; ++i) {
    m[i] = beta1 * m[i] + (1.0 - beta1) * g[i];
    v[i] = beta2 * v[i] + (1.0 - beta2) * g[i] * g[i];
    w[i] -= lr * (m[i] * c1) / (std::sqrt(v[i] * c2) + eps);
  }
}

}  // namespace detail

namespace {

Backend detect() {
#if defined(JCR_KERNELS_AVX2) && (defined(__x86_64__) || defined(__i386__))
  if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma"))
    return Backend::Avx2;
#endif
  return Backend::Scalar;
}

std::atomic<Backend> g_backend{detect()};

}  // namespace

Backend detected_backend() { return detect(); }
Backend active_backend() { return g_backend.load(std::memory_order_relaxed); }

void set_backend(Backend b) {
#if !defined(JCR_KERNELS_AVX2)
  b = Backend::Scalar;
#else
  if (b == Backend::Avx2 && detect() != Backend::Avx2) b = Backend::Scalar;
#endif
  g_backend.store(b, std::memory_order_relaxed);
}

std::string backend_name(Backend b) {
  return b == Backend::Avx2 ? "avx2" : "scalar";
}

#if defined(JCR_KERNELS_AVX2)
#define JCR_DISPATCH(fn, ...)                          \
  if (active_backend() == Backend::Avx2)               \
    return detail::fn##_avx2(__VA_ARGS__);             \
  return detail::fn##_scalar(__VA_ARGS__)
#else
#define JCR_DISPATCH(fn, ...) return detail::fn##_scalar(__VA_ARGS__)
#endif

void gemm_nn(std::size_t m, std::size_t n, std::size_t k, const double* a,
             const double* b, double* c, double beta) {
  JCR_DISPATCH(gemm_nn, m, n, k, a, b, c, beta);
}
void gemm_tn(std::size_t m, std::size_t n, std::size_t k, const double* a,
             const double* b, double* c, double beta) {
  JCR_DISPATCH(gemm_tn, m, n, k, a, b, c, beta);
}
void gemm_nt(std::size_t m, std::size_t n, std::size_t k, const double* a,
             const double* b, double* c, double beta) {
  JCR_DISPATCH(gemm_nt, m, n, k, a, b, c, beta);
}
void relu_forward(std::size_t n, const double* z, double* out) {
  JCR_DISPATCH(relu_forward, n, z, out);
}
void relu_backward(std::size_t n, const double* z, const double* grad_out,
                   double* grad_in) {
  JCR_DISPATCH(relu_backward, n, z, grad_out, grad_in);
}
void add_bias_rows(std::size_t rows, std::size_t cols, double* x,
                   const double* bias) {
  JCR_DISPATCH(add_bias_rows, rows, cols, x, bias);
}
void bias_grad_cols(std::size_t rows, std::size_t cols, const double* dz,
                    double* db) {
  JCR_DISPATCH(bias_grad_cols, rows, cols, dz, db);
}
void axpy(std::size_t n, double alpha, const double* x, double* y) {
  JCR_DISPATCH(axpy, n, alpha, x, y);
}
void scale(std::size_t n, double alpha, double* x) {
  JCR_DISPATCH(scale, n, alpha, x);
}
double sq_diff_sum(std::size_t n, const double* a, const double* b) {
#if defined(JCR_KERNELS_AVX2)
  if (active_backend() == Backend::Avx2)
    return detail::sq_diff_sum_avx2(n, a, b);
#endif
  return detail::sq_diff_sum_scalar(n, a, b);
}
void sgd_momentum(std::size_t n, double* w, double* v, const double* g,
                  double lr, double momentum) {
  JCR_DISPATCH(sgd_momentum, n, w, v, g, lr, momentum);
}
void adam(std::size_t n, double* w, double* m, double* v, const double* g,
          double lr, double beta1, double beta2, double eps, double c1,
          double c2) {
  JCR_DISPATCH(adam, n, w, m, v, g, lr, beta1, beta2, eps, c1, c2);
}

#undef JCR_DISPATCH

}  // namespace jcr::kernels
