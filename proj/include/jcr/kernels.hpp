// Dense double-precision kernels for the hot inner loops (network training,
// reductions). Each kernel has a scalar reference implementation and an AVX2
// variant; the active backend is chosen at runtime from CPU features and can
// be forced for equivalence testing.
#pragma once

#include <cstddef>
#include <string>

namespace jcr::kernels {

enum class Backend { Scalar, Avx2 };

// Backend detected from CPU features (Avx2 when AVX2+FMA are present).
Backend detected_backend();

// Currently active backend. Not safe to flip concurrently with running kernels.
Backend active_backend();
void set_backend(Backend b);

std::string backend_name(Backend b);

// Row-major GEMM family. C (m x n) = beta*C + op(A)*op(B).
//   gemm_nn: A is m x k, B is k x n
//   gemm_tn: A is k x m (transposed access), B is k x n
//   gemm_nt: A is m x k, B is n x k (transposed access)
void gemm_nn(std::size_t m, std::size_t n, std::size_t k,
             const double* a, const double* b, double* c, double beta);
void gemm_tn(std::size_t m, std::size_t n, std::size_t k,
             const double* a, const double* b, double* c, double beta);
void gemm_nt(std::size_t m, std::size_t n, std::size_t k,
             const double* a, const double* b, double* c, double beta);

// out[i] = max(z[i], 0)
void relu_forward(std::size_t n, const double* z, double* out);
// grad_in[i] = grad_out[i] * (z[i] > 0)
void relu_backward(std::size_t n, const double* z, const double* grad_out,
                   double* grad_in);

// x[r, :] += bias for every row r of the row-major rows x cols matrix x.
void add_bias_rows(std::size_t rows, std::size_t cols, double* x,
                   const double* bias);
// db[j] = sum over rows of dz[r, j]
void bias_grad_cols(std::size_t rows, std::size_t cols, const double* dz,
                    double* db);

// y += alpha * x
void axpy(std::size_t n, double alpha, const double* x, double* y);
// x *= alpha
void scale(std::size_t n, double alpha, double* x);
// sum((a[i]-b[i])^2)
double sq_diff_sum(std::size_t n, const double* a, const double* b);

// Momentum SGD step: v = momentum*v + g; w -= lr*v.
void sgd_momentum(std::size_t n, double* w, double* v, const double* g,
                  double lr, double momentum);

// Adam step with caller-supplied bias corrections c1 = 1/(1-beta1^t),
// c2 = 1/(1-beta2^t):
//   m = beta1*m + (1-beta1)*g;  v = beta2*v + (1-beta2)*g^2
//   w -= lr * (m*c1) / (sqrt(v*c2) + eps)
void adam(std::size_t n, double* w, double* m, double* v, const double* g,
          double lr, double beta1, double beta2, double eps, double c1,
          double c2);

namespace detail {
// Scalar reference implementations, exposed for equivalence tests.
void gemm_nn_scalar(std::size_t, std::size_t, std::size_t, const double*,
                    const double*, double*, double);
void gemm_tn_scalar(std::size_t, std::size_t, std::size_t, const double*,
                    const double*, double*, double);
void gemm_nt_scalar(std::size_t, std::size_t, std::size_t, const double*,
                    const double*, double*, double);
void relu_forward_scalar(std::size_t, const double*, double*);
void relu_backward_scalar(std::size_t, const double*, const double*, double*);
void add_bias_rows_scalar(std::size_t, std::size_t, double*, const double*);
void bias_grad_cols_scalar(std::size_t, std::size_t, const double*, double*);
void axpy_scalar(std::size_t, double, const double*, double*);
void scale_scalar(std::size_t, double, double*);
double sq_diff_sum_scalar(std::size_t, const double*, const double*);
void sgd_momentum_scalar(std::size_t, double*, double*, const double*, double,
                         double);
void adam_scalar(std::size_t, double*, double*, double*, const double*,
                 double, double, double, double, double, double);

#if defined(JCR_KERNELS_AVX2)
void gemm_nn_avx2(std::size_t, std::size_t, std::size_t, const double*,
                  const double*, double*, double);
void gemm_tn_avx2(std::size_t, std::size_t, std::size_t, const double*,
                  const double*, double*, double);
void gemm_nt_avx2(std::size_t, std::size_t, std::size_t, const double*,
                  const double*, double*, double);
void relu_forward_avx2(std::size_t, const double*, double*);
void relu_backward_avx2(std::size_t, const double*, const double*, double*);
void add_bias_rows_avx2(std::size_t, std::size_t, double*, const double*);
void bias_grad_cols_avx2(std::size_t, std::size_t, const double*, double*);
void axpy_avx2(std::size_t, double, const double*, double*);
void scale_avx2(std::size_t, double, double*);
double sq_diff_sum_avx2(std::size_t, const double*, const double*);
void sgd_momentum_avx2(std::size_t, double*, double*, const double*, double,
                       double);
void adam_avx2(std::size_t, double*, double*, double*, const double*, double,
               double, double, double, double, double);
#endif
}  // namespace detail

}  // namespace jcr::kernels
