#include <doctest.h>

#include <Eigen/Dense>
#include <vector>

#include "jcr/kernels.hpp"
#include "jcr/rng.hpp"

using namespace jcr;
namespace ker = jcr::kernels;

namespace {

std::vector<double> random_vec(std::size_t n, Rng& rng) {
  std::vector<double> v(n);
  for (double& x : v) x = rng.gaussian();
  return v;
}

// Runs fn under both backends and returns the pair of outputs.
template <typename Fn>
std::pair<std::vector<double>, std::vector<double>> both_backends(
    std::size_t out_len, Fn&& fn) {
  const ker::Backend saved = ker::active_backend();
  std::vector<double> scalar_out(out_len), simd_out(out_len);
  ker::set_backend(ker::Backend::Scalar);
  fn(scalar_out);
  ker::set_backend(ker::Backend::Avx2);
  fn(simd_out);
  ker::set_backend(saved);
  return {scalar_out, simd_out};
}

void expect_close(const std::vector<double>& a, const std::vector<double>& b,
                  double tol) {
  REQUIRE(a.size() == b.size());
  double ref = 1.0;
  for (double v : a) ref = std::max(ref, std::abs(v));
  for (std::size_t i = 0; i < a.size(); ++i)
    CHECK(std::abs(a[i] - b[i]) <= tol * ref);
}

}  // namespace

TEST_CASE("gemm_nn matches Eigen on random shapes") {
  Rng rng(101);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t m = 1 + rng.uniform_index(17);
    const std::size_t n = 1 + rng.uniform_index(23);
    const std::size_t k = 1 + rng.uniform_index(19);
    const auto a = random_vec(m * k, rng);
    const auto b = random_vec(k * n, rng);
    std::vector<double> c(m * n, 0.5);
    ker::gemm_nn(m, n, k, a.data(), b.data(), c.data(), 1.0);

    using RM = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                             Eigen::RowMajor>;
    Eigen::Map<const RM> ma(a.data(), m, k), mb(b.data(), k, n);
    RM expect = RM::Constant(m, n, 0.5) + ma * mb;
    for (std::size_t i = 0; i < m * n; ++i)
      CHECK(c[i] == doctest::Approx(expect.data()[i]).epsilon(1e-12));
  }
}

TEST_CASE("gemm_tn and gemm_nt match explicit transposes") {
  Rng rng(102);
  const std::size_t m = 7, n = 9, k = 11;
  const auto a_t = random_vec(k * m, rng);  // k x m
  const auto b = random_vec(k * n, rng);
  const auto a = random_vec(m * k, rng);
  const auto b_t = random_vec(n * k, rng);  // n x k
  std::vector<double> c1(m * n, 0.0), c2(m * n, 0.0);
  ker::gemm_tn(m, n, k, a_t.data(), b.data(), c1.data(), 0.0);
  ker::gemm_nt(m, n, k, a.data(), b_t.data(), c2.data(), 0.0);

  using RM =
      Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  Eigen::Map<const RM> mat(a_t.data(), k, m), mb(b.data(), k, n),
      ma(a.data(), m, k), mbt(b_t.data(), n, k);
  RM e1 = mat.transpose() * mb;
  RM e2 = ma * mbt.transpose();
  for (std::size_t i = 0; i < m * n; ++i) {
    CHECK(c1[i] == doctest::Approx(e1.data()[i]).epsilon(1e-12));
    CHECK(c2[i] == doctest::Approx(e2.data()[i]).epsilon(1e-12));
  }
}

TEST_CASE("scalar and simd backends agree on every kernel") {
  if (ker::detected_backend() != ker::Backend::Avx2) {
    MESSAGE("AVX2 not available; dispatch test degenerates to scalar==scalar");
  }
  Rng rng(103);
  const std::size_t m = 13, n = 18, k = 21;
  const auto a = random_vec(m * k, rng);
  const auto b = random_vec(k * n, rng);
  const auto bt = random_vec(n * k, rng);
  const auto at = random_vec(k * m, rng);

  auto [s1, v1] = both_backends(m * n, [&](std::vector<double>& out) {
    ker::gemm_nn(m, n, k, a.data(), b.data(), out.data(), 0.0);
  });
  expect_close(s1, v1, 1e-12);

  auto [s2, v2] = both_backends(m * n, [&](std::vector<double>& out) {
    ker::gemm_tn(m, n, k, at.data(), b.data(), out.data(), 0.0);
  });
  expect_close(s2, v2, 1e-12);

  auto [s3, v3] = both_backends(m * n, [&](std::vector<double>& out) {
    ker::gemm_nt(m, n, k, a.data(), bt.data(), out.data(), 0.0);
  });
  expect_close(s3, v3, 1e-12);

  const auto z = random_vec(257, rng);
  const auto g = random_vec(257, rng);
  auto [s4, v4] = both_backends(257, [&](std::vector<double>& out) {
    ker::relu_forward(257, z.data(), out.data());
  });
  expect_close(s4, v4, 0.0);

  auto [s5, v5] = both_backends(257, [&](std::vector<double>& out) {
    ker::relu_backward(257, z.data(), g.data(), out.data());
  });
  expect_close(s5, v5, 0.0);

  auto [s6, v6] = both_backends(6 * 31, [&](std::vector<double>& out) {
    std::copy(z.begin(), z.begin() + 6 * 31, out.begin());
    ker::add_bias_rows(6, 31, out.data(), g.data());
  });
  expect_close(s6, v6, 0.0);

  auto [s7, v7] = both_backends(31, [&](std::vector<double>& out) {
    ker::bias_grad_cols(6, 31, z.data(), out.data());
  });
  expect_close(s7, v7, 1e-13);

  auto [s8, v8] = both_backends(257, [&](std::vector<double>& out) {
    std::copy(g.begin(), g.end(), out.begin());
    ker::axpy(257, 1.7, z.data(), out.data());
  });
  expect_close(s8, v8, 1e-13);

  auto [s9, v9] = both_backends(257, [&](std::vector<double>& out) {
    std::copy(z.begin(), z.end(), out.begin());
    ker::scale(257, -0.3, out.data());
  });
  expect_close(s9, v9, 0.0);

  auto [s10, v10] = both_backends(1, [&](std::vector<double>& out) {
    out[0] = ker::sq_diff_sum(257, z.data(), g.data());
  });
  expect_close(s10, v10, 1e-13);

  auto [s11, v11] = both_backends(2 * 257, [&](std::vector<double>& out) {
    std::copy(z.begin(), z.end(), out.begin());
    std::copy(g.begin(), g.end(), out.begin() + 257);
    ker::sgd_momentum(257, out.data(), out.data() + 257, a.data(), 1e-2, 0.9);
  });
  expect_close(s11, v11, 1e-13);

  auto [s12, v12] = both_backends(3 * 257, [&](std::vector<double>& out) {
    std::copy(z.begin(), z.end(), out.begin());
    std::copy(g.begin(), g.end(), out.begin() + 257);
    for (std::size_t i = 0; i < 257; ++i) out[2 * 257 + i] = std::abs(a[i]);
    ker::adam(257, out.data(), out.data() + 257, out.data() + 2 * 257,
              b.data(), 1e-3, 0.9, 0.999, 1e-8, 1.0 / (1.0 - 0.9),
              1.0 / (1.0 - 0.999));
  });
  expect_close(s12, v12, 1e-12);
}

TEST_CASE("sq_diff_sum equals the direct norm") {
  Rng rng(104);
  const auto a = random_vec(100, rng);
  const auto b = random_vec(100, rng);
  double direct = 0.0;
  for (int i = 0; i < 100; ++i) direct += (a[i] - b[i]) * (a[i] - b[i]);
  CHECK(ker::sq_diff_sum(100, a.data(), b.data()) ==
        doctest::Approx(direct).epsilon(1e-12));
}

TEST_CASE("backend forcing is sticky and reversible") {
  const ker::Backend saved = ker::active_backend();
  ker::set_backend(ker::Backend::Scalar);
  CHECK(ker::active_backend() == ker::Backend::Scalar);
  ker::set_backend(ker::detected_backend());
  CHECK(ker::active_backend() == ker::detected_backend());
  ker::set_backend(saved);
}
