#include <doctest.h>

#include <sstream>

#include "jcr/geometry.hpp"
#include "jcr/sdp.hpp"
#include "support/oracles.hpp"

using namespace jcr;
namespace sdp = jcr::sdp;

namespace {

sdp::SdpProblem eigenvalue_problem(const CMat& c) {
  sdp::SdpProblem p;
  const int n = static_cast<int>(c.rows());
  const int blk = p.add_block(n);
  p.objective_blocks.push_back({blk, c});
  sdp::Constraint trace;
  trace.block_terms.push_back({blk, CMat::Identity(n, n)});
  trace.rel = sdp::Relation::Eq;
  trace.rhs = 1.0;
  p.constraints.push_back(trace);
  return p;
}

// Random feasible-by-construction instance: one Hermitian block with
// equality constraints whose right-hand sides come from a strictly interior
// point, solvable independently by the barrier oracle.
struct ConstrainedInstance {
  sdp::SdpProblem problem;
  oracle::IpmProblem reference;
};

ConstrainedInstance random_constrained(int n, int m, Rng& rng) {
  ConstrainedInstance inst;
  const CMat c = oracle::random_hermitian(n, rng);
  const CMat x0 = oracle::random_psd(n, rng, 0.3);

  const int blk = inst.problem.add_block(n);
  inst.problem.objective_blocks.push_back({blk, c});
  inst.reference.c = c;
  inst.reference.strictly_feasible_start = x0;
  inst.reference.rhs.resize(m);
  for (int k = 0; k < m; ++k) {
    const CMat a = oracle::random_hermitian(n, rng);
    const double b = (a.adjoint() * x0).real().trace();
    sdp::Constraint con;
    con.block_terms.push_back({blk, a});
    con.rel = sdp::Relation::Eq;
    con.rhs = b;
    inst.problem.constraints.push_back(con);
    inst.reference.constraints.push_back(a);
    inst.reference.rhs[k] = b;
  }
  // Keep the feasible set bounded: pin the trace as well.
  sdp::Constraint trace;
  trace.block_terms.push_back({blk, CMat::Identity(n, n)});
  trace.rel = sdp::Relation::Eq;
  trace.rhs = x0.real().trace();
  inst.problem.constraints.push_back(trace);
  inst.reference.constraints.push_back(CMat::Identity(n, n));
  inst.reference.rhs.conservativeResize(m + 1);
  inst.reference.rhs[m] = x0.real().trace();
  return inst;
}

}  // namespace

TEST_CASE("eigenvalue-form instances hit lambda_max") {
  Rng rng(201);
  for (int trial = 0; trial < 12; ++trial) {
    const int n = 2 + static_cast<int>(rng.uniform_index(15));
    const CMat c = oracle::random_hermitian(n, rng);
    Eigen::SelfAdjointEigenSolver<CMat> es(c, Eigen::EigenvaluesOnly);
    const auto sol = sdp::solve(eigenvalue_problem(c));
    REQUIRE(sol.status == sdp::SolveStatus::Optimal);
    CHECK(std::abs(sol.objective_value - es.eigenvalues().maxCoeff()) < 1e-6);
    CHECK(sol.max_constraint_residual <= 1e-7);
    CHECK(sol.min_eigenvalue >= -1e-8);
  }
}

TEST_CASE("one-dimensional block pins to its equality") {
  sdp::SdpProblem p;
  const int blk = p.add_block(1);
  p.objective_blocks.push_back({blk, CMat::Ones(1, 1)});
  sdp::Constraint con;
  con.block_terms.push_back({blk, CMat::Ones(1, 1)});
  con.rel = sdp::Relation::Eq;
  con.rhs = 0.7;
  p.constraints.push_back(con);
  const auto sol = sdp::solve(p);
  REQUIRE(sol.status == sdp::SolveStatus::Optimal);
  CHECK(sol.block_values[0](0, 0).real() == doctest::Approx(0.7).epsilon(1e-6));
}

TEST_CASE("constrained 3x3 instances agree with the barrier oracle") {
  Rng rng(202);
  for (int trial = 0; trial < 10; ++trial) {
    auto inst = random_constrained(3, 2, rng);
    const double reference = oracle::ipm_solve(inst.reference);
    const auto sol = sdp::solve(inst.problem);
    REQUIRE(sol.status == sdp::SolveStatus::Optimal);
    CHECK(std::abs(sol.objective_value - reference) <
          1e-4 * std::max(1.0, std::abs(reference)));
  }
}

TEST_CASE("scalars, inequalities and slack handling") {
  // maximize x0 + 2 x1 s.t. x0 + x1 <= 1, x1 <= 0.4, x >= 0.
  sdp::SdpProblem p;
  const int s0 = p.add_scalar();
  const int s1 = p.add_scalar();
  p.objective_scalars.push_back({s0, 1.0});
  p.objective_scalars.push_back({s1, 2.0});
  sdp::Constraint c1;
  c1.scalar_terms = {{s0, 1.0}, {s1, 1.0}};
  c1.rel = sdp::Relation::Le;
  c1.rhs = 1.0;
  sdp::Constraint c2;
  c2.scalar_terms = {{s1, 1.0}};
  c2.rel = sdp::Relation::Le;
  c2.rhs = 0.4;
  p.constraints = {c1, c2};
  const auto sol = sdp::solve(p);
  REQUIRE(sol.status == sdp::SolveStatus::Optimal);
  CHECK(sol.scalar_values[0] == doctest::Approx(0.6).epsilon(1e-4));
  CHECK(sol.scalar_values[1] == doctest::Approx(0.4).epsilon(1e-4));
}

TEST_CASE("infeasibility is detected, not silently returned") {
  SUBCASE("inconsistent equalities") {
    sdp::SdpProblem p;
    const int blk = p.add_block(2);
    sdp::Constraint t1, t2;
    t1.block_terms.push_back({blk, CMat::Identity(2, 2)});
    t1.rel = sdp::Relation::Eq;
    t1.rhs = 1.0;
    t2.block_terms.push_back({blk, CMat::Identity(2, 2)});
    t2.rel = sdp::Relation::Eq;
    t2.rhs = 2.0;
    p.constraints = {t1, t2};
    const auto sol = sdp::solve(p);
    CHECK(sol.status == sdp::SolveStatus::Infeasible);
  }
  SUBCASE("cone-affine conflict: nonnegative scalar pinned negative") {
    sdp::SdpProblem p;
    const int s = p.add_scalar();
    p.objective_scalars.push_back({s, 1.0});
    sdp::Constraint con;
    con.scalar_terms.push_back({s, 1.0});
    con.rel = sdp::Relation::Eq;
    con.rhs = -1.0;
    p.constraints.push_back(con);
    sdp::SolveOptions opts;
    opts.max_iter = 30000;
    const auto sol = sdp::solve(p, opts);
    CHECK(sol.status != sdp::SolveStatus::Optimal);
    CHECK(sol.status == sdp::SolveStatus::Infeasible);
  }
}

TEST_CASE("real embedding and direct complex lowering agree") {
  Rng rng(203);
  for (int trial = 0; trial < 6; ++trial) {
    auto inst = random_constrained(4, 2, rng);
    sdp::SolveOptions embed_opts;
    sdp::SolveOptions complex_opts;
    complex_opts.complex_mode = true;
    const auto a = sdp::solve(inst.problem, embed_opts);
    const auto b = sdp::solve(inst.problem, complex_opts);
    REQUIRE(a.status == sdp::SolveStatus::Optimal);
    REQUIRE(b.status == sdp::SolveStatus::Optimal);
    CHECK(std::abs(a.objective_value - b.objective_value) <
          1e-8 * std::max(1.0, std::abs(a.objective_value)) + 1e-8);
  }
}

TEST_CASE("returned solutions satisfy the feasibility certificates") {
  Rng rng(204);
  for (int trial = 0; trial < 8; ++trial) {
    auto inst = random_constrained(3 + static_cast<int>(rng.uniform_index(3)),
                                   2, rng);
    const auto sol = sdp::solve(inst.problem);
    REQUIRE(sol.status == sdp::SolveStatus::Optimal);
    for (std::size_t k = 0; k < inst.problem.constraints.size(); ++k) {
      const auto& con = inst.problem.constraints[k];
      const double v =
          (con.block_terms[0].coeff.adjoint() * sol.block_values[0])
              .real()
              .trace();
      CHECK(std::abs(v - con.rhs) <= 1e-6 * std::max(1.0, std::abs(con.rhs)));
    }
    Eigen::SelfAdjointEigenSolver<CMat> es(sol.block_values[0],
                                           Eigen::EigenvaluesOnly);
    CHECK(es.eigenvalues().minCoeff() >= -1e-8);
  }
}

TEST_CASE("rank-1 extraction") {
  Rng rng(205);

  SUBCASE("exact rank-1 input returns its factor") {
    const CVec v = oracle::random_unit(5, rng) * 1.3;
    const CMat x = v * v.adjoint();
    sdp::SdpProblem p = eigenvalue_problem(CMat::Identity(5, 5));
    const auto res = sdp::rank1_extract(x, p, 0);
    CHECK_FALSE(res.randomized);
    CHECK(res.quality == doctest::Approx(1.0));
    const CMat back = res.w * res.w.adjoint();
    CHECK((back - x).norm() < 1e-8 * x.norm());
  }

  SUBCASE("maximally spread input yields a feasible unit-trace candidate") {
    const int n = 6;
    const CMat x = CMat::Identity(n, n) / static_cast<double>(n);
    sdp::SdpProblem p = eigenvalue_problem(oracle::random_hermitian(n, rng));
    const auto res = sdp::rank1_extract(x, p, 0, 99, 500);
    CHECK(res.randomized);
    CHECK(res.quality <= 1.0);
    CHECK(res.quality > 0.0);
    CHECK(res.w.squaredNorm() == doctest::Approx(1.0).epsilon(1e-10));
  }

  SUBCASE("randomization beats the bare top eigenvector on rank-2 inputs") {
    int wins = 0;
    const int trials = 100;
    for (int trial = 0; trial < trials; ++trial) {
      const int n = 5;
      CVec v1 = oracle::random_unit(n, rng);
      CVec v2 = oracle::random_unit(n, rng);
      const CMat x = 0.55 * v1 * v1.adjoint() + 0.45 * v2 * v2.adjoint();
      const CMat c = oracle::random_hermitian(n, rng);
      sdp::SdpProblem p = eigenvalue_problem(c);
      const auto res = sdp::rank1_extract(x, p, 0, 1000 + trial, 1000);
      Eigen::SelfAdjointEigenSolver<CMat> es(x);
      CVec top = es.eigenvectors().col(n - 1) *
                 std::sqrt(es.eigenvalues()(n - 1));
      top *= std::sqrt(x.real().trace()) / top.norm();
      const double direct = (top.adjoint() * c * top).real()(0, 0);
      const double randomized = (res.w.adjoint() * c * res.w).real()(0, 0);
      if (randomized >= direct - 1e-12) ++wins;
    }
    CHECK(wins >= 90);
  }

  SUBCASE("nulling constraints are honored by candidates") {
    const int n = 6;
    Rng local(7);
    const CVec dir = oracle::random_unit(n, local);
    const CMat g = dir * dir.adjoint();
    sdp::SdpProblem p;
    const int blk = p.add_block(n);
    p.objective_blocks.push_back({blk, oracle::random_hermitian(n, local)});
    sdp::Constraint null_con;
    null_con.block_terms.push_back({blk, g});
    null_con.rel = sdp::Relation::Le;
    null_con.rhs = 1e-12;
    sdp::Constraint trace;
    trace.block_terms.push_back({blk, CMat::Identity(n, n)});
    trace.rel = sdp::Relation::Eq;
    trace.rhs = 1.0;
    p.constraints = {null_con, trace};
    const CMat spread = CMat::Identity(n, n) / static_cast<double>(n);
    const auto res = sdp::rank1_extract(spread, p, blk, 3, 400);
    CHECK(std::abs((dir.adjoint() * res.w)(0, 0)) < 1e-7);
    CHECK(res.w.squaredNorm() == doctest::Approx(1.0).epsilon(1e-9));
  }

  SUBCASE("non-PSD input rejected") {
    CMat bad = CMat::Identity(3, 3);
    bad(2, 2) = -1.0;
    sdp::SdpProblem p = eigenvalue_problem(CMat::Identity(3, 3));
    CHECK_THROWS_AS(sdp::rank1_extract(bad, p, 0), DimensionError);
  }
}

TEST_CASE("problem dump/load round trip") {
  Rng rng(206);
  auto inst = random_constrained(3, 2, rng);
  inst.problem.add_scalar();
  inst.problem.objective_scalars.push_back({0, 0.25});

  std::stringstream ss;
  sdp::dump_problem(ss, inst.problem);
  const sdp::SdpProblem back = sdp::load_problem(ss);
  REQUIRE(back.block_dims == inst.problem.block_dims);
  REQUIRE(back.scalar_count == inst.problem.scalar_count);
  REQUIRE(back.constraints.size() == inst.problem.constraints.size());
  const auto s1 = sdp::solve(inst.problem);
  const auto s2 = sdp::solve(back);
  CHECK(std::abs(s1.objective_value - s2.objective_value) < 1e-9);
}
