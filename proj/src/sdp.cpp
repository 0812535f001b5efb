#include "jcr/sdp.hpp"

#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "jcr/errors.hpp"
#include "jcr/rng.hpp"

namespace jcr::sdp {

namespace {

constexpr double kSqrt2 = 1.4142135623730950488;

int svec_len(int d) { return d * (d + 1) / 2; }

void svec(const Eigen::MatrixXd& m, double* out) {
  const int d = static_cast<int>(m.rows());
  int k = 0;
  for (int c = 0; c < d; ++c)
    for (int r = c; r < d; ++r)
      out[k++] = r == c ? m(r, c) : kSqrt2 * m(r, c);
}

void unsvec(const double* in, Eigen::MatrixXd& m) {
  const int d = static_cast<int>(m.rows());
  int k = 0;
  for (int c = 0; c < d; ++c)
    for (int r = c; r < d; ++r) {
      const double v = in[k++];
      if (r == c) {
        m(r, c) = v;
      } else {
        m(r, c) = v / kSqrt2;
        m(c, r) = m(r, c);
      }
    }
}

// Complex Hermitian vectorization: per column the real diagonal entry, then
// sqrt(2)-scaled re/im of the strictly-lower entries. Inner products of two
// vectorizations equal Tr(A X) for Hermitian pairs.
int cvec_len(int n) { return n * n; }

void cvec(const CMat& x, double* out) {
  const int n = static_cast<int>(x.rows());
  int k = 0;
  for (int c = 0; c < n; ++c) {
    out[k++] = x(c, c).real();
    for (int r = c + 1; r < n; ++r) {
      out[k++] = kSqrt2 * x(r, c).real();
      out[k++] = kSqrt2 * x(r, c).imag();
    }
  }
}

void uncvec(const double* in, CMat& x) {
  const int n = static_cast<int>(x.rows());
  int k = 0;
  for (int c = 0; c < n; ++c) {
    x(c, c) = std::complex<double>(in[k++], 0.0);
    for (int r = c + 1; r < n; ++r) {
      const double re = in[k++] / kSqrt2;
      const double im = in[k++] / kSqrt2;
      x(r, c) = {re, im};
      x(c, r) = {re, -im};
    }
  }
}

Eigen::MatrixXd embed(const CMat& a) {
  const int n = static_cast<int>(a.rows());
  Eigen::MatrixXd y(2 * n, 2 * n);
  y.topLeftCorner(n, n) = a.real();
  y.bottomRightCorner(n, n) = a.real();
  y.topRightCorner(n, n) = -a.imag();
  y.bottomLeftCorner(n, n) = a.imag();
  return y;
}

CMat unembed(const Eigen::MatrixXd& y) {
  const int n = static_cast<int>(y.rows()) / 2;
  const Eigen::MatrixXd re =
      0.5 * (y.topLeftCorner(n, n) + y.bottomRightCorner(n, n));
  const Eigen::MatrixXd im =
      0.5 * (y.bottomLeftCorner(n, n) - y.topRightCorner(n, n));
  CMat x(n, n);
  x.real() = re;
  x.imag() = im;
  // Exact Hermitian symmetrization.
  return 0.5 * (x + x.adjoint());
}

struct Lowering {
  struct Blk {
    int cdim = 0;
    int offset = 0;
    int len = 0;
    bool has_face = false;
    CMat face;              // projector onto the allowed range (complex)
    Eigen::MatrixXd face_r; // embedded projector, real route
  };
  bool complex_mode = false;
  std::vector<Blk> blocks;
  int scalar_offset = 0;
  int user_scalars = 0;
  int slack_scalars = 0;
  int n = 0;

  Lowering(const SdpProblem& p, bool cmode, int slacks,
           const std::vector<CMat>& faces)
      : complex_mode(cmode) {
    int off = 0;
    for (std::size_t i = 0; i < p.block_dims.size(); ++i) {
      const int d = p.block_dims[i];
      Blk b;
      b.cdim = d;
      b.offset = off;
      b.len = cmode ? cvec_len(d) : svec_len(2 * d);
      if (faces[i].size() > 0) {
        b.has_face = true;
        b.face = faces[i];
        if (!cmode) b.face_r = embed(faces[i]);
      }
      off += b.len;
      blocks.push_back(b);
    }
    scalar_offset = off;
    user_scalars = p.scalar_count;
    slack_scalars = slacks;
    n = off + user_scalars + slack_scalars;
  }

  // The complex lowering carries an extra sqrt(2) on the iterate coordinates
  // (and 1/sqrt(2) on coefficients) so that it is exactly isometric to the
  // real-embedding lowering: both routes then see identical scaled data and
  // walk identical trajectories up to eigensolver rounding.
  //
  // Coefficients of face-restricted blocks are sandwiched by the face
  // projector: <A, X> = <PAP, X> on the face, and normalizing against the
  // face-visible energy keeps objectives that live far below the ambient
  // scale fully resolvable.
  void add_block_coeff(Eigen::VectorXd& row, const BlockTerm& t) const {
    const Blk& b = blocks[t.block];
    const CMat coeff =
        b.has_face ? CMat(b.face * t.coeff * b.face) : t.coeff;
    Eigen::VectorXd tmp(b.len);
    if (complex_mode) {
      cvec(coeff, tmp.data());
      tmp /= kSqrt2;
    } else {
      Eigen::MatrixXd e = 0.5 * embed(coeff);
      svec(e, tmp.data());
    }
    row.segment(b.offset, b.len) += tmp;
  }

  CMat read_block(const Eigen::VectorXd& x, int i) const {
    const Blk& b = blocks[i];
    if (complex_mode) {
      const Eigen::VectorXd seg = x.segment(b.offset, b.len) / kSqrt2;
      CMat m(b.cdim, b.cdim);
      uncvec(seg.data(), m);
      return m;
    }
    Eigen::MatrixXd y(2 * b.cdim, 2 * b.cdim);
    unsvec(x.data() + b.offset, y);
    return unembed(y);
  }

  // Projects the block segment of v onto the PSD cone (or the face of it
  // demanded by recognized zero-RHS nulling constraints) in place; returns
  // the smallest eigenvalue seen before clamping.
  double project_block(Eigen::VectorXd& v, int i) const {
    const Blk& b = blocks[i];
    double min_eig = 0.0;
    if (complex_mode) {
      const Eigen::VectorXd seg = v.segment(b.offset, b.len) / kSqrt2;
      CMat m(b.cdim, b.cdim);
      uncvec(seg.data(), m);
      if (b.has_face) m = b.face * m * b.face;
      Eigen::SelfAdjointEigenSolver<CMat> es(m);
      min_eig = es.eigenvalues().minCoeff();
      const Eigen::VectorXd lam = es.eigenvalues().cwiseMax(0.0);
      const CMat proj = es.eigenvectors() * lam.asDiagonal() *
                        es.eigenvectors().adjoint();
      cvec(proj, v.data() + b.offset);
      v.segment(b.offset, b.len) *= kSqrt2;
    } else {
      Eigen::MatrixXd y(2 * b.cdim, 2 * b.cdim);
      unsvec(v.data() + b.offset, y);
      if (b.has_face) y = b.face_r * y * b.face_r;
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(y);
      min_eig = es.eigenvalues().minCoeff();
      const Eigen::VectorXd lam = es.eigenvalues().cwiseMax(0.0);
      const Eigen::MatrixXd proj = es.eigenvectors() * lam.asDiagonal() *
                                   es.eigenvectors().transpose();
      svec(proj, v.data() + b.offset);
    }
    return min_eig;
  }
};

// A constraint pins a block to a face of the PSD cone when it bounds a PSD
// quadratic form by (numerically) zero: Tr(G X) <= delta with G PSD forces
// range(X) into null(G). Treating it structurally inside the cone projection
// keeps the iteration well conditioned; a delta-width slack row makes the
// active set degenerate and drags the splitting into a sublinear tail.
bool is_face_constraint(const Constraint& con, const std::vector<int>& dims) {
  if (!con.scalar_terms.empty() || con.block_terms.size() != 1) return false;
  if (con.rel == Relation::Ge) return false;
  const CMat& g = con.block_terms[0].coeff;
  const int d = dims[con.block_terms[0].block];
  Eigen::SelfAdjointEigenSolver<CMat> es(g, Eigen::EigenvaluesOnly);
  const double g_max = es.eigenvalues().cwiseAbs().maxCoeff();
  if (g_max <= 0.0) return false;
  if (es.eigenvalues().minCoeff() < -1e-10 * g_max) return false;
  const double trace_scale = g.real().trace() / static_cast<double>(d);
  return con.rhs >= 0.0 && con.rhs <= 1e-6 * trace_scale;
}

void check_hermitian(const CMat& a, const char* what) {
  if (a.rows() != a.cols())
    throw DimensionError(std::string(what) + ": coefficient must be square");
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  if ((a - a.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * scale)
    throw DimensionError(std::string(what) + ": coefficient not Hermitian");
}

}  // namespace

void SdpProblem::validate() const {
  auto check_terms = [this](const std::vector<BlockTerm>& bts,
                            const std::vector<ScalarTerm>& sts,
                            const char* what) {
    for (const auto& t : bts) {
      if (t.block < 0 || t.block >= static_cast<int>(block_dims.size()))
        throw DimensionError(std::string(what) + ": block index out of range");
      if (t.coeff.rows() != block_dims[t.block])
        throw DimensionError(std::string(what) +
                             ": coefficient dimension mismatch");
      check_hermitian(t.coeff, what);
    }
    for (const auto& t : sts)
      if (t.scalar < 0 || t.scalar >= scalar_count)
        throw DimensionError(std::string(what) + ": scalar index out of range");
  };
  for (int d : block_dims)
    if (d < 1) throw DimensionError("block dimension must be >= 1");
  check_terms(objective_blocks, objective_scalars, "objective");
  for (const auto& con : constraints)
    check_terms(con.block_terms, con.scalar_terms, "constraint");
}

SdpSolution solve(const SdpProblem& problem, const SolveOptions& opts) {
  problem.validate();

  const int n_blocks = static_cast<int>(problem.block_dims.size());
  std::vector<char> is_face(problem.constraints.size(), 0);
  std::vector<std::vector<CVec>> face_dirs(n_blocks);
  for (std::size_t i = 0; i < problem.constraints.size(); ++i) {
    const Constraint& con = problem.constraints[i];
    if (!is_face_constraint(con, problem.block_dims)) continue;
    is_face[i] = 1;
    const CMat& g = con.block_terms[0].coeff;
    Eigen::SelfAdjointEigenSolver<CMat> es(g);
    const double g_max = es.eigenvalues().cwiseAbs().maxCoeff();
    for (int k = 0; k < es.eigenvalues().size(); ++k)
      if (es.eigenvalues()[k] > 1e-10 * g_max)
        face_dirs[con.block_terms[0].block].push_back(es.eigenvectors().col(k));
  }
  std::vector<CMat> faces(n_blocks);
  for (int blk = 0; blk < n_blocks; ++blk) {
    if (face_dirs[blk].empty()) continue;
    const int d = problem.block_dims[blk];
    CMat dirs(d, static_cast<int>(face_dirs[blk].size()));
    for (int k = 0; k < dirs.cols(); ++k) dirs.col(k) = face_dirs[blk][k];
    Eigen::JacobiSVD<CMat> svd(dirs, Eigen::ComputeThinU);
    int rank = 0;
    for (int k = 0; k < svd.singularValues().size(); ++k)
      if (svd.singularValues()[k] > 1e-10 * svd.singularValues()[0]) ++rank;
    const CMat uu = svd.matrixU().leftCols(rank);
    faces[blk] = CMat::Identity(d, d) - uu * uu.adjoint();
  }

  int slacks = 0;
  int m = 0;
  for (std::size_t i = 0; i < problem.constraints.size(); ++i) {
    if (is_face[i]) continue;
    ++m;
    if (problem.constraints[i].rel != Relation::Eq) ++slacks;
  }

  const Lowering low(problem, opts.complex_mode, slacks, faces);
  const int n = low.n;

  Eigen::VectorXd c = Eigen::VectorXd::Zero(n);
  for (const auto& t : problem.objective_blocks) low.add_block_coeff(c, t);
  for (const auto& t : problem.objective_scalars)
    c[low.scalar_offset + t.scalar] += t.coeff;

  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m, n);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(m);
  {
    int slack = 0;
    int row_idx = 0;
    for (std::size_t i = 0; i < problem.constraints.size(); ++i) {
      if (is_face[i]) continue;
      const Constraint& con = problem.constraints[i];
      Eigen::VectorXd row = Eigen::VectorXd::Zero(n);
      for (const auto& t : con.block_terms) low.add_block_coeff(row, t);
      for (const auto& t : con.scalar_terms)
        row[low.scalar_offset + t.scalar] += t.coeff;
      if (con.rel == Relation::Le)
        row[low.scalar_offset + low.user_scalars + slack++] = 1.0;
      else if (con.rel == Relation::Ge)
        row[low.scalar_offset + low.user_scalars + slack++] = -1.0;
      a.row(row_idx) = row;
      b[row_idx] = con.rhs;
      ++row_idx;
    }
  }

  SdpSolution sol;
  sol.scalar_values.assign(problem.scalar_count, 0.0);

  // Row scaling; zero rows are either vacuous or immediately infeasible.
  Eigen::VectorXd row_scale = Eigen::VectorXd::Ones(m);
  for (int i = 0; i < m; ++i) {
    const double norm = a.row(i).norm();
    if (norm < 1e-300) {
      if (std::abs(b[i]) > 1e-12) {
        sol.status = SolveStatus::Infeasible;
        sol.message = "constraint " + std::to_string(i) +
                      " has zero coefficients and nonzero rhs";
        for (int bi = 0; bi < static_cast<int>(problem.block_dims.size());
             ++bi)
          sol.block_values.push_back(
              CMat::Zero(problem.block_dims[bi], problem.block_dims[bi]));
        return sol;
      }
      continue;
    }
    row_scale[i] = norm;
    a.row(i) /= norm;
    b[i] /= norm;
  }

  const double c_norm = c.norm();
  const Eigen::VectorXd c_scaled = c_norm > 0.0 ? (c / c_norm).eval() : c;

  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> gram_cod;
  if (m > 0) {
    gram_cod.compute(a * a.transpose());
    // Affine consistency: the least-squares point must satisfy Ax = b.
    const Eigen::VectorXd x_ls = a.transpose() * gram_cod.solve(b);
    const double res = (a * x_ls - b).cwiseAbs().maxCoeff();
    if (res > 1e-9 * std::max(1.0, b.cwiseAbs().maxCoeff())) {
      sol.status = SolveStatus::Infeasible;
      sol.message = "equality constraints are mutually inconsistent";
      for (int bi = 0; bi < static_cast<int>(problem.block_dims.size()); ++bi)
        sol.block_values.push_back(
            CMat::Zero(problem.block_dims[bi], problem.block_dims[bi]));
      return sol;
    }
  }

  auto affine_project = [&](const Eigen::VectorXd& w) -> Eigen::VectorXd {
    if (m == 0) return w;
    return w - a.transpose() * gram_cod.solve(a * w - b);
  };

  const double alpha = opts.over_relax;
  double rho = opts.rho;
  Eigen::VectorXd z = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd u = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd x(n), xhat(n), z_prev(n);

  const double b_inf = m > 0 ? b.cwiseAbs().maxCoeff() : 0.0;
  double best_primal = std::numeric_limits<double>::infinity();
  double checkpoint_primal = std::numeric_limits<double>::infinity();
  double checkpoint_dual_norm = 0.0;
  const int checkpoint_every = std::max(2000, opts.max_iter / 10);

  int it = 0;
  bool converged = false;
  double r_prim = 0.0, min_eig_seen = 0.0;
  for (it = 1; it <= opts.max_iter; ++it) {
    x = affine_project(z - u + c_scaled / rho);
    xhat = alpha * x + (1.0 - alpha) * z;
    z_prev = z;
    z = xhat + u;
    min_eig_seen = 0.0;
    for (int bi = 0; bi < static_cast<int>(low.blocks.size()); ++bi)
      min_eig_seen = std::min(min_eig_seen, low.project_block(z, bi));
    for (int s = low.scalar_offset; s < n; ++s)
      if (z[s] < 0.0) z[s] = 0.0;
    u += xhat - z;

    // Residuals in original units.
    r_prim = 0.0;
    if (m > 0) {
      const Eigen::VectorXd viol = a * z - b;
      for (int i = 0; i < m; ++i)
        r_prim = std::max(r_prim, std::abs(viol[i]) * row_scale[i]);
    }
    best_primal = std::min(best_primal, r_prim);
    const double z_scale = std::max(1.0, z.cwiseAbs().maxCoeff());
    const double r_cons = (x - z).cwiseAbs().maxCoeff();
    const double r_dual = rho * (z - z_prev).cwiseAbs().maxCoeff();

    if (r_prim <= opts.tol_feas * std::max(1.0, b_inf) &&
        r_cons <= 10.0 * opts.tol_feas * z_scale &&
        r_dual <= 0.02 * opts.tol_gap * z_scale) {
      converged = true;
      break;
    }

    if (z_scale > 1e12 * std::max(1.0, b_inf)) {
      sol.message = "iterates diverged (problem may be unbounded)";
      break;
    }

    if (it % 200 == 0) {
      // Residual balancing.
      const double pn = (x - z).norm();
      const double dn = rho * (z - z_prev).norm();
      if (pn > 10.0 * dn && dn > 0.0) {
        rho *= 1.8;
        u /= 1.8;
      } else if (dn > 10.0 * pn && pn > 0.0) {
        rho /= 1.8;
        u *= 1.8;
      }
    }

    if (it % checkpoint_every == 0) {
      const double u_norm = u.norm();
      const double infeas_floor =
          std::max(1e4 * opts.tol_feas, 1e-5) * std::max(1.0, b_inf);
      if (it >= 2 * checkpoint_every && r_prim > infeas_floor &&
          r_prim > 0.97 * checkpoint_primal &&
          u_norm > 1.3 * checkpoint_dual_norm) {
        sol.status = SolveStatus::Infeasible;
        sol.message =
            "primal residual stalled at " + std::to_string(r_prim) +
            " while the dual diverged; constraint set appears infeasible";
        break;
      }
      checkpoint_primal = r_prim;
      checkpoint_dual_norm = u_norm;
    }
  }

  sol.iterations = std::min(it, opts.max_iter);
  for (int bi = 0; bi < static_cast<int>(problem.block_dims.size()); ++bi)
    sol.block_values.push_back(low.read_block(z, bi));
  for (int s = 0; s < problem.scalar_count; ++s)
    sol.scalar_values[s] = z[low.scalar_offset + s];
  sol.objective_value = c.dot(z);
  sol.max_constraint_residual = r_prim;
  for (std::size_t i = 0; i < problem.constraints.size(); ++i) {
    if (!is_face[i]) continue;
    const Constraint& con = problem.constraints[i];
    const double val = (con.block_terms[0].coeff.adjoint() *
                        sol.block_values[con.block_terms[0].block])
                           .real()
                           .trace();
    const double viol = con.rel == Relation::Le ? std::max(0.0, val - con.rhs)
                                                : std::abs(val - con.rhs);
    sol.max_constraint_residual = std::max(sol.max_constraint_residual, viol);
  }
  {
    double min_eig = 0.0;
    for (const auto& blk : sol.block_values) {
      Eigen::SelfAdjointEigenSolver<CMat> es(blk,
                                             Eigen::EigenvaluesOnly);
      min_eig = std::min(min_eig, es.eigenvalues().minCoeff());
    }
    sol.min_eigenvalue = min_eig;
  }
  if (sol.status == SolveStatus::Infeasible) return sol;
  sol.status = converged ? SolveStatus::Optimal : SolveStatus::MaxIter;
  if (!converged && sol.message.empty())
    sol.message = "iteration cap reached before residuals met tolerances";
  return sol;
}

Rank1Result rank1_extract(const CMat& x, const SdpProblem& problem,
                          int block_index, std::uint64_t seed,
                          int num_candidates) {
  if (block_index < 0 ||
      block_index >= static_cast<int>(problem.block_dims.size()))
    throw DimensionError("rank1_extract: block index out of range");
  const int n = problem.block_dims[block_index];
  if (x.rows() != n || x.cols() != n)
    throw DimensionError("rank1_extract: matrix dimension mismatch");

  const CMat xs = 0.5 * (x + x.adjoint());
  Eigen::SelfAdjointEigenSolver<CMat> es(xs);
  const Eigen::VectorXd lam = es.eigenvalues();
  const double lam_max = lam.maxCoeff();
  if (lam_max <= 0.0)
    throw DimensionError("rank1_extract: input has no positive eigenvalue");
  if (lam.minCoeff() < -1e-6 * lam_max)
    throw DimensionError("rank1_extract: input is not PSD");

  // Objective restricted to this block.
  CMat c_blk = CMat::Zero(n, n);
  for (const auto& t : problem.objective_blocks)
    if (t.block == block_index) c_blk += t.coeff;
  const bool have_objective = c_blk.cwiseAbs().maxCoeff() > 0.0;
  auto block_objective = [&](const CMat& w) {
    return (c_blk * w).real().trace();
  };
  const double relaxed = block_objective(xs);

  auto finish = [&](CVec w, bool randomized) {
    Rank1Result res;
    res.w = std::move(w);
    res.randomized = randomized;
    const double achieved = block_objective(res.w * res.w.adjoint());
    const double floor =
        1e-12 * std::max(1.0, c_blk.cwiseAbs().maxCoeff() * lam_max *
                                  static_cast<double>(n));
    res.quality = std::abs(relaxed) < floor
                      ? 1.0
                      : std::min(1.0, std::max(1e-12, achieved / relaxed));
    return res;
  };

  const int top = static_cast<int>(lam.size()) - 1;  // ascending order
  const double lam2 = n > 1 ? lam[top - 1] : 0.0;
  if (n == 1 || lam2 / lam_max < 1e-6) {
    CVec w = std::sqrt(lam_max) * es.eigenvectors().col(top);
    return finish(std::move(w), false);
  }

  // Constraints restricted to this block. Zero-RHS PSD equalities force null
  // directions; candidates are projected onto the complement before the
  // rescale so "feasible candidate" is not a measure-zero event.
  double trace_target = xs.real().trace();
  std::vector<CVec> null_dirs;
  struct Check {
    CMat g;
    Relation rel;
    double rhs;
  };
  std::vector<Check> checks;
  for (const auto& con : problem.constraints) {
    if (!con.scalar_terms.empty()) continue;
    if (con.block_terms.size() != 1 ||
        con.block_terms[0].block != block_index)
      continue;
    const CMat& g = con.block_terms[0].coeff;
    const double g_scale = std::max(1e-300, g.cwiseAbs().maxCoeff());
    // Identity-coefficient trace constraint pins the rescale target.
    const bool is_identity =
        (g - g(0, 0) * CMat::Identity(n, n)).cwiseAbs().maxCoeff() <
        1e-10 * g_scale;
    if (is_identity && con.rel == Relation::Eq &&
        std::abs(g(0, 0).real()) > 0.0) {
      trace_target = con.rhs / g(0, 0).real();
      continue;
    }
    Eigen::SelfAdjointEigenSolver<CMat> ges(g);
    const double g_max = ges.eigenvalues().cwiseAbs().maxCoeff();
    const bool psd = ges.eigenvalues().minCoeff() >= -1e-10 * g_max;
    const bool zero_rhs =
        std::abs(con.rhs) <= 1e-8 * g_max * std::max(1.0, trace_target);
    if (psd && zero_rhs &&
        (con.rel == Relation::Eq || con.rel == Relation::Le)) {
      for (int i = 0; i < n; ++i)
        if (ges.eigenvalues()[i] > 1e-10 * g_max)
          null_dirs.push_back(ges.eigenvectors().col(i));
    } else {
      checks.push_back({g, con.rel, con.rhs});
    }
  }
  if (!(trace_target > 0.0))
    throw DimensionError("rank1_extract: nonpositive trace target");

  CMat null_proj = CMat::Identity(n, n);
  if (!null_dirs.empty()) {
    CMat d(n, static_cast<int>(null_dirs.size()));
    for (int i = 0; i < d.cols(); ++i) d.col(i) = null_dirs[i];
    Eigen::JacobiSVD<CMat> svd(d, Eigen::ComputeThinU);
    int rank = 0;
    for (int i = 0; i < svd.singularValues().size(); ++i)
      if (svd.singularValues()[i] > 1e-10 * svd.singularValues()[0]) ++rank;
    const CMat uu = svd.matrixU().leftCols(rank);
    null_proj -= uu * uu.adjoint();
  }

  const CMat coloring =
      es.eigenvectors() * lam.cwiseMax(0.0).cwiseSqrt().asDiagonal();
  Rng rng = Rng::child(seed, static_cast<std::uint64_t>(block_index));
  bool found = false;
  double best_obj = -std::numeric_limits<double>::infinity();
  CVec best_w;
  for (int k = 0; k < num_candidates; ++k) {
    CVec g(n);
    for (int i = 0; i < n; ++i) g(i) = rng.complex_gaussian();
    CVec w = null_proj * (coloring * g);
    const double norm2 = w.squaredNorm();
    if (norm2 < 1e-20 * trace_target) continue;
    w *= std::sqrt(trace_target / norm2);
    bool ok = true;
    for (const auto& chk : checks) {
      const double val = (w.adjoint() * chk.g * w).real()(0, 0);
      const double tol =
          1e-6 * std::max({1.0, std::abs(chk.rhs),
                           chk.g.cwiseAbs().maxCoeff() * trace_target});
      if ((chk.rel == Relation::Eq && std::abs(val - chk.rhs) > tol) ||
          (chk.rel == Relation::Le && val - chk.rhs > tol) ||
          (chk.rel == Relation::Ge && chk.rhs - val > tol)) {
        ok = false;
        break;
      }
    }
    if (!ok) continue;
    const double obj = have_objective
                           ? (w.adjoint() * c_blk * w).real()(0, 0)
                           : 0.0;
    if (!found || obj > best_obj) {
      found = true;
      best_obj = obj;
      best_w = w;
    }
    if (!have_objective) break;  // all candidates tie
  }
  if (!found)
    throw ExtractionError(
        "no feasible rank-1 candidate after " +
        std::to_string(num_candidates) +
        " randomization draws; retry with a larger candidate budget");
  return finish(std::move(best_w), true);
}

void dump_problem(std::ostream& os, const SdpProblem& p) {
  os.precision(17);
  os << "jcr-sdp 1\n";
  os << "blocks " << p.block_dims.size();
  for (int d : p.block_dims) os << " " << d;
  os << "\nscalars " << p.scalar_count << "\n";
  auto dump_terms = [&os](const std::vector<BlockTerm>& bts,
                          const std::vector<ScalarTerm>& sts) {
    os << bts.size() << " " << sts.size() << "\n";
    for (const auto& t : bts) {
      os << "block " << t.block << " " << t.coeff.rows() << "\n";
      for (int r = 0; r < t.coeff.rows(); ++r) {
        for (int c = 0; c < t.coeff.cols(); ++c) {
          if (c) os << " ";
          os << t.coeff(r, c).real() << " " << t.coeff(r, c).imag();
        }
        os << "\n";
      }
    }
    for (const auto& t : sts) os << "scalar " << t.scalar << " " << t.coeff << "\n";
  };
  os << "objective ";
  dump_terms(p.objective_blocks, p.objective_scalars);
  os << "constraints " << p.constraints.size() << "\n";
  for (const auto& con : p.constraints) {
    const char* rel = con.rel == Relation::Eq ? "eq"
                      : con.rel == Relation::Le ? "le"
                                                : "ge";
    os << "constraint " << rel << " " << con.rhs << " ";
    dump_terms(con.block_terms, con.scalar_terms);
  }
}

SdpProblem load_problem(std::istream& is) {
  auto fail = [](const std::string& why) -> SdpProblem {
    throw ConfigError("sdp problem parse error: " + why);
  };
  std::string word;
  int version = 0;
  is >> word >> version;
  if (word != "jcr-sdp" || version != 1) return fail("bad magic");
  SdpProblem p;
  std::size_t n_blocks = 0;
  is >> word >> n_blocks;
  if (word != "blocks") return fail("expected blocks");
  p.block_dims.resize(n_blocks);
  for (auto& d : p.block_dims) is >> d;
  is >> word >> p.scalar_count;
  if (word != "scalars") return fail("expected scalars");

  auto read_terms = [&](std::vector<BlockTerm>& bts,
                        std::vector<ScalarTerm>& sts) {
    std::size_t nb = 0, ns = 0;
    is >> nb >> ns;
    for (std::size_t i = 0; i < nb; ++i) {
      std::string kw;
      int block = 0, dim = 0;
      is >> kw >> block >> dim;
      if (kw != "block") fail("expected block term");
      BlockTerm t;
      t.block = block;
      t.coeff.resize(dim, dim);
      for (int r = 0; r < dim; ++r)
        for (int c = 0; c < dim; ++c) {
          double re = 0, im = 0;
          is >> re >> im;
          t.coeff(r, c) = {re, im};
        }
      bts.push_back(std::move(t));
    }
    for (std::size_t i = 0; i < ns; ++i) {
      std::string kw;
      ScalarTerm t;
      is >> kw >> t.scalar >> t.coeff;
      if (kw != "scalar") fail("expected scalar term");
      sts.push_back(t);
    }
  };

  is >> word;
  if (word != "objective") return fail("expected objective");
  read_terms(p.objective_blocks, p.objective_scalars);
  std::size_t n_cons = 0;
  is >> word >> n_cons;
  if (word != "constraints") return fail("expected constraints");
  for (std::size_t i = 0; i < n_cons; ++i) {
    std::string kw, rel;
    Constraint con;
    is >> kw >> rel >> con.rhs;
    if (kw != "constraint") return fail("expected constraint");
    con.rel = rel == "eq" ? Relation::Eq : rel == "le" ? Relation::Le
                                                        : Relation::Ge;
    read_terms(con.block_terms, con.scalar_terms);
    p.constraints.push_back(std::move(con));
  }
  if (!is) return fail("truncated input");
  return p;
}

}  // namespace jcr::sdp
