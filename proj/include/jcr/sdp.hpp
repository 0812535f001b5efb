// Small dense semidefinite programs in a single normal form: maximize a
// linear functional of complex Hermitian PSD blocks and nonnegative scalars
// subject to linear trace constraints. Solved by operator splitting:
// alternating projection onto the affine constraint set (tilted by the
// objective) and onto the PSD cone, with over-relaxation and dual updates.
// Complex blocks are lowered to the 2n x 2n real symmetric embedding by
// default; a direct complex-arithmetic lowering exists as a cross-check route.
#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace jcr::sdp {

using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;

enum class Relation { Eq, Le, Ge };

struct BlockTerm {
  int block = 0;
  CMat coeff;  // Hermitian
};

struct ScalarTerm {
  int scalar = 0;
  double coeff = 0.0;
};

struct Constraint {
  std::vector<BlockTerm> block_terms;
  std::vector<ScalarTerm> scalar_terms;
  Relation rel = Relation::Eq;
  double rhs = 0.0;
};

struct SdpProblem {
  std::vector<int> block_dims;
  int scalar_count = 0;
  std::vector<BlockTerm> objective_blocks;   // maximize sum <C_i, X_i> + c.s
  std::vector<ScalarTerm> objective_scalars;
  std::vector<Constraint> constraints;

  int add_block(int dim) {
    block_dims.push_back(dim);
    return static_cast<int>(block_dims.size()) - 1;
  }
  int add_scalar() { return scalar_count++; }

  // Throws DimensionError when a coefficient is not Hermitian or indices are
  // out of range.
  void validate() const;
};

enum class SolveStatus { Optimal, Infeasible, MaxIter };

struct SdpSolution {
  std::vector<CMat> block_values;  // Hermitian PSD
  std::vector<double> scalar_values;
  double objective_value = 0.0;
  SolveStatus status = SolveStatus::MaxIter;
  double max_constraint_residual = 0.0;  // original units
  double min_eigenvalue = 0.0;           // most negative eigenvalue returned
  int iterations = 0;
  std::string message;
};

struct SolveOptions {
  double tol_feas = 1e-7;
  double tol_gap = 1e-6;
  int max_iter = 60000;
  double rho = 1.0;
  double over_relax = 1.7;
  bool complex_mode = false;  // direct complex lowering (cross-check route)
};

SdpSolution solve(const SdpProblem& problem, const SolveOptions& opts = {});

struct Rank1Result {
  CVec w;
  double quality = 1.0;  // achieved / relaxed objective, clamped to (0, 1]
  bool randomized = false;
};

// Recover a rank-1 factor of block `block_index`. Near-rank-1 inputs take the
// dominant eigenvector directly; otherwise K Gaussian candidates colored by X
// are projected onto the null directions demanded by zero-RHS equality
// constraints, rescaled to the block's trace constraint, filtered on the
// remaining constraints and ranked by the original objective.
Rank1Result rank1_extract(const CMat& x, const SdpProblem& problem,
                          int block_index, std::uint64_t seed = 1,
                          int num_candidates = 1000);

// Debug dump/load (text, documented in the writer). Not a stability surface.
void dump_problem(std::ostream& os, const SdpProblem& problem);
SdpProblem load_problem(std::istream& is);

}  // namespace jcr::sdp
