#include "jcr/beamforming.hpp"

#include <cmath>
#include <cstdio>

namespace jcr::beamforming {

namespace {

CMat gram(const CMat& h) { return h.adjoint() * h; }

// Relaxation width for zero-RHS trace equalities; exact zeros are numerically
// infeasible against rank-1 data, so the solver sees <= delta with delta tied
// to the constraint's own trace scale.
double zero_rhs_delta(const CMat& g) {
  const double scale = g.real().trace() / static_cast<double>(g.rows());
  return 1e-9 * std::max(scale, 1e-300);
}

sdp::Constraint trace_constraint(int block, int dim, double rhs) {
  sdp::Constraint con;
  con.block_terms.push_back({block, CMat::Identity(dim, dim)});
  con.rel = sdp::Relation::Eq;
  con.rhs = rhs;
  return con;
}

sdp::Constraint nulling_constraint(int block, const CMat& g) {
  sdp::Constraint con;
  con.block_terms.push_back({block, g});
  con.rel = sdp::Relation::Le;
  con.rhs = zero_rhs_delta(g);
  return con;
}

// Projects w onto the null space of g's range and renormalizes, eliminating
// the delta-level leak the relaxed solve leaves behind.
CVec polish_null(const CVec& w, const CMat& g) {
  Eigen::SelfAdjointEigenSolver<CMat> es(g);
  const double g_max = es.eigenvalues().cwiseAbs().maxCoeff();
  if (g_max <= 0.0) return w;
  CVec out = w;
  for (int i = 0; i < es.eigenvalues().size(); ++i) {
    if (es.eigenvalues()[i] > 1e-10 * g_max) {
      const CVec dir = es.eigenvectors().col(i);
      out -= dir * (dir.adjoint() * out)(0, 0);
    }
  }
  const double norm = out.norm();
  if (norm < 1e-12 * w.norm())
    throw InfeasibleError("nulling removed the whole candidate weight");
  return out * (w.norm() / norm);
}

CoopResult solve_numerator_problem(const CMat& objective_gram,
                                   const CMat& null_gram, int dim,
                                   const sdp::SolveOptions& opts,
                                   const char* label) {
  const bool has_null = null_gram.cwiseAbs().maxCoeff() > 0.0;
  if (has_null) {
    const CMat basis = transmit_null_basis({&null_gram});
    if (basis.cols() == 0)
      throw InfeasibleError(std::string(label) + ": nulled channels span all " +
                            std::to_string(dim) +
                            " transmit dimensions; no null space exists");
  }

  sdp::SdpProblem p;
  const int blk = p.add_block(dim);
  p.objective_blocks.push_back({blk, objective_gram});
  if (has_null) p.constraints.push_back(nulling_constraint(blk, null_gram));
  p.constraints.push_back(trace_constraint(blk, dim, 1.0));

  CoopResult res;
  res.raw = sdp::solve(p, opts);
  if (res.raw.status == sdp::SolveStatus::Infeasible)
    throw InfeasibleError(std::string(label) +
                          ": solver reported infeasible (" + res.raw.message +
                          ")");
  res.w = res.raw.block_values[0];
  auto extraction = sdp::rank1_extract(res.w, p, blk);
  res.weight = extraction.w;
  if (has_null) res.weight = polish_null(res.weight, null_gram);
  const double n2 = res.weight.norm();
  if (n2 > 0.0) res.weight /= n2;
  res.objective = res.raw.objective_value;
  return res;
}

}  // namespace

CMat transmit_null_basis(const std::vector<const CMat*>& channels) {
  if (channels.empty()) throw DimensionError("no channels given");
  const int dim = static_cast<int>(channels.front()->cols());
  CMat g = CMat::Zero(dim, dim);
  for (const CMat* h : channels) {
    if (h->cols() != dim)
      throw DimensionError("channel transmit dimensions differ");
    const bool is_gram =
        h->rows() == dim &&
        (*h - h->adjoint()).cwiseAbs().maxCoeff() <=
            1e-10 * std::max(1.0, h->cwiseAbs().maxCoeff());
    g += is_gram ? *h : gram(*h);
  }
  Eigen::SelfAdjointEigenSolver<CMat> es(g);
  const double g_max = es.eigenvalues().cwiseAbs().maxCoeff();
  std::vector<int> null_idx;
  for (int i = 0; i < dim; ++i)
    if (g_max <= 0.0 || es.eigenvalues()[i] <= 1e-10 * g_max)
      null_idx.push_back(i);
  CMat basis(dim, static_cast<int>(null_idx.size()));
  for (std::size_t i = 0; i < null_idx.size(); ++i)
    basis.col(static_cast<int>(i)) = es.eigenvectors().col(null_idx[i]);
  return basis;
}

CoopResult solve_coop_comm(const Scene& scene, const sdp::SolveOptions& opts) {
  scene.validate();
  return solve_numerator_problem(gram(scene.h_ab), gram(scene.h_ad),
                                 scene.comm_tx_count(), opts,
                                 "coop comm problem");
}

CoopResult solve_coop_radar(const Scene& scene,
                            const sdp::SolveOptions& opts) {
  scene.validate();
  const int dim = scene.radar_tx_count();
  CMat objective = CMat::Zero(dim, dim);
  for (const auto& h : scene.h_ld) objective += gram(h);
  CMat nulled = gram(scene.h_cb);
  for (const auto& h : scene.h_lb) nulled += gram(h);
  return solve_numerator_problem(objective, nulled, dim, opts,
                                 "coop radar problem");
}

CommCouplings compute_comm_couplings(const Scene& scene, const CMat& w_k) {
  CommCouplings k;
  k.k1 = 1.0 / scene.sigma2_b;
  k.k2 = 1.0 / (radar_interference_at_eve(scene, w_k) + scene.sigma2_e);
  return k;
}

sdp::SdpProblem build_comm_subproblem(const Scene& scene,
                                      const CMat& w_k_fixed) {
  scene.validate();
  const int dim = scene.comm_tx_count();
  const CommCouplings k = compute_comm_couplings(scene, w_k_fixed);

  sdp::SdpProblem p;
  const int blk = p.add_block(dim);  // U
  const int u = p.add_scalar();      // u

  p.objective_blocks.push_back({blk, k.k1 * gram(scene.h_ab)});
  p.objective_scalars.push_back({u, 1.0});

  // Charnes-Cooper normalization: u + k2 Tr(G_AE U) = 1.
  sdp::Constraint norm_con;
  norm_con.block_terms.push_back({blk, k.k2 * gram(scene.h_ae)});
  norm_con.scalar_terms.push_back({u, 1.0});
  norm_con.rel = sdp::Relation::Eq;
  norm_con.rhs = 1.0;
  p.constraints.push_back(norm_con);

  const CMat g_ad = gram(scene.h_ad);
  if (g_ad.cwiseAbs().maxCoeff() > 0.0)
    p.constraints.push_back(nulling_constraint(blk, g_ad));

  // Tr(U) - u = 0.
  sdp::Constraint tr_con;
  tr_con.block_terms.push_back({blk, CMat::Identity(dim, dim)});
  tr_con.scalar_terms.push_back({u, -1.0});
  tr_con.rel = sdp::Relation::Eq;
  tr_con.rhs = 0.0;
  p.constraints.push_back(tr_con);
  return p;
}

sdp::SdpProblem build_radar_subproblem(const Scene& scene,
                                       const CMat& w_ab_fixed, double r_th) {
  scene.validate();
  if (r_th < 0.0) throw DimensionError("r_th must be >= 0");
  // y3 = Tr(H_AE W_AB H_AE^H) is constant in W_k: it shifts the secrecy
  // objective but never reorders it, so the emitted problem does not carry
  // w_ab_fixed beyond this note.
  (void)w_ab_fixed;
  const int dim = scene.radar_tx_count();

  sdp::SdpProblem p;
  const int blk = p.add_block(dim);

  CMat eve_facing = gram(scene.h_ce);
  for (const auto& h : scene.h_le) eve_facing += gram(h);
  p.objective_blocks.push_back({blk, eve_facing});

  // Radar-rate floor in linear form: sum_l Tr(G_lD W) >= sigma_D^2 (2^r - 1).
  sdp::Constraint rate_con;
  CMat target_gram = CMat::Zero(dim, dim);
  for (const auto& h : scene.h_ld) target_gram += gram(h);
  rate_con.block_terms.push_back({blk, target_gram});
  rate_con.rel = sdp::Relation::Ge;
  rate_con.rhs = scene.sigma2_d * (std::exp2(r_th) - 1.0);
  p.constraints.push_back(rate_con);

  CMat bob_facing = gram(scene.h_cb);
  for (const auto& h : scene.h_lb) bob_facing += gram(h);
  if (bob_facing.cwiseAbs().maxCoeff() > 0.0)
    p.constraints.push_back(nulling_constraint(blk, bob_facing));

  p.constraints.push_back(trace_constraint(blk, dim, 1.0));
  return p;
}

double comm_subproblem_value(const Scene& scene, const CommCouplings& k,
                             const CMat& w_ab) {
  const double t_b = (scene.h_ab * w_ab * scene.h_ab.adjoint()).real().trace();
  const double t_e = (scene.h_ae * w_ab * scene.h_ae.adjoint()).real().trace();
  return std::log2(1.0 + k.k1 * t_b) - std::log2(1.0 + k.k2 * t_e);
}

namespace {

CMat null_projector_init(const CMat& nulled_gram, int dim, const char* label) {
  if (nulled_gram.cwiseAbs().maxCoeff() <= 0.0)
    return CMat::Identity(dim, dim) / static_cast<double>(dim);
  const CMat basis = transmit_null_basis({&nulled_gram});
  if (basis.cols() == 0)
    throw InfeasibleError(std::string(label) +
                          ": no feasible initial point, nulled channels span "
                          "the transmit space");
  CMat w = basis * basis.adjoint();
  return w / w.real().trace();
}

double secrecy_of(const Scene& scene, const CMat& w_ab, const CMat& w_k) {
  return secrecy_rate(sinr_bob(scene, w_ab, w_k),
                      sinr_eve_bounded(scene, w_ab, w_k));
}

}  // namespace

BeamformingSolution sca_solve(const PlsProblemSpec& spec) {
  if (spec.scene == nullptr) throw DimensionError("sca_solve needs a scene");
  const Scene& scene = *spec.scene;
  scene.validate();
  if (spec.r_th < 0.0) throw DimensionError("r_th must be >= 0");

  const int na = scene.comm_tx_count();
  const int nd = scene.radar_tx_count();

  CMat bob_facing = gram(scene.h_cb);
  for (const auto& h : scene.h_lb) bob_facing += gram(h);

  // Feasible initialization: trace-normalized projectors onto the null
  // spaces demanded by the two nulling equalities.
  CMat w_ab = null_projector_init(gram(scene.h_ad), na, "comm init");
  CMat w_k = null_projector_init(bob_facing, nd, "radar init");

  // Radar-rate feasibility under Bob nulling, checked before iterating.
  if (spec.r_th > 0.0) {
    const double required = scene.sigma2_d * (std::exp2(spec.r_th) - 1.0);
    const CoopResult best_return = solve_coop_radar(scene, spec.sdp_options);
    if (best_return.objective < required * (1.0 - 1e-9) - 1e-15) {
      char msg[256];
      std::snprintf(msg, sizeof(msg),
                    "radar-rate constraint infeasible: r_th=%g needs target "
                    "return %.3e but the best achievable under the "
                    "Bob-nulling equality is %.3e",
                    spec.r_th, required, best_return.objective);
      throw InfeasibleError(msg);
    }
  }

  BeamformingSolution out;
  double rs_prev = secrecy_of(scene, w_ab, w_k);
  out.history.push_back(rs_prev);

  for (int m = 1; m <= spec.m_max; ++m) {
    // Comm step via the Charnes-Cooper transform.
    const sdp::SdpProblem comm = build_comm_subproblem(scene, w_k);
    const sdp::SdpSolution comm_sol = sdp::solve(comm, spec.sdp_options);
    if (comm_sol.status == sdp::SolveStatus::Infeasible)
      throw InfeasibleError("comm subproblem infeasible: " + comm_sol.message);
    const double u = comm_sol.scalar_values[0];
    if (!(u > 1e-12))
      throw InfeasibleError("Charnes-Cooper scale u collapsed to zero");
    w_ab = comm_sol.block_values[0] / u;
    w_ab = 0.5 * (w_ab + w_ab.adjoint()).eval();

    // Radar step with the refreshed comm iterate.
    const sdp::SdpProblem radar =
        build_radar_subproblem(scene, w_ab, spec.r_th);
    const sdp::SdpSolution radar_sol = sdp::solve(radar, spec.sdp_options);
    if (radar_sol.status == sdp::SolveStatus::Infeasible)
      throw InfeasibleError("radar subproblem infeasible: " +
                            radar_sol.message);
    w_k = radar_sol.block_values[0];

    const double rs = secrecy_of(scene, w_ab, w_k);
    out.history.push_back(rs);
    out.iterations = m;
    const double eps = std::abs(rs - rs_prev) / std::max(std::abs(rs), 1e-12);
    rs_prev = rs;
    if (eps <= spec.eps_converge) {
      out.converged = true;
      break;
    }
  }

  out.w_ab_mat = w_ab;
  out.w_k_mat = w_k;

  // Single rank-1 enforcement after the iteration settles.
  {
    sdp::SdpProblem extract_comm;
    const int blk = extract_comm.add_block(na);
    extract_comm.objective_blocks.push_back({blk, gram(scene.h_ab)});
    const CMat g_ad = gram(scene.h_ad);
    if (g_ad.cwiseAbs().maxCoeff() > 0.0)
      extract_comm.constraints.push_back(nulling_constraint(blk, g_ad));
    extract_comm.constraints.push_back(trace_constraint(blk, na, 1.0));
    out.w_ab = sdp::rank1_extract(w_ab, extract_comm, 0, spec.extract_seed).w;
    if (g_ad.cwiseAbs().maxCoeff() > 0.0)
      out.w_ab = polish_null(out.w_ab, g_ad);
    out.w_ab.normalize();

    sdp::SdpProblem extract_radar =
        build_radar_subproblem(scene, w_ab, spec.r_th);
    out.w_k =
        sdp::rank1_extract(w_k, extract_radar, 0, spec.extract_seed + 1).w;
    if (bob_facing.cwiseAbs().maxCoeff() > 0.0)
      out.w_k = polish_null(out.w_k, bob_facing);
    out.w_k.normalize();
  }

  const double gb = sinr_bob(scene, w_ab, w_k);
  const double ge = sinr_eve_bounded(scene, w_ab, w_k);
  out.bob_rate = std::log2(1.0 + gb);
  out.eve_rate = std::log2(1.0 + ge);
  out.secrecy_rate = secrecy_rate(gb, ge);
  out.radar_rate = jcr::radar_rate(scene, w_ab, w_k);
  return out;
}

}  // namespace jcr::beamforming
