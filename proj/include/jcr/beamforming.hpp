// Transmit-weight optimization: the cooperative nulling problems solved
// independently at each transmitter, and the joint secrecy-rate problem
// solved by alternating two convex subproblems (a Charnes-Cooper transformed
// comm step and a linearized radar step) until the secrecy rate stabilizes.
#pragma once

#include <vector>

#include "jcr/receiver.hpp"
#include "jcr/sdp.hpp"

namespace jcr::beamforming {

using jcr::CMat;
using jcr::CVec;
using jcr::Scene;

struct CoopResult {
  CMat w;             // Hermitian PSD, unit trace
  CVec weight;        // extracted unit-norm excitation vector
  double objective;   // desired-power numerator at the optimum
  sdp::SdpSolution raw;
};

// max Tr(H_AB W H_AB^H) s.t. Tr(H_AD W H_AD^H) = 0 (delta-relaxed),
// Tr(W) = 1, W PSD. The radar interference in Bob's SINR is constant in W,
// so maximizing the numerator maximizes the rate.
CoopResult solve_coop_comm(const Scene& scene,
                           const sdp::SolveOptions& opts = {});

// max sum_l Tr(H_lD W H_lD^H) s.t. the Bob-facing radar channels are nulled,
// Tr(W) = 1, W PSD.
CoopResult solve_coop_radar(const Scene& scene,
                            const sdp::SolveOptions& opts = {});

// Coupling constants of the comm subproblem, recomputed from the latest
// radar iterate.
struct CommCouplings {
  double k1 = 0.0;  // 1 / sigma_B^2
  double k2 = 0.0;  // 1 / (Eve radar interference + sigma_E^2)
};
CommCouplings compute_comm_couplings(const Scene& scene, const CMat& w_k);

// Charnes-Cooper transformed comm step: variables (U PSD, u >= 0),
// maximize u + k1 Tr(H_AB^H H_AB U) subject to
// u + k2 Tr(H_AE^H H_AE U) = 1, Tr(H_AD^H H_AD U) = 0, Tr(U) = u.
// Block 0 is U; scalar 0 is u.
sdp::SdpProblem build_comm_subproblem(const Scene& scene, const CMat& w_k_fixed);

// Radar step: maximize the Eve-facing interference y1 + y2 subject to the
// radar-rate floor, the Bob-nulling equality and Tr(W) = 1. Block 0 is W_k.
sdp::SdpProblem build_radar_subproblem(const Scene& scene,
                                       const CMat& w_ab_fixed, double r_th);

// Objective of the comm step in log form at a given W_AB (used by the
// Charnes-Cooper round-trip checks): log2(1+k1 T_B) - log2(1+k2 T_E).
double comm_subproblem_value(const Scene& scene, const CommCouplings& k,
                             const CMat& w_ab);

struct PlsProblemSpec {
  const Scene* scene = nullptr;
  double r_th = 0.0;             // bits/s/Hz radar-rate floor
  double eps_converge = 1e-5;
  int m_max = 50;
  sdp::SolveOptions sdp_options{};
  std::uint64_t extract_seed = 1;
};

struct BeamformingSolution {
  CMat w_ab_mat, w_k_mat;        // PSD unit-trace iterates at termination
  CVec w_ab, w_k;                // extracted unit-norm excitations
  std::vector<double> history;   // R_s^m including the initial value
  bool converged = false;
  int iterations = 0;
  double secrecy_rate = 0.0;
  double bob_rate = 0.0;
  double eve_rate = 0.0;
  double radar_rate = 0.0;
};

BeamformingSolution sca_solve(const PlsProblemSpec& spec);

// Orthonormal basis of the null space of the Gram matrix sum_i H_i^H H_i
// (transmit directions invisible to every listed channel). Empty when the
// stacked channels span the whole transmit space.
CMat transmit_null_basis(const std::vector<const CMat*>& channels);

}  // namespace jcr::beamforming
