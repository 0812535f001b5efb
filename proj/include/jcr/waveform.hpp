// Transmit-side signals: the bank of mutually orthogonal radar waveforms,
// the PSK communication waveform, and beamformed antenna-domain signals.
#pragma once

#include <Eigen/Dense>
#include <vector>

#include "jcr/errors.hpp"
#include "jcr/geometry.hpp"
#include "jcr/rng.hpp"

namespace jcr {

// M rows of unit time-average power, orthonormal under (1/T) sum_t.
struct WaveformBank {
  CMat samples;  // M x T
  int waveform_count() const { return static_cast<int>(samples.rows()); }
  int snapshot_count() const { return static_cast<int>(samples.cols()); }
};

struct CommWaveform {
  CVec symbols;  // length T, unit modulus
  int constellation_order = 4;
};

// N x T antenna-domain signal. Column t is conj(weight) * waveform(t).
struct TransmitSignal {
  CMat samples;
  CVec weight;
};

// Aggregate radar emission: sum_m conj(w_m) * psi_m(t), one excitation per
// orthogonal waveform.
struct RadarEmission {
  CMat samples;                // N x T
  std::vector<CVec> weights;   // per-waveform weight vectors (w_m)
};

// DFT-row construction; throws InfeasibleError when m > t.
WaveformBank make_orthogonal_bank(int m, int t);

CommWaveform make_psk(int t, int order, Rng& rng);

TransmitSignal beamform(const CVec& weight, const Eigen::RowVectorXcd& waveform_row);

// Shared-weight radar emission: every waveform uses weight/sqrt(M), so the
// total time-average transmit power is ||weight||^2.
RadarEmission radar_emission_shared(const CVec& weight, const WaveformBank& bank);

// Per-antenna emission (w_m = e_m / sqrt(M)): the classic orthogonal MIMO
// radar mode used when no optimized weights are available.
RadarEmission radar_emission_identity(const WaveformBank& bank);

// Emission with explicit per-waveform weights.
RadarEmission radar_emission(const std::vector<CVec>& weights,
                             const WaveformBank& bank);

// The optimizer works with covariance-style matrices W whose rank-1 factor is
// the antenna excitation (the vector that multiplies the waveform sample).
// These helpers synthesize signals directly from an excitation vector, so
// Tr(H W H^H) with W = v v^H matches the measured time-average power.
TransmitSignal transmit_from_excitation(const CVec& excitation,
                                        const Eigen::RowVectorXcd& waveform_row);
RadarEmission radar_emission_from_excitation(const CVec& excitation,
                                             const WaveformBank& bank);

}  // namespace jcr
