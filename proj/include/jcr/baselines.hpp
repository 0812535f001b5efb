// Reference methods for the RMSE experiments: null-space projection of the
// interfering transmitter's signal, and a known-channel least-squares
// estimator that serves as the genie floor curve.
#pragma once

#include <vector>

#include "jcr/receiver.hpp"

namespace jcr::baselines {

using jcr::CMat;
using jcr::CVec;

// Orthonormal basis of the transmit-side null space of a cross channel.
struct NullSpaceProjector {
  CMat basis;      // tx_dim x null_dim, orthonormal columns
  int tx_dim = 0;

  CMat projector() const { return basis * basis.adjoint(); }

  // Throws InfeasibleError when the null space is empty. Singular values
  // below 1e-10 * sigma_max count as zero.
  static NullSpaceProjector from_channel(const CMat& cross_channel);
};

// P s with P = B B^H; leakage through the cross channel drops below
// 1e-10 of the unprojected leakage.
TransmitSignal null_space_project(const ChannelMatrix& cross_channel,
                                  const TransmitSignal& signal);
RadarEmission null_space_project(const CMat& cross_channel,
                                 const RadarEmission& emission);

// Known-channel least-squares model of one receiver. The record is assumed
// to be y(t) = per_time_column * nu(t) + sum_m static_columns[m] * a_m *
// static_rows(m, t) + noise, with nu(t) (per-snapshot symbols, zero mean and
// unit power) and the amplitudes a_m (nominally one) unknown.
// `desired_is_per_time` selects which reconstructed part is the desired
// signal (true at the comm receiver, false at the radar receiver).
//
// When noise_power > 0 the solves are regularized by it: symbol estimates
// shrink as h^H r / (|h|^2 + sigma^2) and the amplitude system is solved
// around the nominal unit amplitude with a sigma^2 ridge. This keeps the
// floor below any trained filter at low SNR, where an unregularized solve
// would amplify noise; with noise_power = 0 it is plain least squares with
// only the singularity ridge.
struct OracleModel {
  CVec per_time_column;
  std::vector<CVec> static_columns;
  CMat static_rows;  // M x T
  bool desired_is_per_time = true;
  double noise_power = 0.0;  // sigma^2 of the record, if known
  double ridge = 1e-8;       // singularity guard, relative to the trace scale
};

// Least-squares estimate of the desired component given full channel
// knowledge; its RMSE against the clean component is the floor curve.
CMat known_channel_oracle(const ReceiveRecord& record, const OracleModel& model);

}  // namespace jcr::baselines
