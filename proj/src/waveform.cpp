#include "jcr/waveform.hpp"

#include <cmath>

namespace jcr {

WaveformBank make_orthogonal_bank(int m, int t) {
  if (m < 1 || t < 1) throw DimensionError("bank needs m >= 1 and t >= 1");
  if (m > t)
    throw InfeasibleError("cannot build " + std::to_string(m) +
                          " orthogonal waveforms from " + std::to_string(t) +
                          " snapshots");
  WaveformBank bank;
  bank.samples.resize(m, t);
  // DFT rows have unit modulus per sample, so each row has unit time-average
  // power and distinct rows average to zero.
  for (int r = 0; r < m; ++r)
    for (int c = 0; c < t; ++c)
      bank.samples(r, c) = std::polar(1.0, 2.0 * M_PI * r * c / t);
  return bank;
}

CommWaveform make_psk(int t, int order, Rng& rng) {
  if (order < 2) throw DimensionError("invalid constellation order");
  if (t < 1) throw DimensionError("waveform needs at least one snapshot");
  CommWaveform w;
  w.constellation_order = order;
  w.symbols.resize(t);
  for (int i = 0; i < t; ++i) {
    const auto k = rng.uniform_index(static_cast<std::uint64_t>(order));
    // Offset constellation: for order 4 this is {e^{j pi/4}, e^{j 3pi/4}, ...}.
    w.symbols(i) = std::polar(1.0, M_PI * (2.0 * static_cast<double>(k) + 1.0) /
                                       order);
  }
  return w;
}

TransmitSignal beamform(const CVec& weight,
                        const Eigen::RowVectorXcd& waveform_row) {
  if (weight.size() == 0) throw DimensionError("empty beamforming weight");
  TransmitSignal s;
  s.weight = weight;
  s.samples = weight.conjugate() * waveform_row;
  return s;
}

RadarEmission radar_emission(const std::vector<CVec>& weights,
                             const WaveformBank& bank) {
  if (static_cast<int>(weights.size()) != bank.waveform_count())
    throw DimensionError("need one weight vector per waveform");
  if (weights.empty()) throw DimensionError("empty radar emission");
  const auto n = weights.front().size();
  RadarEmission e;
  e.weights = weights;
  e.samples = CMat::Zero(n, bank.snapshot_count());
  for (int m = 0; m < bank.waveform_count(); ++m) {
    if (weights[m].size() != n)
      throw DimensionError("inconsistent weight dimensions across waveforms");
    e.samples += weights[m].conjugate() * bank.samples.row(m);
  }
  return e;
}

RadarEmission radar_emission_shared(const CVec& weight,
                                    const WaveformBank& bank) {
  const double s = 1.0 / std::sqrt(static_cast<double>(bank.waveform_count()));
  std::vector<CVec> weights(bank.waveform_count(), weight * s);
  return radar_emission(weights, bank);
}

TransmitSignal transmit_from_excitation(
    const CVec& excitation, const Eigen::RowVectorXcd& waveform_row) {
  return beamform(excitation.conjugate(), waveform_row);
}

RadarEmission radar_emission_from_excitation(const CVec& excitation,
                                             const WaveformBank& bank) {
  return radar_emission_shared(excitation.conjugate(), bank);
}

RadarEmission radar_emission_identity(const WaveformBank& bank) {
  const int m = bank.waveform_count();
  const double s = 1.0 / std::sqrt(static_cast<double>(m));
  std::vector<CVec> weights;
  weights.reserve(m);
  for (int i = 0; i < m; ++i) {
    CVec w = CVec::Zero(m);
    w(i) = s;
    weights.push_back(w);
  }
  return radar_emission(weights, bank);
}

}  // namespace jcr
