#include "jcr/baselines.hpp"

#include <cmath>

namespace jcr::baselines {

NullSpaceProjector NullSpaceProjector::from_channel(const CMat& cross) {
  if (cross.size() == 0) throw DimensionError("empty cross channel");
  NullSpaceProjector p;
  p.tx_dim = static_cast<int>(cross.cols());
  Eigen::JacobiSVD<CMat> svd(cross, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double smax = sv.size() > 0 ? sv[0] : 0.0;
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv[i] > 1e-10 * smax) ++rank;
  if (rank >= p.tx_dim)
    throw InfeasibleError(
        "cross channel has full column rank " + std::to_string(rank) +
        "; no null space to project into");
  p.basis = svd.matrixV().rightCols(p.tx_dim - rank);
  return p;
}

TransmitSignal null_space_project(const ChannelMatrix& cross_channel,
                                  const TransmitSignal& signal) {
  if (cross_channel.matrix.cwiseAbs().maxCoeff() == 0.0) return signal;
  const auto p = NullSpaceProjector::from_channel(cross_channel.matrix);
  if (p.tx_dim != signal.samples.rows())
    throw DimensionError("projector dimension does not match the signal");
  const CMat proj = p.projector();
  TransmitSignal out;
  out.samples = proj * signal.samples;
  // samples = conj(weight) * waveform, so the weight moves with conj(P).
  out.weight = proj.conjugate() * signal.weight;
  return out;
}

RadarEmission null_space_project(const CMat& cross_channel,
                                 const RadarEmission& emission) {
  if (cross_channel.cwiseAbs().maxCoeff() == 0.0) return emission;
  const auto p = NullSpaceProjector::from_channel(cross_channel);
  if (p.tx_dim != emission.samples.rows())
    throw DimensionError("projector dimension does not match the emission");
  const CMat proj = p.projector();
  RadarEmission out;
  out.samples = proj * emission.samples;
  out.weights.reserve(emission.weights.size());
  for (const auto& w : emission.weights)
    out.weights.push_back(proj.conjugate() * w);
  return out;
}

CMat known_channel_oracle(const ReceiveRecord& record,
                          const OracleModel& model) {
  const CMat& y = record.samples;
  const int n_rx = static_cast<int>(y.rows());
  const int t = static_cast<int>(y.cols());
  const int m = static_cast<int>(model.static_columns.size());
  if (m > 0 && (model.static_rows.rows() != m || model.static_rows.cols() != t))
    throw DimensionError("static rows must be M x T");
  const bool have_per_time = model.per_time_column.size() > 0;
  if (have_per_time && model.per_time_column.size() != n_rx)
    throw DimensionError("per-time column dimension mismatch");

  // Eliminate the per-snapshot unknowns first: with nu(t) solved in closed
  // form, the amplitudes see the receive space deflated along h.
  CMat deflate = CMat::Identity(n_rx, n_rx);
  double h_norm2 = 0.0;
  if (have_per_time) {
    h_norm2 = model.per_time_column.squaredNorm();
    if (h_norm2 > 0.0)
      deflate -= (model.per_time_column * model.per_time_column.adjoint()) /
                 h_norm2;
  }

  CVec amps = CVec::Zero(m);
  if (m > 0) {
    std::vector<CVec> deflated;
    deflated.reserve(m);
    for (const auto& g : model.static_columns) {
      if (g.size() != n_rx)
        throw DimensionError("static column dimension mismatch");
      deflated.push_back(deflate * g);
    }
    CMat gram(m, m);
    CVec rhs(m);
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j)
        gram(i, j) = (deflated[i].adjoint() * deflated[j])(0, 0) *
                     (model.static_rows.row(j) *
                      model.static_rows.row(i).adjoint())(0, 0);
      rhs(i) =
          (deflated[i].adjoint() * y * model.static_rows.row(i).adjoint())(0, 0);
    }
    const double ridge =
        model.noise_power +
        model.ridge * std::max(1e-300, gram.real().trace() / m);
    const CMat system = gram + ridge * CMat::Identity(m, m);
    // Solve around the nominal unit amplitude so the estimate falls back to
    // it (instead of to zero) when the record carries little information.
    const CVec nominal = CVec::Ones(m);
    amps = nominal + system.ldlt().solve(rhs - gram * nominal);
  }

  // Interference-free residual, then the per-snapshot symbols by projection.
  CMat static_part = CMat::Zero(n_rx, t);
  for (int i = 0; i < m; ++i)
    static_part += model.static_columns[i] * amps(i) * model.static_rows.row(i);

  if (model.desired_is_per_time) {
    if (!have_per_time || h_norm2 <= 0.0) return CMat::Zero(n_rx, t);
    const CMat residual = y - static_part;
    const Eigen::RowVectorXcd nu =
        (model.per_time_column.adjoint() * residual) /
        (h_norm2 + model.noise_power + model.ridge * h_norm2);
    return model.per_time_column * nu;
  }
  return static_part;
}

}  // namespace jcr::baselines
