#include "jcr/geometry.hpp"

#include <cmath>

namespace jcr {

double bearing(const NodePosition& from, const NodePosition& to) {
  const double dx = to.x - from.x;
  const double dy = to.y - from.y;
  if (dx == 0.0 && dy == 0.0)
    throw DegenerateGeometryError("bearing between co-located nodes");
  return std::atan2(dx, dy);
}

CVec steering_vector(const UlaGeometry& geometry, double theta) {
  geometry.validate();
  CVec v(geometry.n_elements);
  const double phase_step =
      2.0 * M_PI / geometry.wavelength * geometry.element_spacing *
      std::sin(theta);
  for (int n = 0; n < geometry.n_elements; ++n)
    v(n) = std::polar(1.0, phase_step * n);
  return v;
}

double path_loss(const PathLossModel& model, const NodePosition& from,
                 const NodePosition& to) {
  model.validate();
  const double d = from.distance_to(to);
  if (!(d > 0.0))
    throw DegenerateGeometryError("path loss between co-located nodes");
  return model.rho0 * model.fading_draw / (d * d);
}

double eve_bounded_alpha(const PathLossModel& model, const NodePosition& from,
                         const EveUncertainty& eve) {
  model.validate();
  eve.validate();
  const double d = from.distance_to(eve.center) + eve.radius;
  if (!(d > 0.0))
    throw DegenerateGeometryError(
        "bounded gain undefined: node sits on the uncertainty center with "
        "zero radius");
  return model.rho0 * model.fading_draw / (d * d);
}

ChannelMatrix channel(const CVec& rx_steer, std::complex<double> alpha,
                      const CVec& tx_steer) {
  if (rx_steer.size() == 0 || tx_steer.size() == 0)
    throw DimensionError("channel requires nonempty steering vectors");
  ChannelMatrix h;
  h.rx_steering = rx_steer;
  h.tx_steering = tx_steer;
  h.alpha = alpha;
  // Plain transpose on the transmit side, not conjugate transpose.
  h.matrix = rx_steer * alpha * tx_steer.transpose();
  return h;
}

ChannelMatrix target_channel(const CVec& rx_steer, double alpha_rx,
                             std::complex<double> beta, double alpha_tx,
                             const CVec& radar_steer) {
  return channel(rx_steer, alpha_rx * beta * alpha_tx, radar_steer);
}

}  // namespace jcr
