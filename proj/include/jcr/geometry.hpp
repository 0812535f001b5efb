// Planar scene geometry: node positions, uniform linear arrays, steering
// vectors, squared-distance path loss and the rank-1 channel matrices built
// from them, including target-bounce channels and the worst-case bounded
// channel toward an eavesdropper whose position is only known up to a disc.
#pragma once

#include <Eigen/Dense>
#include <complex>

#include "jcr/errors.hpp"
#include "jcr/rng.hpp"

namespace jcr {

using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;

struct NodePosition {
  double x = 0.0;
  double y = 0.0;

  double distance_to(const NodePosition& other) const {
    const double dx = x - other.x;
    const double dy = y - other.y;
    return std::sqrt(dx * dx + dy * dy);
  }
};

struct UlaGeometry {
  int n_elements = 1;
  double element_spacing = 0.075;  // meters
  double wavelength = 0.15;        // meters (2 GHz carrier)

  void validate() const {
    if (n_elements < 1) throw DimensionError("ULA needs at least one element");
    if (!(element_spacing > 0.0) || !(wavelength > 0.0))
      throw DimensionError("ULA spacing and wavelength must be positive");
  }
};

struct PathLossModel {
  double rho0 = 1e-3;       // power gain at 1 m
  double fading_draw = 1.0; // unit-mean exponential draw, one per link

  void validate() const {
    if (!(rho0 > 0.0)) throw DimensionError("rho0 must be positive");
    if (fading_draw < 0.0) throw DimensionError("fading draw must be >= 0");
  }
};

// Rank-1 propagation matrix H = rx_steering * alpha * tx_steering^T.
struct ChannelMatrix {
  CMat matrix;
  std::complex<double> alpha{0.0, 0.0};
  CVec rx_steering;
  CVec tx_steering;

  int rx_count() const { return static_cast<int>(matrix.rows()); }
  int tx_count() const { return static_cast<int>(matrix.cols()); }
};

// Swerling II reflector: the reflection coefficient is redrawn per pulse and
// held fixed within a pulse.
struct TargetModel {
  NodePosition position;
  std::complex<double> reflection_draw{1.0, 0.0};

  void redraw(Rng& rng) { reflection_draw = rng.complex_gaussian(); }
};

struct EveUncertainty {
  NodePosition center;
  double radius = 0.0;  // meters

  void validate() const {
    if (radius < 0.0) throw DimensionError("uncertainty radius must be >= 0");
  }
};

// Azimuth of `to` as seen from an x-axis-aligned array at `from`, measured
// from broadside (+y). Anything on the broadside has angle 0.
double bearing(const NodePosition& from, const NodePosition& to);

// Entry n of the returned vector is exp(j * 2*pi/lambda * n * d_x * sin(theta)).
CVec steering_vector(const UlaGeometry& geometry, double theta);

// alpha = rho0 * zeta * d^-2. Throws DegenerateGeometryError for d == 0.
double path_loss(const PathLossModel& model, const NodePosition& from,
                 const NodePosition& to);

// Worst-case (smallest) gain over the uncertainty disc:
// alpha_hat = rho0 * zeta * (||from - center|| + radius)^-2.
double eve_bounded_alpha(const PathLossModel& model, const NodePosition& from,
                         const EveUncertainty& eve);

ChannelMatrix channel(const CVec& rx_steer, std::complex<double> alpha,
                      const CVec& tx_steer);

// Two-hop bounce channel H = rx_steer * (alpha_rx * beta * alpha_tx) * radar_steer^T.
ChannelMatrix target_channel(const CVec& rx_steer, double alpha_rx,
                             std::complex<double> beta, double alpha_tx,
                             const CVec& radar_steer);

}  // namespace jcr
