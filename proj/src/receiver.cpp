#include "jcr/receiver.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace jcr {

namespace {

void check_dims(const CMat& h, int rows, int cols, const char* name) {
  if (h.rows() != rows || h.cols() != cols)
    throw DimensionError(std::string("channel ") + name +
                         " has inconsistent dimensions");
}

CMat noise_matrix(int rows, int cols, double sigma2, Rng& rng) {
  CMat n(rows, cols);
  const double s = std::sqrt(sigma2);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) n(r, c) = s * rng.complex_gaussian();
  return n;
}

// Rejects matrices that are not Hermitian PSD within tolerance.
void require_psd(const CMat& w, const char* name) {
  if (w.rows() != w.cols()) throw DimensionError("W must be square");
  const double scale = std::max(1.0, w.cwiseAbs().maxCoeff());
  if ((w - w.adjoint()).cwiseAbs().maxCoeff() > 1e-8 * scale)
    throw DimensionError(std::string(name) + " is not Hermitian");
  Eigen::SelfAdjointEigenSolver<CMat> es(w);
  if (es.eigenvalues().minCoeff() < -1e-8 * scale)
    throw DimensionError(std::string(name) + " is not PSD");
}

// Receive power through h under covariance w. Mathematically nonnegative;
// rounding can leave a tiny negative trace, which is clamped.
double quad_power(const CMat& h, const CMat& w) {
  return std::max(0.0, (h * w * h.adjoint()).real().trace());
}

}  // namespace

void Scene::validate() const {
  const int na = comm_tx_count();
  const int nb = comm_rx_count();
  const int nd = radar_tx_count();
  const int nc = radar_rx_count();
  check_dims(h_ab, nb, na, "h_ab");
  check_dims(h_ae, nb, na, "h_ae");
  check_dims(h_ad, nc, na, "h_ad");
  check_dims(h_cb, nb, nd, "h_cb");
  check_dims(h_ce, nb, nd, "h_ce");
  if (h_lb.size() != h_ld.size() || h_le.size() != h_ld.size())
    throw DimensionError("per-target channel lists have mismatched lengths");
  for (const auto& h : h_lb) check_dims(h, nb, nd, "h_lb");
  for (const auto& h : h_le) check_dims(h, nb, nd, "h_le");
  for (const auto& h : h_ld) check_dims(h, nc, nd, "h_ld");
  if (!(sigma2_b > 0.0) || !(sigma2_d > 0.0) || !(sigma2_e > 0.0))
    throw DimensionError("noise powers must be positive");
}

CaseRecords receive_case1(const Scene& scene, const TransmitSignal& s_ab,
                          const RadarEmission& radar, Rng& rng) {
  scene.validate();
  if (s_ab.samples.rows() != scene.comm_tx_count())
    throw DimensionError("comm signal antenna count mismatch");
  if (radar.samples.rows() != scene.radar_tx_count())
    throw DimensionError("radar emission antenna count mismatch");
  if (s_ab.samples.cols() != radar.samples.cols())
    throw DimensionError("snapshot count mismatch between transmitters");
  const int t = static_cast<int>(s_ab.samples.cols());

  CaseRecords out;
  out.bob.clean = scene.h_ab * s_ab.samples;
  out.bob.samples = out.bob.clean + scene.h_cb * radar.samples +
                    noise_matrix(scene.comm_rx_count(), t, scene.sigma2_b, rng);
  out.eve.clean = scene.h_ae * s_ab.samples;
  out.eve.samples = out.eve.clean + scene.h_ce * radar.samples +
                    noise_matrix(scene.comm_rx_count(), t, scene.sigma2_e, rng);
  // No targets: the radar receiver picks up only the comm leak and noise.
  out.radar.clean = CMat::Zero(scene.radar_rx_count(), t);
  out.radar.samples =
      scene.h_ad * s_ab.samples +
      noise_matrix(scene.radar_rx_count(), t, scene.sigma2_d, rng);
  return out;
}

CaseRecords receive_case2(const Scene& scene, const TransmitSignal& s_ab,
                          const RadarEmission& radar, Rng& rng) {
  CaseRecords out = receive_case1(scene, s_ab, radar, rng);
  for (int l = 0; l < scene.target_count(); ++l) {
    out.bob.samples += scene.h_lb[l] * radar.samples;
    out.eve.samples += scene.h_le[l] * radar.samples;
    const CMat bounce = scene.h_ld[l] * radar.samples;
    out.radar.samples += bounce;
    out.radar.clean += bounce;  // target returns are the radar's desired part
  }
  return out;
}

double radar_interference_at_bob(const Scene& scene, const CMat& w_k) {
  double p = quad_power(scene.h_cb, w_k);
  for (const auto& h : scene.h_lb) p += quad_power(h, w_k);
  return p;
}

double radar_interference_at_eve(const Scene& scene, const CMat& w_k) {
  double p = quad_power(scene.h_ce, w_k);
  for (const auto& h : scene.h_le) p += quad_power(h, w_k);
  return p;
}

double radar_target_return(const Scene& scene, const CMat& w_k) {
  double p = 0.0;
  for (const auto& h : scene.h_ld) p += quad_power(h, w_k);
  return p;
}

double comm_leak_at_radar(const Scene& scene, const CMat& w_ab) {
  return quad_power(scene.h_ad, w_ab);
}

double sinr_bob(const Scene& scene, const CMat& w_ab, const CMat& w_k) {
  require_psd(w_ab, "w_ab");
  require_psd(w_k, "w_k");
  const double signal = quad_power(scene.h_ab, w_ab);
  return signal / (radar_interference_at_bob(scene, w_k) + scene.sigma2_b);
}

double sinr_eve_bounded(const Scene& scene, const CMat& w_ab, const CMat& w_k) {
  require_psd(w_ab, "w_ab");
  require_psd(w_k, "w_k");
  const double signal = quad_power(scene.h_ae, w_ab);
  return signal / (radar_interference_at_eve(scene, w_k) + scene.sigma2_e);
}

double secrecy_rate(double gamma_bob, double gamma_eve) {
  if (gamma_bob < 0.0 || gamma_eve < 0.0)
    throw DimensionError("SINRs must be nonnegative");
  const double diff = std::log2(1.0 + gamma_bob) - std::log2(1.0 + gamma_eve);
  return diff > 0.0 ? diff : 0.0;
}

double radar_rate(const Scene& scene, const CMat& w_ab, const CMat& w_k) {
  require_psd(w_ab, "w_ab");
  require_psd(w_k, "w_k");
  const double ret = radar_target_return(scene, w_k);
  return std::log2(1.0 + ret / (comm_leak_at_radar(scene, w_ab) +
                                scene.sigma2_d));
}

void save_record(std::ostream& os, const ReceiveRecord& record,
                 bool include_clean) {
  const int fields = include_clean ? 2 : 1;
  os << "jcr-record 1 " << record.rx_count() << " " << record.snapshot_count()
     << " " << fields << "\n";
  auto dump = [&os](const CMat& m) {
    for (int r = 0; r < m.rows(); ++r)
      for (int c = 0; c < m.cols(); ++c) {
        const double re = m(r, c).real();
        const double im = m(r, c).imag();
        os.write(reinterpret_cast<const char*>(&re), sizeof(double));
        os.write(reinterpret_cast<const char*>(&im), sizeof(double));
      }
  };
  dump(record.samples);
  if (include_clean) {
    if (record.clean.rows() != record.samples.rows() ||
        record.clean.cols() != record.samples.cols())
      throw DimensionError("clean component shape differs from samples");
    dump(record.clean);
  }
}

ReceiveRecord load_record(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw ConfigError("empty record stream");
  std::istringstream header(line);
  std::string magic;
  int version = 0, n_rx = 0, t = 0, fields = 0;
  header >> magic >> version >> n_rx >> t >> fields;
  if (magic != "jcr-record" || version != 1)
    throw ConfigError("not a jcr-record v1 stream");
  if (n_rx < 1 || t < 1 || fields < 1 || fields > 2)
    throw ConfigError("corrupt record header");
  auto slurp = [&is, n_rx, t]() {
    CMat m(n_rx, t);
    for (int r = 0; r < n_rx; ++r)
      for (int c = 0; c < t; ++c) {
        double re = 0.0, im = 0.0;
        is.read(reinterpret_cast<char*>(&re), sizeof(double));
        is.read(reinterpret_cast<char*>(&im), sizeof(double));
        if (!is) throw ConfigError("truncated record payload");
        m(r, c) = {re, im};
      }
    return m;
  };
  ReceiveRecord rec;
  rec.samples = slurp();
  rec.clean = fields == 2 ? slurp() : CMat::Zero(n_rx, t);
  return rec;
}

void save_record_file(const std::string& path, const ReceiveRecord& record,
                      bool include_clean) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("cannot open " + path + " for writing");
  save_record(os, record, include_clean);
}

ReceiveRecord load_record_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("cannot open " + path);
  return load_record(is);
}

}  // namespace jcr
