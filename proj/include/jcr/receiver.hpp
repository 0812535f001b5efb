// Received-signal synthesis for the no-target and L-target cases, the
// trace-form SINR/rate bookkeeping at Bob, Eve (worst-case bounded channels)
// and the radar receiver, and the secrecy rate.
#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <string>
#include <vector>

#include "jcr/geometry.hpp"
#include "jcr/waveform.hpp"

namespace jcr {

// All channel matrices of one realization. Eve-terminating channels carry the
// worst-case bounded gain (alpha-hat); everything else carries true gains.
struct Scene {
  CMat h_ab;  // comm tx -> Bob           (n_comm_rx x n_comm_tx)
  CMat h_ae;  // comm tx -> Eve, bounded  (n_comm_rx x n_comm_tx)
  CMat h_ad;  // comm tx -> radar rx      (n_radar_rx x n_comm_tx)
  CMat h_cb;  // radar tx -> Bob          (n_comm_rx x n_radar_tx)
  CMat h_ce;  // radar tx -> Eve, bounded (n_comm_rx x n_radar_tx)
  std::vector<CMat> h_lb;  // target l -> Bob
  std::vector<CMat> h_le;  // target l -> Eve, bounded on the Eve hop
  std::vector<CMat> h_ld;  // target l -> radar rx
  double sigma2_b = 1.0;
  double sigma2_d = 1.0;
  double sigma2_e = 1.0;

  int target_count() const { return static_cast<int>(h_ld.size()); }
  int comm_tx_count() const { return static_cast<int>(h_ab.cols()); }
  int comm_rx_count() const { return static_cast<int>(h_ab.rows()); }
  int radar_tx_count() const { return static_cast<int>(h_cb.cols()); }
  int radar_rx_count() const { return static_cast<int>(h_ad.rows()); }

  void validate() const;
};

// One receive record: total samples plus the retained desired-signal-only
// component (training label / RMSE reference).
struct ReceiveRecord {
  CMat samples;  // n_rx x T
  CMat clean;    // n_rx x T

  int rx_count() const { return static_cast<int>(samples.rows()); }
  int snapshot_count() const { return static_cast<int>(samples.cols()); }
};

struct CaseRecords {
  ReceiveRecord bob;
  ReceiveRecord eve;
  ReceiveRecord radar;
};

// Case 1 (no targets): y_i = H_Ai s_AB + H_Ci s_radar + n_i at the comm
// receivers, y_D = H_AD s_AB + n_D at the radar receiver.
CaseRecords receive_case1(const Scene& scene, const TransmitSignal& s_ab,
                          const RadarEmission& radar, Rng& rng);

// Case 2 (L targets): adds the target-reflected radar terms at all receivers;
// the radar receiver keeps only the comm leak, the bounces and noise.
CaseRecords receive_case2(const Scene& scene, const TransmitSignal& s_ab,
                          const RadarEmission& radar, Rng& rng);

// Trace-form SINRs and rates. W arguments must be Hermitian PSD
// (min eigenvalue >= -1e-8 * trace scale) or the call throws.
double sinr_bob(const Scene& scene, const CMat& w_ab, const CMat& w_k);
double sinr_eve_bounded(const Scene& scene, const CMat& w_ab, const CMat& w_k);
double secrecy_rate(double gamma_bob, double gamma_eve);
double radar_rate(const Scene& scene, const CMat& w_ab, const CMat& w_k);

// Interference power terms reused by the optimizer.
double radar_interference_at_bob(const Scene& scene, const CMat& w_k);
double radar_interference_at_eve(const Scene& scene, const CMat& w_k);
double radar_target_return(const Scene& scene, const CMat& w_k);
double comm_leak_at_radar(const Scene& scene, const CMat& w_ab);

// Record container: one-line ASCII header ("jcr-record 1 <n_rx> <T> <fields>")
// followed by little-endian float64 payload, row-major (antenna index slow),
// each complex entry as re then im; `samples` first, then `clean` when
// fields == 2.
void save_record(std::ostream& os, const ReceiveRecord& record,
                 bool include_clean = true);
ReceiveRecord load_record(std::istream& is);
void save_record_file(const std::string& path, const ReceiveRecord& record,
                      bool include_clean = true);
ReceiveRecord load_record_file(const std::string& path);

}  // namespace jcr
