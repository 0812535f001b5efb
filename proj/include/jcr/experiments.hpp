// Monte-Carlo orchestration: seeded scene draws, the secrecy-rate sweep over
// antenna counts (cooperative and joint pipelines), the SCA convergence
// census, the autoencoder RMSE sweep against its baselines, and CSV emission.
// Cells run concurrently; every random stream is derived from (master seed,
// cell key), so results are byte-identical regardless of scheduling.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "jcr/autoencoder.hpp"
#include "jcr/beamforming.hpp"
#include "jcr/config.hpp"
#include "jcr/receiver.hpp"

namespace jcr::experiments {

// One realization's channels. The random draw order is independent of the
// array sizes, so sweeping antennas reuses identical fading, targets and
// bearings (common random numbers across sweep cells).
Scene draw_scene(const ExperimentConfig& cfg, int n_comm_tx, Rng& rng);

struct SecrecyRow {
  std::string pipeline;  // "coop" or "pls"
  int n_comm_tx = 0;
  int realizations = 0;
  int failures = 0;
  int unconverged = 0;  // pls only
  double bob_rate_mean = 0, bob_rate_std = 0;
  double rs_radar_eve_mean = 0, rs_radar_eve_std = 0;
  double rs_external_mean = 0, rs_external_std = 0;
};

std::vector<SecrecyRow> secrecy_sweep(const ExperimentConfig& cfg,
                                      std::uint64_t seed);

struct ConvergenceTrace {
  int scene_index = 0;
  bool converged = false;
  bool failed = false;
  std::string message;
  std::vector<double> history;  // R_s^m including the initial point
};

std::vector<ConvergenceTrace> convergence_traces(const ExperimentConfig& cfg,
                                                 std::uint64_t seed);

struct RmseCell {
  std::string receiver;  // "comm" or "radar"
  double snr_db = 0;
  int variations = 0;
  bool failed = false;
  std::string message;
  double sigma2 = 0;
  double rmse_autoencoder = 0;
  double rmse_raw = 0;
  double rmse_nullproj = 0;
  double rmse_oracle = 0;
  int epochs_ran = 0;
  double best_val_loss = 0;
};

std::vector<RmseCell> rmse_sweep(const ExperimentConfig& cfg,
                                 std::uint64_t seed);

struct TrainedNetInfo {
  std::string receiver;
  double snr_db = 0;
  int variations = 0;
  std::string weights_file;
  std::string curve_file;
  int epochs_ran = 0;
  double best_val_loss = 0;
};

// Trains one network per (receiver, SNR, variations) cell and stores the
// weight containers plus per-epoch loss curves under out_dir.
std::vector<TrainedNetInfo> train_networks(const ExperimentConfig& cfg,
                                           std::uint64_t seed,
                                           const std::string& out_dir);

// CLI entry points: compute and write the CSV tables into out_dir.
void run_secrecy_sweep(const ExperimentConfig& cfg, std::uint64_t seed,
                       const std::string& out_dir);
void run_convergence_trace(const ExperimentConfig& cfg, std::uint64_t seed,
                           const std::string& out_dir);
void run_rmse_sweep(const ExperimentConfig& cfg, std::uint64_t seed,
                    const std::string& out_dir);
void run_train(const ExperimentConfig& cfg, std::uint64_t seed,
               const std::string& out_dir);

// Applies the JCR_OUT_DIR environment override and creates the directory.
std::string resolve_out_dir(const std::string& requested);

}  // namespace jcr::experiments
