// Experiment configuration: a flat key = value text format (lists are
// whitespace separated, '#' starts a comment) with a validating loader that
// names the offending key and line on every error.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "jcr/geometry.hpp"

namespace jcr {

struct ExperimentConfig {
  // Array sizes (node C transmits the radar waveforms, node D receives them).
  int n_comm_tx = 8;
  int n_comm_rx = 4;
  int n_radar_tx = 8;
  int n_radar_rx = 4;

  // Carrier and array spacing.
  double carrier_freq_hz = 2e9;
  double element_spacing_wavelengths = 0.5;

  // Propagation and noise.
  double rho0 = 1e-3;
  double noise_power = 1e-12;  // sigma^2 in linear watts, all receivers
  double sigma2_b = -1.0;      // optional per-receiver overrides (< 0: unset)
  double sigma2_d = -1.0;
  double sigma2_e = -1.0;

  // Geometry (meters). The radar transmitter and receiver are co-located.
  NodePosition pos_comm_tx{0.0, 0.0};
  NodePosition pos_comm_rx{-10.0, 15.0};
  NodePosition pos_radar{40.0, -30.0};
  NodePosition pos_eve{25.0, 40.0};
  double eve_radius = 5.0;

  // Targets.
  int target_count = 3;
  double sector_min_deg = -60.0;
  double sector_max_deg = 60.0;
  double target_range_min = 5.0;
  double target_range_max = 15.0;

  // Waveforms and transmit power scales.
  int snapshots = 128;
  int psk_order = 4;
  double comm_power_scale = 1.0;
  double radar_power_scale = 1.0;

  // Joint problem.
  double r_th = 0.0;
  double eps_converge = 1e-5;
  int m_max = 50;

  // Monte-Carlo axes.
  int realizations = 50;
  std::vector<int> antenna_sweep = {4, 8};
  std::vector<double> snr_grid_db = {-10.0, 0.0, 10.0, 20.0, 30.0};
  std::vector<int> variations_sweep = {500, 2000};
  int test_variations = 200;

  // Autoencoder training.
  int epochs = 200;
  int batch_size = 64;
  double learning_rate = 1e-3;
  std::string optimizer = "adam";  // or "sgd" (momentum SGD)
  double momentum = 0.9;           // sgd only
  int patience = 20;
  double validation_fraction = 0.10;
  std::string variation_mode = "noise+fading";  // or "noise"
  std::string train_receiver = "both";          // comm | radar | both

  int threads = 0;  // 0 = hardware concurrency

  double wavelength() const { return 299792458.0 / carrier_freq_hz; }
  double element_spacing() const {
    return element_spacing_wavelengths * wavelength();
  }
  double sigma_b() const { return sigma2_b > 0.0 ? sigma2_b : noise_power; }
  double sigma_d() const { return sigma2_d > 0.0 ? sigma2_d : noise_power; }
  double sigma_e() const { return sigma2_e > 0.0 ? sigma2_e : noise_power; }

  void validate() const;
};

ExperimentConfig load_config(std::istream& is);
ExperimentConfig load_config_file(const std::string& path);

// Known keys with one-line descriptions (used by error messages and --help).
std::string config_schema_text();

}  // namespace jcr
