#include "jcr/experiments.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <thread>

#include "jcr/baselines.hpp"

namespace jcr::experiments {

namespace {

void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
  if (threads <= 0)
    threads = static_cast<int>(std::thread::hardware_concurrency());
  threads = std::max(1, std::min(threads, n));
  if (threads <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      while (true) {
        const int i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::string sanitize(std::string s) {
  for (char& c : s)
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  return s;
}

struct MeanStd {
  double mean = 0.0, std_dev = 0.0;
};

MeanStd mean_std(const std::vector<double>& v) {
  MeanStd out;
  if (v.empty()) return out;
  double acc = 0.0;
  for (double x : v) acc += x;
  out.mean = acc / static_cast<double>(v.size());
  if (v.size() > 1) {
    double var = 0.0;
    for (double x : v) var += (x - out.mean) * (x - out.mean);
    out.std_dev = std::sqrt(var / static_cast<double>(v.size() - 1));
  }
  return out;
}

struct TargetGeometry {
  NodePosition position;
  double bearing_from_radar = 0.0;
};

// Target placement shares the draw order with the fading so the stream never
// depends on array sizes.
std::vector<TargetGeometry> draw_targets(const ExperimentConfig& cfg,
                                         Rng& rng) {
  std::vector<TargetGeometry> targets;
  targets.reserve(cfg.target_count);
  const double lo = cfg.sector_min_deg * M_PI / 180.0;
  const double hi = cfg.sector_max_deg * M_PI / 180.0;
  for (int l = 0; l < cfg.target_count; ++l) {
    TargetGeometry t;
    t.bearing_from_radar = rng.uniform(lo, hi);
    const double range = rng.uniform(cfg.target_range_min, cfg.target_range_max);
    t.position = {cfg.pos_radar.x + range * std::sin(t.bearing_from_radar),
                  cfg.pos_radar.y + range * std::cos(t.bearing_from_radar)};
    targets.push_back(t);
  }
  return targets;
}

Scene scene_from_draws(const ExperimentConfig& cfg, int n_comm_tx,
                       const std::vector<TargetGeometry>& targets, Rng& rng) {
  const UlaGeometry comm_tx{n_comm_tx, cfg.element_spacing(), cfg.wavelength()};
  const UlaGeometry comm_rx{cfg.n_comm_rx, cfg.element_spacing(),
                            cfg.wavelength()};
  const UlaGeometry radar_tx{cfg.n_radar_tx, cfg.element_spacing(),
                             cfg.wavelength()};
  const UlaGeometry radar_rx{cfg.n_radar_rx, cfg.element_spacing(),
                             cfg.wavelength()};
  const EveUncertainty eve{cfg.pos_eve, cfg.eve_radius};

  // Fixed draw order: link fading first, then per-target draws.
  auto loss_model = [&](double zeta) { return PathLossModel{cfg.rho0, zeta}; };
  const double z_ab = rng.exponential();
  const double z_ae = rng.exponential();
  const double z_ad = rng.exponential();
  const double z_cb = rng.exponential();
  const double z_ce = rng.exponential();
  struct TargetDraw {
    double z_lb, z_le, z_ld, z_cl;
    std::complex<double> beta;
  };
  std::vector<TargetDraw> tdraw(targets.size());
  for (auto& td : tdraw) {
    td.z_lb = rng.exponential();
    td.z_le = rng.exponential();
    td.z_ld = rng.exponential();
    td.z_cl = rng.exponential();
    td.beta = rng.complex_gaussian();
  }

  const NodePosition& a = cfg.pos_comm_tx;
  const NodePosition& b = cfg.pos_comm_rx;
  const NodePosition& r = cfg.pos_radar;
  const NodePosition& e = cfg.pos_eve;  // estimated center

  const double s_comm = std::sqrt(cfg.comm_power_scale);
  const double s_radar = std::sqrt(cfg.radar_power_scale);

  Scene scene;
  scene.h_ab = s_comm *
               channel(steering_vector(comm_rx, bearing(b, a)),
                       path_loss(loss_model(z_ab), a, b),
                       steering_vector(comm_tx, bearing(a, b)))
                   .matrix;
  scene.h_ae = s_comm *
               channel(steering_vector(comm_rx, bearing(e, a)),
                       eve_bounded_alpha(loss_model(z_ae), a, eve),
                       steering_vector(comm_tx, bearing(a, e)))
                   .matrix;
  scene.h_ad = s_comm *
               channel(steering_vector(radar_rx, bearing(r, a)),
                       path_loss(loss_model(z_ad), a, r),
                       steering_vector(comm_tx, bearing(a, r)))
                   .matrix;
  scene.h_cb = s_radar *
               channel(steering_vector(comm_rx, bearing(b, r)),
                       path_loss(loss_model(z_cb), r, b),
                       steering_vector(radar_tx, bearing(r, b)))
                   .matrix;
  scene.h_ce = s_radar *
               channel(steering_vector(comm_rx, bearing(e, r)),
                       eve_bounded_alpha(loss_model(z_ce), r, eve),
                       steering_vector(radar_tx, bearing(r, e)))
                   .matrix;
  for (std::size_t l = 0; l < targets.size(); ++l) {
    const NodePosition& tp = targets[l].position;
    const CVec illum = steering_vector(radar_tx, targets[l].bearing_from_radar);
    const double alpha_cl = path_loss(loss_model(tdraw[l].z_cl), r, tp);
    scene.h_lb.push_back(
        s_radar * target_channel(steering_vector(comm_rx, bearing(b, tp)),
                                 path_loss(loss_model(tdraw[l].z_lb), tp, b),
                                 tdraw[l].beta, alpha_cl, illum)
                      .matrix);
    scene.h_le.push_back(
        s_radar *
        target_channel(steering_vector(comm_rx, bearing(e, tp)),
                       eve_bounded_alpha(loss_model(tdraw[l].z_le), tp, eve),
                       tdraw[l].beta, alpha_cl, illum)
            .matrix);
    scene.h_ld.push_back(
        s_radar *
        target_channel(steering_vector(radar_rx, targets[l].bearing_from_radar),
                       path_loss(loss_model(tdraw[l].z_ld), tp, r),
                       tdraw[l].beta, alpha_cl, illum)
            .matrix);
  }
  scene.sigma2_b = cfg.sigma_b();
  scene.sigma2_d = cfg.sigma_d();
  scene.sigma2_e = cfg.sigma_e();
  return scene;
}

struct PipelineOutcome {
  bool ok = false;
  bool converged = true;
  std::string err;
  double bob_rate = 0, rs_radar_eve = 0, rs_external = 0;
};

double radar_receiver_eve_sinr(const Scene& scene, const CMat& w_ab,
                               const CMat& w_k) {
  return comm_leak_at_radar(scene, w_ab) /
         (radar_target_return(scene, w_k) + scene.sigma2_d);
}

PipelineOutcome coop_outcome(const Scene& scene) {
  PipelineOutcome out;
  try {
    const auto comm = beamforming::solve_coop_comm(scene);
    const auto radar = beamforming::solve_coop_radar(scene);
    const CMat w_ab = comm.weight * comm.weight.adjoint();
    const CMat w_k = radar.weight * radar.weight.adjoint();
    const double gb = sinr_bob(scene, w_ab, w_k);
    out.bob_rate = std::log2(1.0 + gb);
    out.rs_radar_eve =
        secrecy_rate(gb, radar_receiver_eve_sinr(scene, w_ab, w_k));
    out.rs_external = secrecy_rate(gb, sinr_eve_bounded(scene, w_ab, w_k));
    out.ok = true;
  } catch (const std::exception& ex) {
    out.err = ex.what();
  }
  return out;
}

PipelineOutcome pls_outcome(const Scene& scene, const ExperimentConfig& cfg,
                            std::uint64_t extract_seed) {
  PipelineOutcome out;
  try {
    beamforming::PlsProblemSpec spec;
    spec.scene = &scene;
    spec.r_th = cfg.r_th;
    spec.eps_converge = cfg.eps_converge;
    spec.m_max = cfg.m_max;
    spec.extract_seed = extract_seed;
    const auto sol = beamforming::sca_solve(spec);
    const CMat w_ab = sol.w_ab * sol.w_ab.adjoint();
    const CMat w_k = sol.w_k * sol.w_k.adjoint();
    const double gb = sinr_bob(scene, w_ab, w_k);
    out.bob_rate = std::log2(1.0 + gb);
    out.rs_radar_eve =
        secrecy_rate(gb, radar_receiver_eve_sinr(scene, w_ab, w_k));
    out.rs_external = secrecy_rate(gb, sinr_eve_bounded(scene, w_ab, w_k));
    out.converged = sol.converged;
    out.ok = true;
  } catch (const std::exception& ex) {
    out.err = ex.what();
  }
  return out;
}

}  // namespace

Scene draw_scene(const ExperimentConfig& cfg, int n_comm_tx, Rng& rng) {
  cfg.validate();
  const auto targets = draw_targets(cfg, rng);
  return scene_from_draws(cfg, n_comm_tx, targets, rng);
}

std::vector<SecrecyRow> secrecy_sweep(const ExperimentConfig& cfg,
                                      std::uint64_t seed) {
  cfg.validate();
  const int n_counts = static_cast<int>(cfg.antenna_sweep.size());
  const int reals = cfg.realizations;

  struct CellSample {
    PipelineOutcome coop, pls;
  };
  std::vector<CellSample> samples(
      static_cast<std::size_t>(n_counts) * reals);

  parallel_for(n_counts * reals, cfg.threads, [&](int idx) {
    const int ni = idx / reals;
    const int r = idx % reals;
    // The realization stream is shared across antenna counts.
    Rng rng = Rng::child(seed, 100, static_cast<std::uint64_t>(r));
    const Scene scene = draw_scene(cfg, cfg.antenna_sweep[ni], rng);
    samples[idx].coop = coop_outcome(scene);
    samples[idx].pls = pls_outcome(
        scene, cfg, splitmix64(seed ^ (0x51ecULL + static_cast<std::uint64_t>(idx))));
  });

  std::vector<SecrecyRow> rows;
  for (int ni = 0; ni < n_counts; ++ni) {
    for (const char* pipeline : {"coop", "pls"}) {
      SecrecyRow row;
      row.pipeline = pipeline;
      row.n_comm_tx = cfg.antenna_sweep[ni];
      row.realizations = reals;
      std::vector<double> bob, rs_eve_d, rs_ext;
      for (int r = 0; r < reals; ++r) {
        const CellSample& s = samples[static_cast<std::size_t>(ni) * reals + r];
        const PipelineOutcome& o =
            pipeline == std::string("coop") ? s.coop : s.pls;
        if (!o.ok) {
          ++row.failures;
          continue;
        }
        if (!o.converged) ++row.unconverged;
        bob.push_back(o.bob_rate);
        rs_eve_d.push_back(o.rs_radar_eve);
        rs_ext.push_back(o.rs_external);
      }
      const auto mb = mean_std(bob);
      const auto md = mean_std(rs_eve_d);
      const auto me = mean_std(rs_ext);
      row.bob_rate_mean = mb.mean;
      row.bob_rate_std = mb.std_dev;
      row.rs_radar_eve_mean = md.mean;
      row.rs_radar_eve_std = md.std_dev;
      row.rs_external_mean = me.mean;
      row.rs_external_std = me.std_dev;
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

std::vector<ConvergenceTrace> convergence_traces(const ExperimentConfig& cfg,
                                                 std::uint64_t seed) {
  cfg.validate();
  std::vector<ConvergenceTrace> traces(cfg.realizations);
  parallel_for(cfg.realizations, cfg.threads, [&](int i) {
    ConvergenceTrace& tr = traces[i];
    tr.scene_index = i;
    Rng rng = Rng::child(seed, 200, static_cast<std::uint64_t>(i));
    try {
      const Scene scene =
          draw_scene(cfg, cfg.antenna_sweep.back(), rng);
      beamforming::PlsProblemSpec spec;
      spec.scene = &scene;
      spec.r_th = cfg.r_th;
      spec.eps_converge = cfg.eps_converge;
      spec.m_max = cfg.m_max;
      spec.extract_seed = splitmix64(seed ^ static_cast<std::uint64_t>(i));
      const auto sol = beamforming::sca_solve(spec);
      tr.converged = sol.converged;
      tr.history = sol.history;
    } catch (const std::exception& ex) {
      tr.failed = true;
      tr.message = ex.what();
    }
  });
  return traces;
}

namespace {

// ---------------------------------------------------------------------------
// RMSE sweep machinery.

struct VariationParts {
  CMat clean;               // desired component at the receiver under test
  CMat interference;        // cross interference, unprojected
  CMat interference_nsp;    // cross interference after null-space projection
  CMat noise_unit;          // unit-variance noise draw
  baselines::OracleModel oracle;
};

struct RmseScenario {
  ExperimentConfig cfg;
  std::vector<TargetGeometry> targets;
  WaveformBank bank;
  bool comm_side = true;
  std::uint64_t master_seed = 0;
};

// Keys for the derived streams used below.
constexpr std::uint64_t kGeometryKey = 9000;
constexpr std::uint64_t kFixedFadingKey = 9050;
constexpr std::uint64_t kTrainKey = 9100;
constexpr std::uint64_t kTestKey = 9200;

CMat unit_noise(int rows, int cols, Rng& rng) {
  CMat n(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) n(r, c) = rng.complex_gaussian();
  return n;
}

VariationParts make_variation(const RmseScenario& sc, std::uint64_t stream_key,
                              std::uint64_t index,
                              const Scene* fixed_scene) {
  const ExperimentConfig& cfg = sc.cfg;
  Rng rng = Rng::child(sc.master_seed, stream_key, index);

  Scene local;
  const Scene* scene = fixed_scene;
  if (scene == nullptr) {
    local = scene_from_draws(cfg, cfg.n_comm_tx, sc.targets, rng);
    scene = &local;
  }

  const CommWaveform phi = make_psk(cfg.snapshots, cfg.psk_order, rng);
  const CMat noise_bob =
      unit_noise(cfg.n_comm_rx, cfg.snapshots, rng);
  const CMat noise_radar =
      unit_noise(cfg.n_radar_rx, cfg.snapshots, rng);

  // Fixed transmit policies for the uncooperative experiments: the comm
  // transmitter beams at Bob from geometry alone, the radar radiates one
  // orthogonal waveform per antenna.
  const UlaGeometry comm_tx{cfg.n_comm_tx, cfg.element_spacing(),
                            cfg.wavelength()};
  const CVec a_bob =
      steering_vector(comm_tx, bearing(cfg.pos_comm_tx, cfg.pos_comm_rx));
  const CVec v_ab =
      a_bob.conjugate() / std::sqrt(static_cast<double>(cfg.n_comm_tx));
  const TransmitSignal s_ab =
      transmit_from_excitation(v_ab, phi.symbols.transpose());
  const RadarEmission emission = radar_emission_identity(sc.bank);

  VariationParts parts;
  const int m = sc.bank.waveform_count();
  if (sc.comm_side) {
    parts.clean = scene->h_ab * s_ab.samples;
    CMat cross = scene->h_cb;
    for (const auto& h : scene->h_lb) cross += h;
    parts.interference = cross * emission.samples;
    const RadarEmission projected =
        baselines::null_space_project(scene->h_cb, emission);
    parts.interference_nsp = cross * projected.samples;
    parts.noise_unit = noise_bob;

    parts.oracle.per_time_column = scene->h_ab * v_ab;
    parts.oracle.static_rows = sc.bank.samples;
    for (int i = 0; i < m; ++i) {
      CVec excitation = CVec::Zero(m);
      excitation(i) = 1.0 / std::sqrt(static_cast<double>(m));
      parts.oracle.static_columns.push_back(cross * excitation);
    }
    parts.oracle.desired_is_per_time = true;
  } else {
    CMat bounce = CMat::Zero(cfg.n_radar_rx, cfg.n_radar_tx);
    for (const auto& h : scene->h_ld) bounce += h;
    parts.clean = bounce * emission.samples;
    parts.interference = scene->h_ad * s_ab.samples;
    const TransmitSignal projected =
        baselines::null_space_project(ChannelMatrix{scene->h_ad, 1.0, {}, {}},
                                      s_ab);
    parts.interference_nsp = scene->h_ad * projected.samples;
    parts.noise_unit = noise_radar;

    parts.oracle.per_time_column = scene->h_ad * v_ab;
    parts.oracle.static_rows = sc.bank.samples;
    for (int i = 0; i < m; ++i) {
      CVec excitation = CVec::Zero(m);
      excitation(i) = 1.0 / std::sqrt(static_cast<double>(m));
      parts.oracle.static_columns.push_back(bounce * excitation);
    }
    parts.oracle.desired_is_per_time = false;
  }
  return parts;
}

double calibrate_desired_power(const RmseScenario& sc,
                               const Scene* fixed_scene) {
  const int k_cal = 32;
  double acc = 0.0;
  for (int v = 0; v < k_cal; ++v) {
    const auto parts = make_variation(sc, kTrainKey, v, fixed_scene);
    acc += parts.clean.squaredNorm() / static_cast<double>(parts.clean.size());
  }
  return acc / k_cal;
}

RmseCell run_rmse_cell(const RmseScenario& sc, double snr_db, int variations,
                       const Scene* fixed_scene, double desired_power) {
  RmseCell cell;
  cell.receiver = sc.comm_side ? "comm" : "radar";
  cell.snr_db = snr_db;
  cell.variations = variations;
  const ExperimentConfig& cfg = sc.cfg;
  try {
    const double snr_lin = std::pow(10.0, snr_db / 10.0);
    const double sigma2 = desired_power / snr_lin;
    cell.sigma2 = sigma2;
    const double sigma = std::sqrt(sigma2);

    const int dim = 2 * static_cast<int>(sc.comm_side ? cfg.n_comm_rx
                                                      : cfg.n_radar_rx) *
                    cfg.snapshots;
    TrainingSet set;
    set.inputs = RowMat(variations, dim);
    set.targets = RowMat(variations, dim);
    set.validation_fraction = cfg.validation_fraction;
    set.snapshot_variations = variations;
    for (int v = 0; v < variations; ++v) {
      const auto parts = make_variation(sc, kTrainKey, v, fixed_scene);
      const CMat samples =
          parts.clean + parts.interference + sigma * parts.noise_unit;
      const Eigen::VectorXd x = vectorize(samples);
      const Eigen::VectorXd y = vectorize(parts.clean);
      std::copy(x.data(), x.data() + dim, set.inputs.row(v));
      std::copy(y.data(), y.data() + dim, set.targets.row(v));
    }

    AutoencoderNet net =
        make_net(default_layer_sizes(dim),
                 splitmix64(sc.master_seed ^
                            (0xae0ULL + static_cast<std::uint64_t>(
                                            variations * 1000 +
                                            static_cast<int>(snr_db) + 500))));
    TrainConfig tc;
    tc.epochs = cfg.epochs;
    tc.batch_size = cfg.batch_size;
    tc.learning_rate = cfg.learning_rate;
    tc.optimizer = cfg.optimizer == "sgd" ? Optimizer::SgdMomentum
                                          : Optimizer::Adam;
    tc.momentum = cfg.momentum;
    tc.patience = cfg.patience;
    tc.seed = splitmix64(sc.master_seed ^ 0x7e57ULL);
    const TrainResult tr = train(net, set, tc);
    cell.epochs_ran = static_cast<int>(tr.train_loss.size());
    cell.best_val_loss = tr.best_val_loss;

    double acc_ae = 0, acc_raw = 0, acc_nsp = 0, acc_oracle = 0;
    for (int j = 0; j < cfg.test_variations; ++j) {
      const auto parts = make_variation(sc, kTestKey, j, fixed_scene);
      ReceiveRecord rec;
      rec.clean = parts.clean;
      rec.samples = parts.clean + parts.interference + sigma * parts.noise_unit;

      const ReceiveRecord filtered = denoise(net, rec);
      acc_ae += rmse(filtered.samples, rec.clean);
      acc_raw += rmse(rec.samples, rec.clean);

      const CMat nsp_samples =
          parts.clean + parts.interference_nsp + sigma * parts.noise_unit;
      acc_nsp += rmse(nsp_samples, rec.clean);

      baselines::OracleModel oracle_model = parts.oracle;
      oracle_model.noise_power = sigma2;
      const CMat oracle_est =
          baselines::known_channel_oracle(rec, oracle_model);
      acc_oracle += rmse(oracle_est, rec.clean);
    }
    const double inv = 1.0 / cfg.test_variations;
    cell.rmse_autoencoder = acc_ae * inv;
    cell.rmse_raw = acc_raw * inv;
    cell.rmse_nullproj = acc_nsp * inv;
    cell.rmse_oracle = acc_oracle * inv;
  } catch (const std::exception& ex) {
    cell.failed = true;
    cell.message = ex.what();
  }
  return cell;
}

}  // namespace

std::vector<RmseCell> rmse_sweep(const ExperimentConfig& cfg,
                                 std::uint64_t seed) {
  cfg.validate();

  Rng geo_rng = Rng::child(seed, kGeometryKey);
  const auto targets = draw_targets(cfg, geo_rng);

  // In "noise" mode the fading is drawn once and shared by every variation.
  Scene fixed_scene;
  const bool fixed_fading = cfg.variation_mode == "noise";
  if (fixed_fading) {
    Rng fad_rng = Rng::child(seed, kFixedFadingKey);
    fixed_scene = scene_from_draws(cfg, cfg.n_comm_tx, targets, fad_rng);
  }

  std::vector<bool> sides;
  if (cfg.train_receiver == "comm" || cfg.train_receiver == "both")
    sides.push_back(true);
  if (cfg.train_receiver == "radar" || cfg.train_receiver == "both")
    sides.push_back(false);

  struct CellKey {
    bool comm_side;
    double snr_db;
    int variations;
  };
  std::vector<CellKey> keys;
  for (bool side : sides)
    for (double snr : cfg.snr_grid_db)
      for (int vars : cfg.variations_sweep) keys.push_back({side, snr, vars});

  // Desired receive power per receiver side, measured once.
  double desired_comm = 0.0, desired_radar = 0.0;
  {
    RmseScenario sc{cfg, targets, make_orthogonal_bank(cfg.n_radar_tx,
                                                       cfg.snapshots),
                    true, seed};
    desired_comm =
        calibrate_desired_power(sc, fixed_fading ? &fixed_scene : nullptr);
    sc.comm_side = false;
    desired_radar =
        calibrate_desired_power(sc, fixed_fading ? &fixed_scene : nullptr);
  }

  std::vector<RmseCell> cells(keys.size());
  parallel_for(static_cast<int>(keys.size()), cfg.threads, [&](int i) {
    RmseScenario sc{cfg, targets,
                    make_orthogonal_bank(cfg.n_radar_tx, cfg.snapshots),
                    keys[i].comm_side, seed};
    cells[i] = run_rmse_cell(sc, keys[i].snr_db, keys[i].variations,
                             fixed_fading ? &fixed_scene : nullptr,
                             keys[i].comm_side ? desired_comm : desired_radar);
  });
  return cells;
}

std::vector<TrainedNetInfo> train_networks(const ExperimentConfig& cfg,
                                           std::uint64_t seed,
                                           const std::string& out_dir) {
  cfg.validate();
  Rng geo_rng = Rng::child(seed, kGeometryKey);
  const auto targets = draw_targets(cfg, geo_rng);
  Scene fixed_scene;
  const bool fixed_fading = cfg.variation_mode == "noise";
  if (fixed_fading) {
    Rng fad_rng = Rng::child(seed, kFixedFadingKey);
    fixed_scene = scene_from_draws(cfg, cfg.n_comm_tx, targets, fad_rng);
  }
  const Scene* fixed = fixed_fading ? &fixed_scene : nullptr;

  std::vector<bool> sides;
  if (cfg.train_receiver == "comm" || cfg.train_receiver == "both")
    sides.push_back(true);
  if (cfg.train_receiver == "radar" || cfg.train_receiver == "both")
    sides.push_back(false);

  std::vector<TrainedNetInfo> infos;
  for (bool side : sides) {
    RmseScenario sc{cfg, targets,
                    make_orthogonal_bank(cfg.n_radar_tx, cfg.snapshots), side,
                    seed};
    const double desired = calibrate_desired_power(sc, fixed);
    for (double snr : cfg.snr_grid_db) {
      for (int vars : cfg.variations_sweep) {
        const double sigma = std::sqrt(desired / std::pow(10.0, snr / 10.0));
        const int dim =
            2 * (side ? cfg.n_comm_rx : cfg.n_radar_rx) * cfg.snapshots;
        TrainingSet set;
        set.inputs = RowMat(vars, dim);
        set.targets = RowMat(vars, dim);
        set.validation_fraction = cfg.validation_fraction;
        set.snapshot_variations = vars;
        for (int v = 0; v < vars; ++v) {
          const auto parts = make_variation(sc, kTrainKey, v, fixed);
          const CMat samples =
              parts.clean + parts.interference + sigma * parts.noise_unit;
          const Eigen::VectorXd x = vectorize(samples);
          const Eigen::VectorXd y = vectorize(parts.clean);
          std::copy(x.data(), x.data() + dim, set.inputs.row(v));
          std::copy(y.data(), y.data() + dim, set.targets.row(v));
        }
        AutoencoderNet net = make_net(
            default_layer_sizes(dim),
            splitmix64(seed ^ (0xae0ULL + static_cast<std::uint64_t>(
                                              vars * 1000 +
                                              static_cast<int>(snr) + 500))));
        TrainConfig tc;
        tc.epochs = cfg.epochs;
        tc.batch_size = cfg.batch_size;
        tc.learning_rate = cfg.learning_rate;
        tc.optimizer = cfg.optimizer == "sgd" ? Optimizer::SgdMomentum
                                              : Optimizer::Adam;
        tc.momentum = cfg.momentum;
        tc.patience = cfg.patience;
        tc.seed = splitmix64(seed ^ 0x7e57ULL);
        const TrainResult tr = train(net, set, tc);

        TrainedNetInfo info;
        info.receiver = side ? "comm" : "radar";
        info.snr_db = snr;
        info.variations = vars;
        info.epochs_ran = static_cast<int>(tr.train_loss.size());
        info.best_val_loss = tr.best_val_loss;
        char name[128];
        std::snprintf(name, sizeof(name), "net_%s_snr%g_var%d",
                      info.receiver.c_str(), snr, vars);
        // Stored relative to out_dir so summaries stay reproducible
        // byte-for-byte across output locations.
        info.weights_file = std::string(name) + ".jcrae";
        info.curve_file = std::string(name) + "_loss.csv";
        save_net_file(out_dir + "/" + info.weights_file, net);
        std::ofstream curve(out_dir + "/" + info.curve_file);
        curve << "epoch,train_loss,val_loss\n";
        for (std::size_t ep = 0; ep < tr.train_loss.size(); ++ep)
          curve << ep << "," << fmt(tr.train_loss[ep]) << ","
                << fmt(tr.val_loss[ep]) << "\n";
        infos.push_back(std::move(info));
      }
    }
  }
  return infos;
}

std::string resolve_out_dir(const std::string& requested) {
  const char* env = std::getenv("JCR_OUT_DIR");
  const std::string dir = env != nullptr && *env != '\0' ? env : requested;
  std::filesystem::create_directories(dir);
  return dir;
}

namespace {

// Companion ".dat" next to each CSV: comment lines dropped, commas turned
// into single spaces, ready for gnuplot's default column parsing.
void write_gnuplot_dat(const std::string& csv_path) {
  std::ifstream is(csv_path);
  if (!is) return;
  const std::string dat_path =
      csv_path.substr(0, csv_path.rfind('.')) + ".dat";
  std::ofstream os(dat_path);
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty() && line[0] == '#') continue;
    for (char& c : line)
      if (c == ',') c = ' ';
    os << line << "\n";
  }
}

}  // namespace

void run_secrecy_sweep(const ExperimentConfig& cfg, std::uint64_t seed,
                       const std::string& out_dir) {
  const auto rows = secrecy_sweep(cfg, seed);
  const std::string csv = out_dir + "/secrecy.csv";
  std::ofstream os(csv);
  if (!os) throw ConfigError("cannot write to " + out_dir);
  os << "# secrecy sweep; seed=" << seed
     << "; rates in bits/s/Hz; mean/std over successful realizations\n";
  os << "pipeline,n_comm_tx,realizations,failures,unconverged,"
        "bob_rate_mean,bob_rate_std,rs_radar_eve_mean,rs_radar_eve_std,"
        "rs_external_mean,rs_external_std\n";
  for (const auto& r : rows)
    os << r.pipeline << "," << r.n_comm_tx << "," << r.realizations << ","
       << r.failures << "," << r.unconverged << "," << fmt(r.bob_rate_mean)
       << "," << fmt(r.bob_rate_std) << "," << fmt(r.rs_radar_eve_mean) << ","
       << fmt(r.rs_radar_eve_std) << "," << fmt(r.rs_external_mean) << ","
       << fmt(r.rs_external_std) << "\n";
  os.close();
  write_gnuplot_dat(csv);
}

void run_convergence_trace(const ExperimentConfig& cfg, std::uint64_t seed,
                           const std::string& out_dir) {
  const auto traces = convergence_traces(cfg, seed);
  const std::string trace_csv = out_dir + "/converge_trace.csv";
  const std::string summary_csv = out_dir + "/converge_summary.csv";
  std::ofstream trace_os(trace_csv);
  std::ofstream summary_os(summary_csv);
  if (!trace_os || !summary_os)
    throw ConfigError("cannot write to " + out_dir);
  trace_os << "# per-iteration secrecy rate; seed=" << seed << "\n";
  trace_os << "scene,iteration,rs\n";
  summary_os << "scene,converged,failed,iterations,final_rs,message\n";
  for (const auto& tr : traces) {
    for (std::size_t m = 0; m < tr.history.size(); ++m)
      trace_os << tr.scene_index << "," << m << "," << fmt(tr.history[m])
               << "\n";
    summary_os << tr.scene_index << "," << (tr.converged ? 1 : 0) << ","
               << (tr.failed ? 1 : 0) << ","
               << (tr.history.empty() ? 0 : tr.history.size() - 1) << ","
               << fmt(tr.history.empty() ? 0.0 : tr.history.back()) << ","
               << sanitize(tr.message) << "\n";
  }
  trace_os.close();
  summary_os.close();
  write_gnuplot_dat(trace_csv);
  write_gnuplot_dat(summary_csv);
}

void run_rmse_sweep(const ExperimentConfig& cfg, std::uint64_t seed,
                    const std::string& out_dir) {
  const auto cells = rmse_sweep(cfg, seed);
  const std::string csv = out_dir + "/rmse.csv";
  std::ofstream os(csv);
  if (!os) throw ConfigError("cannot write to " + out_dir);
  os << "# rmse sweep; seed=" << seed
     << "; SNR is defined as desired-signal receive power / sigma^2 at the "
        "receiver under test\n";
  os << "receiver,snr_db,variations,failed,sigma2,rmse_autoencoder,rmse_raw,"
        "rmse_nullproj,rmse_oracle,epochs_ran,best_val_loss,message\n";
  for (const auto& c : cells)
    os << c.receiver << "," << fmt(c.snr_db) << "," << c.variations << ","
       << (c.failed ? 1 : 0) << "," << fmt(c.sigma2) << ","
       << fmt(c.rmse_autoencoder) << "," << fmt(c.rmse_raw) << ","
       << fmt(c.rmse_nullproj) << "," << fmt(c.rmse_oracle) << ","
       << c.epochs_ran << "," << fmt(c.best_val_loss) << ","
       << sanitize(c.message) << "\n";
  os.close();
  write_gnuplot_dat(csv);
}

void run_train(const ExperimentConfig& cfg, std::uint64_t seed,
               const std::string& out_dir) {
  const auto infos = train_networks(cfg, seed, out_dir);
  std::ofstream os(out_dir + "/train_summary.csv");
  if (!os) throw ConfigError("cannot write to " + out_dir);
  os << "receiver,snr_db,variations,epochs_ran,best_val_loss,weights_file,"
        "curve_file\n";
  for (const auto& i : infos)
    os << i.receiver << "," << fmt(i.snr_db) << "," << i.variations << ","
       << i.epochs_ran << "," << fmt(i.best_val_loss) << "," << i.weights_file
       << "," << i.curve_file << "\n";
}

}  // namespace jcr::experiments
