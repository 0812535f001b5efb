#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "jcr/config.hpp"
#include "jcr/experiments.hpp"

using namespace jcr;
namespace ex = jcr::experiments;

namespace {

// Tiny but complete config used by the execution tests.
ExperimentConfig tiny_config() {
  ExperimentConfig cfg;
  cfg.realizations = 2;
  cfg.antenna_sweep = {4};
  cfg.snapshots = 8;
  cfg.snr_grid_db = {10.0};
  cfg.variations_sweep = {60};
  cfg.test_variations = 10;
  cfg.epochs = 4;
  cfg.batch_size = 16;
  cfg.patience = 4;
  cfg.target_count = 2;
  cfg.threads = 2;
  cfg.validate();
  return cfg;
}

std::string slurp(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  REQUIRE(is);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

}  // namespace

TEST_CASE("config loader") {
  SUBCASE("full round trip with comments and lists") {
    std::istringstream is(
        "# scenario\n"
        "n_comm_tx = 16\n"
        "antenna_sweep = 4 8 16   # sweep axis\n"
        "snr_grid_db = -10 0 10\n"
        "pos_eve = 12.5 -3\n"
        "noise_power = 1e-10\n"
        "variation_mode = noise\n");
    const ExperimentConfig cfg = load_config(is);
    CHECK(cfg.n_comm_tx == 16);
    REQUIRE(cfg.antenna_sweep.size() == 3);
    CHECK(cfg.antenna_sweep[2] == 16);
    CHECK(cfg.snr_grid_db[0] == -10.0);
    CHECK(cfg.pos_eve.x == 12.5);
    CHECK(cfg.pos_eve.y == -3.0);
    CHECK(cfg.noise_power == 1e-10);
    CHECK(cfg.variation_mode == "noise");
  }

  SUBCASE("unknown keys are named with their line") {
    std::istringstream is("n_comm_tx = 4\nnot_a_key = 3\n");
    try {
      load_config(is);
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      const std::string msg = e.what();
      CHECK(msg.find("not_a_key") != std::string::npos);
      CHECK(msg.find("line 2") != std::string::npos);
    }
  }

  SUBCASE("malformed numbers are rejected with the key") {
    std::istringstream is("noise_power = alot\n");
    try {
      load_config(is);
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find("noise_power") != std::string::npos);
    }
  }

  SUBCASE("semantic validation fires") {
    std::istringstream is("target_range_min = 9\ntarget_range_max = 3\n");
    CHECK_THROWS_AS(load_config(is), ConfigError);
  }

  SUBCASE("schema text lists every key") {
    const std::string schema = config_schema_text();
    for (const char* key :
         {"n_comm_tx", "snr_grid_db", "variation_mode", "eve_radius"})
      CHECK(schema.find(key) != std::string::npos);
  }
}

TEST_CASE("scene drawing") {
  ExperimentConfig cfg = tiny_config();

  SUBCASE("dimensions follow the config") {
    Rng rng = Rng::child(9, 0);
    const Scene s = ex::draw_scene(cfg, 4, rng);
    CHECK(s.comm_tx_count() == 4);
    CHECK(s.comm_rx_count() == cfg.n_comm_rx);
    CHECK(s.radar_tx_count() == cfg.n_radar_tx);
    CHECK(s.radar_rx_count() == cfg.n_radar_rx);
    CHECK(s.target_count() == 2);
    s.validate();
  }

  SUBCASE("antenna count does not shift the random draws") {
    Rng rng4 = Rng::child(77, 3);
    Rng rng8 = Rng::child(77, 3);
    const Scene s4 = ex::draw_scene(cfg, 4, rng4);
    const Scene s8 = ex::draw_scene(cfg, 8, rng8);
    // Entry (0,0) of a rank-1 channel is the gain itself; identical draws
    // must put identical gains on both scenes.
    CHECK(std::abs(s4.h_ab(0, 0)) ==
          doctest::Approx(std::abs(s8.h_ab(0, 0))).epsilon(1e-12));
    CHECK(std::abs(s4.h_ld[1](0, 0)) ==
          doctest::Approx(std::abs(s8.h_ld[1](0, 0))).epsilon(1e-12));
  }

  SUBCASE("identical seeds give identical scenes") {
    Rng a = Rng::child(5, 1), b = Rng::child(5, 1);
    const Scene sa = ex::draw_scene(cfg, 4, a);
    const Scene sb = ex::draw_scene(cfg, 4, b);
    CHECK((sa.h_cb - sb.h_cb).norm() == 0.0);
    CHECK((sa.h_le[0] - sb.h_le[0]).norm() == 0.0);
  }
}

TEST_CASE("secrecy sweep smoke run") {
  ExperimentConfig cfg = tiny_config();
  const auto rows = ex::secrecy_sweep(cfg, 42);
  REQUIRE(rows.size() == 2);  // coop + pls for one antenna count
  for (const auto& row : rows) {
    CHECK(row.realizations == 2);
    CHECK(row.failures == 0);
    CHECK(row.bob_rate_mean > 0.0);
    CHECK(std::isfinite(row.bob_rate_mean));
    // R_s never exceeds Bob's rate, so neither does its mean.
    CHECK(row.rs_external_mean <= row.bob_rate_mean + 1e-12);
    CHECK(row.rs_radar_eve_mean <= row.bob_rate_mean + 1e-12);
  }

  SUBCASE("repeat run is identical") {
    const auto again = ex::secrecy_sweep(cfg, 42);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      CHECK(rows[i].bob_rate_mean == again[i].bob_rate_mean);
      CHECK(rows[i].rs_external_mean == again[i].rs_external_mean);
      CHECK(rows[i].rs_radar_eve_std == again[i].rs_radar_eve_std);
    }
  }
}

TEST_CASE("convergence traces smoke run") {
  ExperimentConfig cfg = tiny_config();
  cfg.realizations = 3;
  const auto traces = ex::convergence_traces(cfg, 7);
  REQUIRE(traces.size() == 3);
  for (const auto& tr : traces) {
    CHECK_FALSE(tr.failed);
    CHECK(tr.converged);
    CHECK(static_cast<int>(tr.history.size()) <= cfg.m_max + 1);
    const std::size_t n = tr.history.size();
    REQUIRE(n >= 2);
    const double eps = std::abs(tr.history[n - 1] - tr.history[n - 2]) /
                       std::max(std::abs(tr.history[n - 1]), 1e-12);
    CHECK(eps <= cfg.eps_converge);
  }
}

TEST_CASE("rmse sweep smoke run and determinism") {
  ExperimentConfig cfg = tiny_config();
  cfg.radar_power_scale = 3e4;
  const auto cells = ex::rmse_sweep(cfg, 11);
  REQUIRE(cells.size() == 2);  // comm + radar, one SNR, one variation count
  for (const auto& c : cells) {
    INFO(c.receiver << ": " << c.message);
    CHECK_FALSE(c.failed);
    CHECK(c.rmse_autoencoder > 0.0);
    CHECK(c.rmse_raw > 0.0);
    CHECK(c.rmse_oracle > 0.0);
    CHECK(std::isfinite(c.rmse_nullproj));
    CHECK(c.sigma2 > 0.0);
  }
  const auto again = ex::rmse_sweep(cfg, 11);
  for (std::size_t i = 0; i < cells.size(); ++i) {
    CHECK(cells[i].rmse_autoencoder == again[i].rmse_autoencoder);
    CHECK(cells[i].rmse_oracle == again[i].rmse_oracle);
    CHECK(cells[i].sigma2 == again[i].sigma2);
  }
}

TEST_CASE("csv writers are reproducible byte for byte") {
  ExperimentConfig cfg = tiny_config();
  namespace fs = std::filesystem;
  const fs::path base = fs::temp_directory_path() / "jcr_test_csv";
  fs::remove_all(base);
  fs::create_directories(base / "a");
  fs::create_directories(base / "b");
  ex::run_secrecy_sweep(cfg, 3, (base / "a").string());
  ex::run_secrecy_sweep(cfg, 3, (base / "b").string());
  CHECK(slurp((base / "a" / "secrecy.csv").string()) ==
        slurp((base / "b" / "secrecy.csv").string()));

  ex::run_convergence_trace(cfg, 3, (base / "a").string());
  ex::run_convergence_trace(cfg, 3, (base / "b").string());
  CHECK(slurp((base / "a" / "converge_trace.csv").string()) ==
        slurp((base / "b" / "converge_trace.csv").string()));
  CHECK(slurp((base / "a" / "converge_summary.csv").string()) ==
        slurp((base / "b" / "converge_summary.csv").string()));

  SUBCASE("gnuplot companions drop comments and commas") {
    const std::string dat = slurp((base / "a" / "secrecy.dat").string());
    CHECK(dat.find(',') == std::string::npos);
    CHECK(dat.find('#') == std::string::npos);
    CHECK(dat.find("pipeline") != std::string::npos);
  }
  fs::remove_all(base);
}

TEST_CASE("output directory resolution honors the environment override") {
  namespace fs = std::filesystem;
  const fs::path base = fs::temp_directory_path() / "jcr_test_outdir";
  fs::remove_all(base);
  const std::string requested = (base / "requested").string();
  const std::string forced = (base / "forced").string();

  unsetenv("JCR_OUT_DIR");
  CHECK(ex::resolve_out_dir(requested) == requested);
  CHECK(fs::exists(requested));

  setenv("JCR_OUT_DIR", forced.c_str(), 1);
  CHECK(ex::resolve_out_dir(requested) == forced);
  CHECK(fs::exists(forced));
  unsetenv("JCR_OUT_DIR");
  fs::remove_all(base);
}
