#include "jcr/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "jcr/errors.hpp"

namespace jcr {

namespace {

struct KeyDoc {
  const char* key;
  const char* doc;
};

constexpr KeyDoc kSchema[] = {
    {"n_comm_tx", "communication transmit antennas (N_A)"},
    {"n_comm_rx", "communication receive antennas at Bob and Eve (N_B)"},
    {"n_radar_tx", "radar transmit antennas and waveform count"},
    {"n_radar_rx", "radar receive antennas"},
    {"carrier_freq_hz", "carrier frequency in Hz"},
    {"element_spacing_wavelengths", "ULA spacing as a fraction of lambda"},
    {"rho0", "channel power gain at 1 m"},
    {"noise_power", "sigma^2 (linear) applied to every receiver"},
    {"sigma2_b", "override for Bob's noise power"},
    {"sigma2_d", "override for the radar receiver's noise power"},
    {"sigma2_e", "override for Eve's noise power"},
    {"pos_comm_tx", "x y of the communication transmitter, meters"},
    {"pos_comm_rx", "x y of Bob, meters"},
    {"pos_radar", "x y of the co-located radar arrays, meters"},
    {"pos_eve", "x y of the estimated Eve center, meters"},
    {"eve_radius", "uncertainty disc radius epsilon, meters"},
    {"target_count", "number of reflecting targets L"},
    {"sector_min_deg", "radar sector lower edge, degrees"},
    {"sector_max_deg", "radar sector upper edge, degrees"},
    {"target_range_min", "closest target range from the radar, meters"},
    {"target_range_max", "farthest target range from the radar, meters"},
    {"snapshots", "snapshot count T"},
    {"psk_order", "PSK constellation order"},
    {"comm_power_scale", "total comm transmit power"},
    {"radar_power_scale", "total radar transmit power"},
    {"r_th", "radar-rate floor in bits/s/Hz for the joint problem"},
    {"eps_converge", "relative secrecy-rate change that stops the iteration"},
    {"m_max", "iteration cap for the joint problem"},
    {"realizations", "Monte-Carlo channel realizations per cell"},
    {"antenna_sweep", "list of comm transmit antenna counts"},
    {"snr_grid_db", "list of SNR points in dB"},
    {"variations_sweep", "list of training variation counts"},
    {"test_variations", "held-out variations per RMSE cell"},
    {"epochs", "training epoch cap"},
    {"batch_size", "minibatch size"},
    {"learning_rate", "optimizer learning rate"},
    {"optimizer", "adam or sgd (momentum SGD)"},
    {"momentum", "momentum for the sgd optimizer"},
    {"patience", "early-stop patience on validation loss"},
    {"validation_fraction", "fraction of variations held for validation"},
    {"variation_mode", "noise+fading or noise"},
    {"train_receiver", "comm, radar or both"},
    {"threads", "worker threads (0 = hardware)"},
};

[[noreturn]] void fail(int line, const std::string& key,
                       const std::string& why) {
  std::string msg = "config error";
  if (line > 0) msg += " (line " + std::to_string(line) + ")";
  if (!key.empty()) msg += " at key '" + key + "'";
  msg += ": " + why;
  throw ConfigError(msg);
}

double parse_double(const std::string& s, int line, const std::string& key) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    fail(line, key, "'" + s + "' is not a number");
  }
}

int parse_int(const std::string& s, int line, const std::string& key) {
  const double v = parse_double(s, line, key);
  const int i = static_cast<int>(v);
  if (static_cast<double>(i) != v) fail(line, key, "'" + s + "' is not an integer");
  return i;
}

std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream is(s);
  std::vector<std::string> out;
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

}  // namespace

std::string config_schema_text() {
  std::ostringstream os;
  os << "configuration keys (key = value, '#' comments, lists are "
        "space-separated):\n";
  for (const auto& kd : kSchema) os << "  " << kd.key << " - " << kd.doc << "\n";
  return os.str();
}

void ExperimentConfig::validate() const {
  auto positive = [](int v, const char* what) {
    if (v < 1) fail(0, what, "must be >= 1");
  };
  positive(n_comm_tx, "n_comm_tx");
  positive(n_comm_rx, "n_comm_rx");
  positive(n_radar_tx, "n_radar_tx");
  positive(n_radar_rx, "n_radar_rx");
  positive(snapshots, "snapshots");
  positive(realizations, "realizations");
  positive(m_max, "m_max");
  positive(epochs, "epochs");
  positive(batch_size, "batch_size");
  positive(patience, "patience");
  positive(test_variations, "test_variations");
  if (target_count < 0) fail(0, "target_count", "must be >= 0");
  if (!(carrier_freq_hz > 0.0)) fail(0, "carrier_freq_hz", "must be > 0");
  if (!(element_spacing_wavelengths > 0.0))
    fail(0, "element_spacing_wavelengths", "must be > 0");
  if (!(rho0 > 0.0)) fail(0, "rho0", "must be > 0");
  if (!(noise_power > 0.0)) fail(0, "noise_power", "must be > 0");
  if (eve_radius < 0.0) fail(0, "eve_radius", "must be >= 0");
  if (psk_order < 2) fail(0, "psk_order", "must be >= 2");
  if (!(comm_power_scale > 0.0)) fail(0, "comm_power_scale", "must be > 0");
  if (!(radar_power_scale > 0.0)) fail(0, "radar_power_scale", "must be > 0");
  if (r_th < 0.0) fail(0, "r_th", "must be >= 0");
  if (!(eps_converge > 0.0)) fail(0, "eps_converge", "must be > 0");
  if (sector_max_deg < sector_min_deg)
    fail(0, "sector_max_deg", "sector is empty");
  if (!(target_range_min > 0.0) || target_range_max < target_range_min)
    fail(0, "target_range_min", "need 0 < min <= max");
  if (antenna_sweep.empty()) fail(0, "antenna_sweep", "list is empty");
  if (snr_grid_db.empty()) fail(0, "snr_grid_db", "list is empty");
  if (variations_sweep.empty()) fail(0, "variations_sweep", "list is empty");
  for (int v : antenna_sweep)
    if (v < 1) fail(0, "antenna_sweep", "entries must be >= 1");
  for (int v : variations_sweep)
    if (v < 10) fail(0, "variations_sweep", "entries must be >= 10");
  if (!(learning_rate > 0.0)) fail(0, "learning_rate", "must be > 0");
  if (momentum < 0.0 || momentum >= 1.0) fail(0, "momentum", "must be in [0,1)");
  if (validation_fraction < 0.0 || validation_fraction >= 1.0)
    fail(0, "validation_fraction", "must be in [0, 1)");
  if (optimizer != "adam" && optimizer != "sgd")
    fail(0, "optimizer", "expected 'adam' or 'sgd'");
  if (variation_mode != "noise+fading" && variation_mode != "noise")
    fail(0, "variation_mode", "expected 'noise+fading' or 'noise'");
  if (train_receiver != "comm" && train_receiver != "radar" &&
      train_receiver != "both")
    fail(0, "train_receiver", "expected 'comm', 'radar' or 'both'");
  if (threads < 0) fail(0, "threads", "must be >= 0");
}

ExperimentConfig load_config(std::istream& is) {
  ExperimentConfig cfg;
  std::map<std::string, std::function<void(const std::string&, int)>> setters;

  auto set_int = [&](const char* key, int* dst) {
    setters[key] = [key, dst](const std::string& v, int line) {
      *dst = parse_int(v, line, key);
    };
  };
  auto set_double = [&](const char* key, double* dst) {
    setters[key] = [key, dst](const std::string& v, int line) {
      *dst = parse_double(v, line, key);
    };
  };
  auto set_pos = [&](const char* key, NodePosition* dst) {
    setters[key] = [key, dst](const std::string& v, int line) {
      const auto toks = split_ws(v);
      if (toks.size() != 2) fail(line, key, "expected two coordinates 'x y'");
      dst->x = parse_double(toks[0], line, key);
      dst->y = parse_double(toks[1], line, key);
    };
  };
  auto set_int_list = [&](const char* key, std::vector<int>* dst) {
    setters[key] = [key, dst](const std::string& v, int line) {
      dst->clear();
      for (const auto& tok : split_ws(v))
        dst->push_back(parse_int(tok, line, key));
      if (dst->empty()) fail(line, key, "list is empty");
    };
  };
  auto set_double_list = [&](const char* key, std::vector<double>* dst) {
    setters[key] = [key, dst](const std::string& v, int line) {
      dst->clear();
      for (const auto& tok : split_ws(v))
        dst->push_back(parse_double(tok, line, key));
      if (dst->empty()) fail(line, key, "list is empty");
    };
  };
  auto set_string = [&](const char* key, std::string* dst) {
    setters[key] = [dst](const std::string& v, int) { *dst = v; };
  };

  set_int("n_comm_tx", &cfg.n_comm_tx);
  set_int("n_comm_rx", &cfg.n_comm_rx);
  set_int("n_radar_tx", &cfg.n_radar_tx);
  set_int("n_radar_rx", &cfg.n_radar_rx);
  set_double("carrier_freq_hz", &cfg.carrier_freq_hz);
  set_double("element_spacing_wavelengths", &cfg.element_spacing_wavelengths);
  set_double("rho0", &cfg.rho0);
  set_double("noise_power", &cfg.noise_power);
  set_double("sigma2_b", &cfg.sigma2_b);
  set_double("sigma2_d", &cfg.sigma2_d);
  set_double("sigma2_e", &cfg.sigma2_e);
  set_pos("pos_comm_tx", &cfg.pos_comm_tx);
  set_pos("pos_comm_rx", &cfg.pos_comm_rx);
  set_pos("pos_radar", &cfg.pos_radar);
  set_pos("pos_eve", &cfg.pos_eve);
  set_double("eve_radius", &cfg.eve_radius);
  set_int("target_count", &cfg.target_count);
  set_double("sector_min_deg", &cfg.sector_min_deg);
  set_double("sector_max_deg", &cfg.sector_max_deg);
  set_double("target_range_min", &cfg.target_range_min);
  set_double("target_range_max", &cfg.target_range_max);
  set_int("snapshots", &cfg.snapshots);
  set_int("psk_order", &cfg.psk_order);
  set_double("comm_power_scale", &cfg.comm_power_scale);
  set_double("radar_power_scale", &cfg.radar_power_scale);
  set_double("r_th", &cfg.r_th);
  set_double("eps_converge", &cfg.eps_converge);
  set_int("m_max", &cfg.m_max);
  set_int("realizations", &cfg.realizations);
  set_int_list("antenna_sweep", &cfg.antenna_sweep);
  set_double_list("snr_grid_db", &cfg.snr_grid_db);
  set_int_list("variations_sweep", &cfg.variations_sweep);
  set_int("test_variations", &cfg.test_variations);
  set_int("epochs", &cfg.epochs);
  set_int("batch_size", &cfg.batch_size);
  set_double("learning_rate", &cfg.learning_rate);
  set_string("optimizer", &cfg.optimizer);
  set_double("momentum", &cfg.momentum);
  set_int("patience", &cfg.patience);
  set_double("validation_fraction", &cfg.validation_fraction);
  set_string("variation_mode", &cfg.variation_mode);
  set_string("train_receiver", &cfg.train_receiver);
  set_int("threads", &cfg.threads);

  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      if (!split_ws(line).empty())
        fail(line_no, "", "expected 'key = value', got '" + line + "'");
      continue;
    }
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) fail(line_no, "", "missing key before '='");
    const auto it = setters.find(key);
    if (it == setters.end())
      fail(line_no, key,
           "unknown key; run with --schema to list the accepted keys");
    if (value.empty()) fail(line_no, key, "missing value");
    it->second(value, line_no);
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file " + path);
  return load_config(is);
}

}  // namespace jcr
