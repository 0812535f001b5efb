// Command-line front end: seeded Monte-Carlo experiment families emitting
// CSV tables. Subcommands: secrecy, rmse, converge, train.
#include <CLI11.hpp>
#include <cstdio>
#include <exception>
#include <string>

#include "jcr/config.hpp"
#include "jcr/experiments.hpp"

namespace {

struct CommonArgs {
  std::string config_path;
  std::uint64_t seed = 1;
  std::string out_dir = "out";
};

void add_common(CLI::App* sub, CommonArgs& args) {
  sub->add_option("--config", args.config_path, "experiment config file")
      ->required()
      ->check(CLI::ExistingFile);
  sub->add_option("--seed", args.seed, "master seed (default 1)");
  sub->add_option("--out", args.out_dir,
                  "output directory (JCR_OUT_DIR overrides)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "jcrsim: joint communication-radar cohabitation experiments\n"
      "Monte-Carlo sweeps are reproducible: identical (--config, --seed) "
      "produce byte-identical tables."};

  bool show_schema = false;
  app.add_flag("--schema", show_schema, "print the config schema and exit");

  CommonArgs secrecy_args, rmse_args, converge_args, train_args;
  CLI::App* secrecy = app.add_subcommand(
      "secrecy", "average secrecy/communication rates over antenna counts");
  add_common(secrecy, secrecy_args);
  CLI::App* rmse = app.add_subcommand(
      "rmse", "autoencoder RMSE against the null-projection and genie curves");
  add_common(rmse, rmse_args);
  CLI::App* converge =
      app.add_subcommand("converge", "per-iteration secrecy-rate traces");
  add_common(converge, converge_args);
  CLI::App* train = app.add_subcommand(
      "train", "train and store the cancellation networks and loss curves");
  add_common(train, train_args);

  CLI11_PARSE(app, argc, argv);

  try {
    if (show_schema) {
      std::fputs(jcr::config_schema_text().c_str(), stdout);
      return 0;
    }
    if (app.get_subcommands().empty()) {
      std::fputs(app.help().c_str(), stderr);
      return 1;
    }
    auto run = [](CLI::App* sub, const CommonArgs& args, auto&& fn) {
      if (!sub->parsed()) return false;
      const jcr::ExperimentConfig cfg =
          jcr::load_config_file(args.config_path);
      const std::string out = jcr::experiments::resolve_out_dir(args.out_dir);
      fn(cfg, args.seed, out);
      std::printf("wrote results to %s\n", out.c_str());
      return true;
    };
    if (run(secrecy, secrecy_args, jcr::experiments::run_secrecy_sweep))
      return 0;
    if (run(rmse, rmse_args, jcr::experiments::run_rmse_sweep)) return 0;
    if (run(converge, converge_args, jcr::experiments::run_convergence_trace))
      return 0;
    if (run(train, train_args, jcr::experiments::run_train)) return 0;
  } catch (const std::exception& ex) {
    std::fprintf(stderr, "error: %s\n", ex.what());
    return 1;
  }
  return 0;
}
