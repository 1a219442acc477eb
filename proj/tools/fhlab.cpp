#include <cstdio>
#include <exception>
#include <filesystem>
#include <string>

#include <CLI11.hpp>

#include "fhlab/runner.hpp"
#include "fhlab/scenario.hpp"

// fhlab: scenario runner for the fractional heat laboratory. `run` executes
// every experiment a config declares; the named subcommands run a single
// experiment from the same config. Exit codes: 0 all experiments passed,
// 1 experiment failure, 2 configuration error.

namespace {

struct CommonArgs {
  std::string config;
  std::string out_dir = "out";
  int threads = 0;  // 0: use FHLAB_THREADS or 1
  unsigned long long seed = 0;
  double tolerance_scale = 1.0;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config, "scenario config file")->required();
  cmd->add_option("--out-dir", args.out_dir, "output directory");
  cmd->add_option("--threads", args.threads, "worker threads (default FHLAB_THREADS or 1)");
  cmd->add_option("--seed", args.seed, "seed for random scenario fields");
  cmd->add_option("--tolerance-scale", args.tolerance_scale, "scales pass/fail tolerances");
}

int finish(const fhlab::runner::RunReport& rep) {
  for (const auto& e : rep.experiments) {
    std::printf("%-16s %s", e.name.c_str(), e.status.c_str());
    for (const auto& n : e.notes) std::printf("  [%s]", n.c_str());
    std::printf("\n");
  }
  return rep.ok() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fhlab: fractional heat operator laboratory"};
  app.require_subcommand(1);

  const std::vector<std::string> experiments = {"op-check",  "extend-check",    "frequency",
                                                "blowup",    "harnack",         "vanishing-order",
                                                "calibrate-C"};
  CommonArgs args;
  CLI::App* run_cmd = app.add_subcommand("run", "run every experiment in the config");
  add_common(run_cmd, args);
  for (const auto& name : experiments)
    add_common(app.add_subcommand(name, "run the " + name + " experiment"), args);

  CLI11_PARSE(app, argc, argv);

  try {
    if (!(args.tolerance_scale > 0.0)) {
      std::fprintf(stderr, "config error: --tolerance-scale must be positive\n");
      return 2;
    }
    const auto file = fhlab::scenario::parse_config_file(args.config);
    const auto cfg = fhlab::scenario::interpret(file);
    fhlab::runner::RunOptions opt;
    opt.out_dir = args.out_dir;
    opt.threads = fhlab::runner::thread_count_from(args.threads);
    opt.seed = args.seed;
    opt.tolerance_scale = args.tolerance_scale;

    if (run_cmd->parsed()) {
      return finish(fhlab::runner::run(cfg, opt));
    }
    for (const auto& name : experiments) {
      if (app.get_subcommand(name)->parsed()) {
        fhlab::runner::RunReport rep;
        rep.scenario_name = cfg.scenario.name;
        rep.config_echo = file.raw;
        rep.experiments.push_back(fhlab::runner::run_experiment(name, cfg, opt));
        fhlab::runner::write_report_json(
            (std::filesystem::path(opt.out_dir) / "report.json").string(), rep, opt);
        fhlab::runner::write_manifest(opt.out_dir, rep);
        return finish(rep);
      }
    }
    std::fprintf(stderr, "no subcommand selected\n");
    return 2;
  } catch (const fhlab::scenario::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
