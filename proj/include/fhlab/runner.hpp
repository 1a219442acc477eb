#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "fhlab/scenario.hpp"

// Experiment dispatch: builds the scenario objects, runs the requested
// experiments, writes CSV outputs plus a JSON run report and a MANIFEST of
// output hashes.

namespace fhlab::runner {

inline constexpr const char* kToolVersion = "0.1.0";

struct RunOptions {
  std::string out_dir = ".";
  int threads = 1;
  unsigned long long seed = 0;
  double tolerance_scale = 1.0;
};

struct ExperimentResult {
  std::string name;
  std::string status;  // pass | fail | report-only
  std::map<std::string, double> metrics;
  std::vector<std::string> outputs;
  std::vector<std::string> notes;
  double wall_seconds = 0.0;
};

struct RunReport {
  std::string scenario_name;
  std::string config_echo;
  std::vector<ExperimentResult> experiments;
  bool ok() const {
    for (const auto& e : experiments)
      if (e.status == "fail") return false;
    return true;
  }
};

// Runs every experiment declared in the config, in declaration order.
RunReport run(const scenario::ParsedConfig& cfg, const RunOptions& opt);

// Runs a single experiment by name with the parameters from the config
// (the section may be absent; defaults apply).
ExperimentResult run_experiment(const std::string& name, const scenario::ParsedConfig& cfg,
                                const RunOptions& opt);

void write_report_json(const std::string& path, const RunReport& rep, const RunOptions& opt);
void write_manifest(const std::string& out_dir, const RunReport& rep);

// Deterministic slot-based parallel map; results must be written to
// preallocated indices inside fn.
void parallel_for(int n, int threads, const std::function<void(int)>& fn);

int thread_count_from(int cli_threads);  // falls back to FHLAB_THREADS

}  // namespace fhlab::runner
