#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "fhlab/evaluator.hpp"
#include "fhlab/fields.hpp"
#include "fhlab/fracheat.hpp"

// Line-oriented key/value configs (TOML-style sections) and the scenario
// they describe: grid, order s, field spec, potential mode, and an ordered
// experiment list with parameters.

namespace fhlab::scenario {

struct ConfigError : std::runtime_error {
  ConfigError(int line_, std::string field_, const std::string& what_)
      : std::runtime_error("config line " + std::to_string(line_) + ", field '" + field_ +
                           "': " + what_),
        line(line_),
        field(std::move(field_)) {}
  int line;
  std::string field;
};

struct Entry {
  std::string value;
  int line = 0;
};

struct Section {
  std::string name;
  int line = 0;
  std::vector<std::pair<std::string, Entry>> entries;

  const Entry* find(const std::string& key) const;
  std::string get_str(const std::string& key, const std::string& fallback) const;
  double get_num(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;
  std::vector<double> get_list(const std::string& key) const;  // comma separated
  bool has(const std::string& key) const { return find(key) != nullptr; }
};

struct ConfigFile {
  std::string raw;
  std::vector<Section> sections;

  const Section* section(const std::string& name) const;
  std::vector<const Section*> sections_named(const std::string& name) const;
};

ConfigFile parse_config_text(const std::string& text);
ConfigFile parse_config_file(const std::string& path);

struct SpectrumMode {
  int kx0 = 0, kx1 = 0, kt = 0;
  double re = 0.0, im = 0.0;
};

struct Scenario {
  std::string name = "unnamed";
  double s = 0.5;
  fields::SpaceTimeGrid grid;
  std::string field = "one";  // builtin, combo "a*f1 + b*f2", spectrum, random
  std::vector<SpectrumMode> modes;
  int random_modes = 5;
  std::string potential = "none";  // none | manufactured
  double floor_frac = 0.1;
};

// Scenario + ordered experiments from a parsed config (validates invariants,
// throws ConfigError). Owns the config text the section pointers refer to;
// move-only so they cannot dangle.
struct ParsedConfig {
  ConfigFile file;
  Scenario scenario;
  std::vector<std::pair<std::string, const Section*>> experiments;  // into file

  ParsedConfig() = default;
  ParsedConfig(const ParsedConfig&) = delete;
  ParsedConfig& operator=(const ParsedConfig&) = delete;
  ParsedConfig(ParsedConfig&&) = default;
  ParsedConfig& operator=(ParsedConfig&&) = default;
};
ParsedConfig interpret(ConfigFile cfg);

// Field spec resolution.
bool is_grid_field(const std::string& field_spec);  // spectrum | random
evaluator::EvalPtr make_evaluator(const Scenario& sc);  // builtin or combo
fields::SpaceTimeField make_grid_field(const Scenario& sc, unsigned long long seed);

// Exact homogeneity kappa of a builtin/combo spec: the lowest kappa among
// the combo terms (the blow-up limit); NaN when unknown.
double spec_kappa(const std::string& field_spec, double s);

}  // namespace fhlab::scenario
