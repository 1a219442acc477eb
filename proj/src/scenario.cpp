#include "fhlab/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

namespace fhlab::scenario {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string strip_quotes(const std::string& s) {
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') return s.substr(1, s.size() - 2);
  return s;
}

}  // namespace

const Entry* Section::find(const std::string& key) const {
  for (const auto& [k, e] : entries)
    if (k == key) return &e;
  return nullptr;
}

std::string Section::get_str(const std::string& key, const std::string& fallback) const {
  const Entry* e = find(key);
  return e ? strip_quotes(e->value) : fallback;
}

double Section::get_num(const std::string& key, double fallback) const {
  const Entry* e = find(key);
  if (!e) return fallback;
  try {
    size_t pos;
    const double v = std::stod(e->value, &pos);
    if (pos != e->value.size()) throw std::invalid_argument("trailing junk");
    return v;
  } catch (const std::exception&) {
    throw ConfigError(e->line, key, "expected a number, got '" + e->value + "'");
  }
}

int Section::get_int(const std::string& key, int fallback) const {
  const double v = get_num(key, fallback);
  if (v != std::floor(v)) {
    const Entry* e = find(key);
    throw ConfigError(e ? e->line : line, key, "expected an integer");
  }
  return static_cast<int>(v);
}

std::vector<double> Section::get_list(const std::string& key) const {
  const Entry* e = find(key);
  if (!e) return {};
  std::vector<double> out;
  std::stringstream ss(strip_quotes(e->value));
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw ConfigError(e->line, key, "expected a comma separated number list");
    }
  }
  return out;
}

const Section* ConfigFile::section(const std::string& name) const {
  for (const auto& s : sections)
    if (s.name == name) return &s;
  return nullptr;
}

std::vector<const Section*> ConfigFile::sections_named(const std::string& name) const {
  std::vector<const Section*> out;
  for (const auto& s : sections)
    if (s.name == name) out.push_back(&s);
  return out;
}

ConfigFile parse_config_text(const std::string& text) {
  ConfigFile cfg;
  cfg.raw = text;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  Section* cur = nullptr;
  while (std::getline(ss, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(lineno, line, "unterminated section header");
      Section s;
      s.name = trim(line.substr(1, line.size() - 2));
      s.line = lineno;
      if (s.name.empty()) throw ConfigError(lineno, line, "empty section name");
      cfg.sections.push_back(std::move(s));
      cur = &cfg.sections.back();
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(lineno, line, "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(lineno, line, "empty key");
    if (!cur) throw ConfigError(lineno, key, "key outside any [section]");
    cur->entries.push_back({key, Entry{value, lineno}});
  }
  return cfg;
}

ConfigFile parse_config_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError(0, path, "cannot open config file");
  std::stringstream buf;
  buf << is.rdbuf();
  return parse_config_text(buf.str());
}

namespace {

const std::vector<std::string> kBuiltins = {"one",   "x1",       "x1x2",
                                            "y2s",   "poly2",    "counterexample_f",
                                            "caloric2"};

bool is_builtin(const std::string& name) {
  return std::find(kBuiltins.begin(), kBuiltins.end(), name) != kBuiltins.end();
}

// combo grammar: term ( '+' term )* with term = [coef '*'] builtin
std::vector<std::pair<double, std::string>> parse_combo(const std::string& spec, int line) {
  std::vector<std::pair<double, std::string>> terms;
  std::stringstream ss(spec);
  std::string term;
  while (std::getline(ss, term, '+')) {
    term = trim(term);
    if (term.empty()) throw ConfigError(line, "field", "empty term in combo '" + spec + "'");
    double coef = 1.0;
    std::string name = term;
    const auto star = term.find('*');
    if (star != std::string::npos) {
      try {
        coef = std::stod(trim(term.substr(0, star)));
      } catch (const std::exception&) {
        throw ConfigError(line, "field", "bad coefficient in '" + term + "'");
      }
      name = trim(term.substr(star + 1));
    }
    if (!is_builtin(name))
      throw ConfigError(line, "field", "unknown builtin '" + name + "' in combo");
    terms.push_back({coef, name});
  }
  if (terms.empty()) throw ConfigError(line, "field", "empty field spec");
  return terms;
}

evaluator::EvalPtr make_builtin(const std::string& name, double s, double a, int dim) {
  using namespace evaluator;
  if (name == "one") return make_one();
  if (name == "x1") return make_x1();
  if (name == "x1x2") return make_x1x2();
  if (name == "y2s") return make_y2s(s);
  if (name == "poly2") return make_poly2(dim, a);
  if (name == "counterexample_f") return make_counterexample(dim);
  if (name == "caloric2") return make_caloric2(dim);
  throw std::invalid_argument("unknown builtin " + name);
}

}  // namespace

bool is_grid_field(const std::string& field_spec) {
  return field_spec == "spectrum" || field_spec == "random";
}

evaluator::EvalPtr make_evaluator(const Scenario& sc) {
  const double a = 1.0 - 2.0 * sc.s;
  if (is_grid_field(sc.field))
    throw std::invalid_argument("scenario '" + sc.name +
                                "': field is a grid spectrum, not a closed-form evaluator");
  if (is_builtin(sc.field)) return make_builtin(sc.field, sc.s, a, sc.grid.dim);
  const auto terms = parse_combo(sc.field, 0);
  std::vector<std::pair<double, evaluator::EvalPtr>> evs;
  for (const auto& [c, name] : terms) evs.push_back({c, make_builtin(name, sc.s, a, sc.grid.dim)});
  return evaluator::make_superposition(std::move(evs));
}

fields::SpaceTimeField make_grid_field(const Scenario& sc, unsigned long long seed) {
  const auto& g = sc.grid;
  g.validate();
  std::vector<fields::cplx> sp(g.total(), fields::cplx(0.0));
  const auto put_mode = [&](int k0, int k1, int kt, fields::cplx c) {
    const int j0 = (k0 % g.nx[0] + g.nx[0]) % g.nx[0];
    const int j1 = (k1 % g.nx[1] + g.nx[1]) % g.nx[1];
    const int jt = (kt % g.nt + g.nt) % g.nt;
    sp[g.index(j0, j1, jt)] += c * static_cast<double>(g.total());
  };
  if (sc.field == "spectrum") {
    for (const auto& m : sc.modes) put_mode(m.kx0, m.kx1, m.kt, {m.re, m.im});
  } else if (sc.field == "random") {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> kx(-g.nx[0] / 4, g.nx[0] / 4);
    std::uniform_int_distribution<int> kt(-g.nt / 4, g.nt / 4);
    std::uniform_real_distribution<double> amp(-1.0, 1.0);
    for (int m = 0; m < sc.random_modes; ++m) {
      const int k0 = kx(rng), k1 = sc.grid.dim == 2 ? kx(rng) : 0, ktm = kt(rng);
      const fields::cplx c(amp(rng), amp(rng));
      put_mode(k0, k1, ktm, c);
      put_mode(-k0, -k1, -ktm, std::conj(c));  // keep the field real
    }
  } else {
    throw std::invalid_argument("scenario '" + sc.name + "': field '" + sc.field +
                                "' is not a grid field");
  }
  return fields::SpaceTimeField::from_spectrum(g, std::move(sp));
}

double spec_kappa(const std::string& field_spec, double s) {
  if (is_builtin(field_spec)) return evaluator::builtin_kappa(field_spec, s);
  if (is_grid_field(field_spec)) return std::numeric_limits<double>::quiet_NaN();
  double k = std::numeric_limits<double>::infinity();
  for (const auto& [c, name] : parse_combo(field_spec, 0)) {
    (void)c;
    k = std::min(k, evaluator::builtin_kappa(name, s));
  }
  return k;
}

ParsedConfig interpret(ConfigFile cfg) {
  ParsedConfig out;
  out.file = std::move(cfg);
  const Section* sc = out.file.section("scenario");
  if (!sc) throw ConfigError(0, "scenario", "missing [scenario] section");
  Scenario s;
  s.name = sc->get_str("name", "unnamed");
  s.s = sc->get_num("s", 0.5);
  if (!(s.s > 0.0) || !(s.s < 1.0))
    throw ConfigError(sc->find("s") ? sc->find("s")->line : sc->line, "s",
                      "order s must lie in (0,1)");
  s.grid.dim = sc->get_int("dim", 1);
  s.grid.nx[0] = sc->get_int("nx", 64);
  s.grid.nx[1] = s.grid.dim == 2 ? sc->get_int("nx", 64) : 1;
  s.grid.lx[0] = s.grid.lx[1] = sc->get_num("lx_len", 2.0);
  s.grid.nt = sc->get_int("nt", 64);
  s.grid.tspan = sc->get_num("tspan_len2", 1.0);
  try {
    s.grid.validate();
  } catch (const std::exception& e) {
    throw ConfigError(sc->line, "scenario", e.what());
  }
  s.field = sc->get_str("field", "one");
  s.potential = sc->get_str("potential", "none");
  if (s.potential != "none" && s.potential != "manufactured")
    throw ConfigError(sc->line, "potential", "must be 'none' or 'manufactured'");
  s.floor_frac = sc->get_num("floor_frac", 0.1);
  if (!(s.floor_frac > 0.0))
    throw ConfigError(sc->line, "floor_frac", "must be positive");
  s.random_modes = sc->get_int("random_modes", 5);
  for (const Section* ms : out.file.sections_named("mode")) {
    SpectrumMode m;
    m.kx0 = ms->get_int("kx0", 0);
    m.kx1 = ms->get_int("kx1", 0);
    m.kt = ms->get_int("kt", 0);
    m.re = ms->get_num("re", 0.0);
    m.im = ms->get_num("im", 0.0);
    s.modes.push_back(m);
  }
  if (s.field == "spectrum" && s.modes.empty())
    throw ConfigError(sc->line, "field", "field = spectrum requires [mode] sections");
  // validate evaluator specs eagerly so bad builtins fail at parse time
  if (!is_grid_field(s.field) && !is_builtin(s.field)) parse_combo(s.field, sc->line);
  out.scenario = std::move(s);
  for (const auto& sec : out.file.sections) {
    if (sec.name.rfind("experiment.", 0) == 0) {
      const std::string name = sec.name.substr(11);
      for (const auto& [prev, psec] : out.experiments) {
        (void)psec;
        if (prev == name)
          throw ConfigError(sec.line, sec.name, "experiment declared twice");
      }
      out.experiments.push_back({name, &sec});
    }
  }
  return out;
}

}  // namespace fhlab::scenario
