#include "radheat/cli/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

namespace radheat::cli {

namespace {

using potential::Coefficient;
using potential::Family;
using potential::PotentialSpec;

const Json& empty_object() {
  static const Json e = Json::object();
  return e;
}

const Json* find(const Json& sec, const std::string& key) {
  if (!sec.is_object()) return nullptr;
  auto it = sec.find(key);
  return it == sec.end() || it->is_null() ? nullptr : &*it;
}

std::string at(const std::string& where, const std::string& key) { return where + "." + key; }

Coefficient parse_coefficient(const Json& j, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": coefficient must be an object with 'form' and 'params'");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (it.key() != "form" && it.key() != "params") throw ConfigError(where + ": unknown key '" + it.key() + "'");
  const std::string form = get_string(j, "form", "power", where);
  const Json& p = find(j, "params") ? j.at("params") : empty_object();
  if (!p.is_object()) throw ConfigError(where + ".params must be an object");
  static const std::set<std::string> keys = {"K0", "delta", "c0", "c1", "d0", "d1", "a"};
  for (auto it = p.begin(); it != p.end(); ++it)
    if (!keys.count(it.key())) throw ConfigError(where + ".params: unknown key '" + it.key() + "'");
  const std::string pw = where + ".params";
  Coefficient c;
  if (form == "constant") {
    c = Coefficient::constant(get_number(p, "K0", 1.0, pw));
  } else if (form == "power") {
    c = Coefficient::power(get_number(p, "K0", 1.0, pw), get_number(p, "delta", 0.0, pw));
  } else if (form == "affine_power") {
    c = Coefficient::affine_power(get_number(p, "c0", 1.0, pw), get_number(p, "c1", 1.0, pw),
                                  require_number(p, "a", pw));
  } else if (form == "rational_power") {
    c = Coefficient::rational_power(get_number(p, "c0", 1.0, pw), get_number(p, "c1", 1.0, pw),
                                    require_number(p, "a", pw));
  } else if (form == "ratio_power") {
    c = Coefficient::ratio_power(get_number(p, "c0", 1.0, pw), get_number(p, "c1", 1.0, pw),
                                 get_number(p, "d0", 1.0, pw), get_number(p, "d1", 1.0, pw),
                                 require_number(p, "a", pw));
  } else {
    throw ConfigError(where + ": unknown coefficient form '" + form +
                      "' (constant, power, affine_power, rational_power, ratio_power)");
  }
  if (form != "constant" && form != "power") {
    c.K0 = get_number(p, "K0", 1.0, pw);
    c.delta = get_number(p, "delta", 0.0, pw);
  }
  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(where + ": " + e.what());
  }
  return c;
}

Json coefficient_to_json(const Coefficient& c) {
  Json p = {{"K0", c.K0}, {"delta", c.delta}};
  if (c.form != "power") {
    if (c.form == "rational_power") {
      p["c0"] = c.d0;
      p["c1"] = c.d1;
    } else {
      p["c0"] = c.c0;
      p["c1"] = c.c1;
    }
    if (c.form == "ratio_power") {
      p["d0"] = c.d0;
      p["d1"] = c.d1;
    }
    p["a"] = c.a;
  }
  return {{"form", c.form}, {"params", p}};
}

}  // namespace

Json load_config(const std::filesystem::path& path) {
  if (path.empty()) return Json::object();
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  Json j;
  try {
    j = Json::parse(in, nullptr, true, true);
  } catch (const Json::parse_error& e) {
    throw ConfigError("config file '" + path.string() + "' is not valid JSON: " + e.what());
  }
  if (!j.is_object()) throw ConfigError("config file must hold a JSON object");
  return j;
}

void apply_override(Json& cfg, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("--set expects key=value, got '" + assignment + "'");
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  Json value;
  try {
    value = Json::parse(text);
  } catch (const Json::parse_error&) {
    value = text;
  }
  Json* node = &cfg;
  std::size_t start = 0;
  while (true) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (part.empty()) throw ConfigError("--set: empty path component in '" + key + "'");
    if (!node->is_object()) throw ConfigError("--set: '" + key + "' descends into a non-object");
    if (dot == std::string::npos) {
      (*node)[part] = value;
      return;
    }
    node = &(*node)[part];
    if (node->is_null()) *node = Json::object();
    start = dot + 1;
  }
}

void check_keys(const Json& cfg, const std::string& name, std::initializer_list<const char*> allowed) {
  const Json* sec = find(cfg, name);
  if (!sec) return;
  if (!sec->is_object()) throw ConfigError("section '" + name + "' must be an object");
  for (auto it = sec->begin(); it != sec->end(); ++it) {
    const bool ok = std::any_of(allowed.begin(), allowed.end(), [&](const char* k) { return it.key() == k; });
    if (!ok) throw ConfigError("section '" + name + "': unknown key '" + it.key() + "'");
  }
}

void check_top_level(const Json& cfg) {
  static const std::set<std::string> keys = {"potential", "solver", "shoot", "sweep", "portrait", "barriers",
                                             "grid", "evolve", "data", "dichotomy", "fujita"};
  for (auto it = cfg.begin(); it != cfg.end(); ++it)
    if (!keys.count(it.key())) throw ConfigError("unknown config section '" + it.key() + "'");
}

const Json& section(const Json& cfg, const std::string& name) {
  const Json* s = find(cfg, name);
  if (!s) return empty_object();
  if (!s->is_object()) throw ConfigError("section '" + name + "' must be an object");
  return *s;
}

double get_number(const Json& sec, const std::string& key, double fallback, const std::string& where) {
  const Json* v = find(sec, key);
  if (!v) return fallback;
  if (v->is_string()) {
    const auto s = v->get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
  }
  if (!v->is_number()) throw ConfigError(at(where, key) + " must be a number");
  return v->get<double>();
}

double require_number(const Json& sec, const std::string& key, const std::string& where) {
  if (!find(sec, key)) throw ConfigError(at(where, key) + " is required");
  return get_number(sec, key, 0.0, where);
}

long get_integer(const Json& sec, const std::string& key, long fallback, const std::string& where) {
  const Json* v = find(sec, key);
  if (!v) return fallback;
  if (v->is_number_integer()) return v->get<long>();
  if (v->is_number_float()) {
    const double d = v->get<double>();
    if (d == std::floor(d) && std::abs(d) < 9e15) return static_cast<long>(d);
  }
  throw ConfigError(at(where, key) + " must be an integer");
}

bool get_bool(const Json& sec, const std::string& key, bool fallback, const std::string& where) {
  const Json* v = find(sec, key);
  if (!v) return fallback;
  if (!v->is_boolean()) throw ConfigError(at(where, key) + " must be true or false");
  return v->get<bool>();
}

std::string get_string(const Json& sec, const std::string& key, const std::string& fallback,
                       const std::string& where) {
  const Json* v = find(sec, key);
  if (!v) return fallback;
  if (!v->is_string()) throw ConfigError(at(where, key) + " must be a string");
  return v->get<std::string>();
}

std::vector<double> get_numbers(const Json& sec, const std::string& key, std::vector<double> fallback,
                                const std::string& where) {
  const Json* v = find(sec, key);
  if (!v) return fallback;
  const std::string w = at(where, key);
  if (v->is_number()) return {v->get<double>()};
  if (v->is_object()) {
    for (auto it = v->begin(); it != v->end(); ++it)
      if (it.key() != "from" && it.key() != "to" && it.key() != "count")
        throw ConfigError(w + ": unknown key '" + it.key() + "' (from, to, count)");
    const double a = require_number(*v, "from", w), b = require_number(*v, "to", w);
    const long c = get_integer(*v, "count", 0, w);
    if (!(a > 0.0 && b > a) || c < 2) throw ConfigError(w + ": need 0 < from < to and count >= 2");
    return potential::log_grid(a, b, static_cast<std::size_t>(c));
  }
  if (!v->is_array()) throw ConfigError(w + " must be a number list");
  std::vector<double> out;
  for (const auto& x : *v) {
    if (!x.is_number()) throw ConfigError(w + " must contain only numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

PotentialSpec parse_potential(const Json& cfg) {
  check_keys(cfg, "potential", {"n", "family", "q", "k"});
  const Json* sec = find(cfg, "potential");
  if (!sec) throw ConfigError("config needs a 'potential' section");
  const std::string w = "potential";
  PotentialSpec spec;
  const long n = get_integer(*sec, "n", 3, w);
  if (n <= 2 || n > 1000) throw ConfigError("potential.n must be an integer in (2, 1000]");
  spec.n = static_cast<int>(n);
  try {
    spec.family = potential::family_from_string(get_string(*sec, "family", "PurePower", w));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("potential.family: ") + e.what() + " (PurePower, SingleK, SumK, MinK)");
  }
  spec.q = get_numbers(*sec, "q", {}, w);
  const std::size_t nq = spec.family == Family::SumK || spec.family == Family::MinK ? 2 : 1;
  if (spec.q.size() != nq)
    throw ConfigError("potential.q needs " + std::to_string(nq) + " exponent(s) for family " +
                      potential::to_string(spec.family));
  const std::size_t nk = spec.family == Family::SumK ? 2 : 1;
  const Json* k = find(*sec, "k");
  if (!k) {
    if (spec.family != Family::PurePower) throw ConfigError("potential.k is required for this family");
    spec.k = {Coefficient::constant()};
  } else if (k->is_object()) {
    spec.k = {parse_coefficient(*k, "potential.k")};
  } else if (k->is_array()) {
    for (std::size_t i = 0; i < k->size(); ++i)
      spec.k.push_back(parse_coefficient((*k)[i], "potential.k[" + std::to_string(i) + "]"));
  } else {
    throw ConfigError("potential.k must be an object or a list of objects");
  }
  if (spec.k.size() != nk)
    throw ConfigError("potential.k needs " + std::to_string(nk) + " coefficient(s) for family " +
                      potential::to_string(spec.family));
  try {
    spec.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("potential: ") + e.what());
  }
  return spec;
}

Json potential_to_json(const PotentialSpec& spec) {
  Json ks = Json::array();
  for (const auto& c : spec.k) ks.push_back(coefficient_to_json(c));
  return {{"n", spec.n}, {"family", potential::to_string(spec.family)}, {"q", spec.q}, {"k", ks}};
}

shooting::ShootOptions parse_solver(const Json& cfg, shooting::ShootOptions d) {
  check_keys(cfg, "solver", {"rtol", "atol", "start_accuracy"});
  const Json& s = section(cfg, "solver");
  d.rtol = get_number(s, "rtol", d.rtol, "solver");
  d.atol = get_number(s, "atol", d.atol, "solver");
  d.start_accuracy = get_number(s, "start_accuracy", d.start_accuracy, "solver");
  if (!(d.rtol > 0.0 && d.rtol < 1e-2) || !(d.atol > 0.0) || !(d.start_accuracy > 0.0 && d.start_accuracy < 1e-2))
    throw ConfigError("solver: need 0 < rtol < 1e-2, atol > 0, 0 < start_accuracy < 1e-2");
  return d;
}

parabolic::RadialGrid parse_grid(const Json& cfg, int n, const GridDefaults& d) {
  check_keys(cfg, "grid", {"r_min", "r_max", "h0", "growth"});
  const Json& g = section(cfg, "grid");
  const double r_min = get_number(g, "r_min", d.r_min, "grid");
  const double r_max = get_number(g, "r_max", d.r_max, "grid");
  const double h0 = get_number(g, "h0", d.h0, "grid");
  const double growth = get_number(g, "growth", d.growth, "grid");
  if (!(r_min >= 0.0 && r_max > r_min && std::isfinite(r_max))) throw ConfigError("grid: need 0 <= r_min < r_max < inf");
  if (!(h0 > 0.0) || !(growth >= 1.0 && growth <= 1.5)) throw ConfigError("grid: need h0 > 0 and 1 <= growth <= 1.5");
  try {
    return parabolic::RadialGrid::graded(n, r_min, r_max, h0, growth);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("grid: ") + e.what());
  }
}

parabolic::EvolveControls parse_evolve(const Json& cfg) {
  check_keys(cfg, "evolve",
             {"scheme", "t_end", "dt_init", "dt_max", "rtol", "cfl", "mmatrix", "inner_nu", "kappa", "nu", "outer",
              "norm_nus", "output_times", "blowup_threshold", "decay_floor", "dt_collapse", "steady_tol",
              "min_window", "max_steps", "monotone_slack", "stop_on_fate"});
  const Json& e = section(cfg, "evolve");
  const std::string w = "evolve";
  parabolic::EvolveControls c;
  try {
    c.scheme = parabolic::scheme_from_string(get_string(e, "scheme", "implicit", w));
  } catch (const std::invalid_argument& ex) {
    throw ConfigError(std::string("evolve.scheme: ") + ex.what());
  }
  c.t_end = get_number(e, "t_end", c.t_end, w);
  c.dt_init = get_number(e, "dt_init", c.dt_init, w);
  c.dt_max = get_number(e, "dt_max", c.dt_max, w);
  c.rtol = get_number(e, "rtol", c.rtol, w);
  c.cfl = get_number(e, "cfl", c.cfl, w);
  c.mmatrix = get_number(e, "mmatrix", c.mmatrix, w);
  c.inner_nu = get_number(e, "inner_nu", c.inner_nu, w);
  c.kappa = get_number(e, "kappa", c.kappa, w);
  c.weight.nu = get_number(e, "nu", 0.0, w);
  c.weight.outer = get_number(e, "outer", 0.0, w);
  c.norm_nus = get_numbers(e, "norm_nus", {}, w);
  c.output_times = get_numbers(e, "output_times", {}, w);
  c.fate.blowup_threshold = get_number(e, "blowup_threshold", c.fate.blowup_threshold, w);
  c.fate.decay_floor = get_number(e, "decay_floor", c.fate.decay_floor, w);
  c.fate.dt_collapse = get_number(e, "dt_collapse", c.fate.dt_collapse, w);
  c.fate.steady_tol = get_number(e, "steady_tol", c.fate.steady_tol, w);
  c.fate.min_window = static_cast<std::size_t>(get_integer(e, "min_window", 5, w));
  c.max_steps = static_cast<std::size_t>(get_integer(e, "max_steps", 5'000'000, w));
  c.monotone_slack = get_number(e, "monotone_slack", c.monotone_slack, w);
  c.stop_on_fate = get_bool(e, "stop_on_fate", c.stop_on_fate, w);
  if (!(c.t_end > 0.0) || !(c.rtol > 0.0) || !(c.cfl > 0.0 && c.cfl <= 1.0) || !(c.mmatrix > 0.0 && c.mmatrix < 1.0))
    throw ConfigError("evolve: need t_end > 0, rtol > 0, 0 < cfl <= 1, 0 < mmatrix < 1");
  if (!(c.dt_init >= 0.0) || !(c.dt_max > 0.0)) throw ConfigError("evolve: need dt_init >= 0 and dt_max > 0");
  if (!(c.fate.blowup_threshold > 0.0) || !(c.fate.decay_floor >= 0.0) || !(c.fate.dt_collapse > 0.0))
    throw ConfigError("evolve: fate thresholds must be positive");
  if (c.fate.min_window < 2) throw ConfigError("evolve.min_window must be >= 2");
  if (!(c.weight.nu >= 0.0) || !(c.weight.outer >= 0.0)) throw ConfigError("evolve: nu and outer must be >= 0");
  for (double t : c.output_times)
    if (!(t >= 0.0 && std::isfinite(t))) throw ConfigError("evolve.output_times must be finite and >= 0");
  for (double nu : c.norm_nus)
    if (!(nu >= 0.0)) throw ConfigError("evolve.norm_nus must be >= 0");
  return c;
}

}  // namespace radheat::cli
