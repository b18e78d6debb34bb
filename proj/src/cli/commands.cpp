#include "radheat/cli/commands.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <exception>
#include <iomanip>
#include <map>
#include <set>
#include <ostream>
#include <sstream>
#include <thread>

#include "radheat/cli/emit.hpp"

namespace radheat::cli {

namespace {

namespace fs = std::filesystem;
using barriers::BarrierKind;
using barriers::BarrierProfile;
using parabolic::EvolutionResult;
using parabolic::FateKind;
using potential::PotentialSpec;

constexpr shooting::ShootOptions kBarrierSolver{1e-13, 1e-15, 1e-8};

struct Log {
  std::ostream* os;
  template <class T>
  Log& operator<<(const T& v) {
    if (os) *os << v;
    return *this;
  }
};

std::string num(double v) {
  if (!std::isfinite(v)) return fmt(v);
  std::ostringstream s;
  s << std::setprecision(8) << v;
  return s.str();
}

// Potential plus the sections a command reads; anything else in the file is a config error.
PotentialSpec prepare(const Context& ctx) {
  check_top_level(ctx.cfg);
  return parse_potential(ctx.cfg);
}

// ---------------------------------------------------------------- exponents

int cmd_exponents(const Context& ctx) {
  const auto spec = prepare(ctx);
  const auto ce = potential::critical_exponents(spec);
  const auto H = potential::check_H_sign(spec, potential::log_grid(1e-6, 1e6, 121));
  std::vector<double> s_grid;
  for (int i = 0; i <= 80; ++i) s_grid.push_back(-20.0 + 0.5 * i);
  const auto A = potential::check_A_sign(spec, s_grid, potential::log_grid(1e-3, 1e3, 25));

  const std::vector<std::pair<std::string, double>> rows = {
      {"fujita_plus_one", ce.fujita_plus_one}, {"serrin", ce.serrin},   {"sobolev", ce.sobolev},
      {"sigma_low", ce.sigma_low},             {"sigma_high", ce.sigma_high}, {"node_threshold", ce.node_threshold},
      {"l_u", ce.l_u},                         {"l_s", ce.l_s},         {"m_u", ce.m_u},
      {"m_s", ce.m_s}};
  Log log{ctx.log};
  Json j;
  j["potential"] = potential_to_json(spec);
  for (const auto& [k, v] : rows) {
    log << std::left << std::setw(16) << k << num(v) << "\n";
    j[k] = jnum(v);
  }
  log << std::left << std::setw(16) << "H" << potential::to_string(H.sign) << "\n";
  log << std::left << std::setw(16) << "A" << potential::to_string(A) << "\n";
  j["H"] = potential::to_string(H.sign);
  j["A"] = potential::to_string(A);
  ensure_dir(ctx.out);
  write_json(ctx.out / "exponents.json", j);
  return kOk;
}

// ---------------------------------------------------------------- shoot

int cmd_shoot(const Context& ctx) {
  check_keys(ctx.cfg, "shoot", {"kind", "params", "r_max", "r_min", "s0", "s_max", "s_min", "samples"});
  const auto spec = prepare(ctx);
  const auto opt = parse_solver(ctx.cfg, {});
  const Json& sec = section(ctx.cfg, "shoot");
  const std::string kind = get_string(sec, "kind", "regular", "shoot");
  const auto params = get_numbers(sec, "params", {}, "shoot");
  const double r_max = get_number(sec, "r_max", 1e30, "shoot");
  const double r_min = get_number(sec, "r_min", 1e-4, "shoot");
  const double s0 = get_number(sec, "s0", kind == "slow" ? 30.0 : -30.0, "shoot");
  const double s_max = get_number(sec, "s_max", 30.0, "shoot");
  const double s_min = get_number(sec, "s_min", -30.0, "shoot");
  const long samples = get_integer(sec, "samples", 400, "shoot");
  if (samples < 2) throw ConfigError("shoot.samples must be >= 2");

  std::size_t count = 1;
  if (kind == "regular" || kind == "fast") {
    if (params.empty()) throw ConfigError("shoot.params must list at least one " +
                                          std::string(kind == "regular" ? "alpha" : "beta"));
    for (double p : params)
      if (!(p > 0.0 && std::isfinite(p))) throw ConfigError("shoot.params must be positive and finite");
    count = params.size();
  } else if (kind != "singular" && kind != "slow") {
    throw ConfigError("shoot.kind must be regular, fast, singular or slow");
  }

  ensure_dir(ctx.out);
  std::vector<Json> rows(count);
  parallel_for(count, ctx.jobs, [&](std::size_t i) {
    auto prof = kind == "regular" ? shooting::regular_solution(spec, params[i], r_max, opt)
                : kind == "fast"  ? shooting::fast_decay_solution(spec, params[i], r_min, opt)
                : kind == "singular" ? shooting::singular_solution(spec, s0, s_max, opt)
                                     : shooting::slow_decay_solution(spec, s0, s_min, opt);
    const auto stem = ctx.out / ("profile_" + kind + "_" + std::to_string(i));
    write_profile(stem, prof, static_cast<std::size_t>(samples));
    const auto c = prof.classification();
    rows[i] = {{"id", i}, {"param", jnum(prof.param())}, {"tag", shooting::to_string(c.tag)}, {"value", jnum(c.value)}};
  });
  CsvWriter csv(ctx.out / "shoot.csv", "shoot", {"id", "kind", "param", "tag", "value"});
  Log log{ctx.log};
  for (const auto& r : rows) {
    const std::string param = r["param"].is_number() ? fmt(r["param"].get<double>()) : r["param"].get<std::string>();
    const std::string value = r["value"].is_number() ? fmt(r["value"].get<double>()) : r["value"].get<std::string>();
    csv.row({std::to_string(r["id"].get<std::size_t>()), kind, param, r["tag"].get<std::string>(), value});
    log << kind << " " << param << " -> " << r["tag"].get<std::string>() << " " << value << "\n";
  }
  return kOk;
}

// ---------------------------------------------------------------- classify-sweep

int cmd_classify_sweep(const Context& ctx) {
  check_keys(ctx.cfg, "sweep", {"alphas", "r_max"});
  const auto spec = prepare(ctx);
  const auto opt = parse_solver(ctx.cfg, {});
  const Json& sec = section(ctx.cfg, "sweep");
  const auto alphas = get_numbers(sec, "alphas", {}, "sweep");
  const double r_max = get_number(sec, "r_max", 1e30, "sweep");
  if (alphas.empty()) throw ConfigError("sweep.alphas must list at least one value");
  for (double a : alphas)
    if (!(a > 0.0 && std::isfinite(a))) throw ConfigError("sweep.alphas must be positive and finite");
  if (!(r_max > 1.0)) throw ConfigError("sweep.r_max must be > 1");

  std::vector<shooting::Classification> out(alphas.size());
  parallel_for(alphas.size(), ctx.jobs, [&](std::size_t i) {
    out[i] = shooting::classify(shooting::regular_solution(spec, alphas[i], r_max, opt));
  });
  ensure_dir(ctx.out);
  CsvWriter csv(ctx.out / "classification.csv", "classification", {"alpha", "tag", "value"});
  std::map<std::string, int> counts;
  Log log{ctx.log};
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    const std::string tag = shooting::to_string(out[i].tag);
    csv.row({fmt(alphas[i]), tag, fmt(out[i].value)});
    ++counts[tag];
    log << "alpha " << num(alphas[i]) << " -> " << tag << " " << num(out[i].value) << "\n";
  }
  write_json(ctx.out / "classification.json", {{"potential", potential_to_json(spec)}, {"counts", counts}});
  return counts.count("Undecided") ? kInconclusive : kOk;
}

// ---------------------------------------------------------------- portrait

int cmd_portrait(const Context& ctx) {
  check_keys(ctx.cfg, "portrait",
             {"tau", "frame", "alphas", "betas", "singular", "slow", "levels", "resolution", "samples", "r_max"});
  const auto spec = prepare(ctx);
  const auto opt = parse_solver(ctx.cfg, {});
  const Json& sec = section(ctx.cfg, "portrait");
  const std::string w = "portrait";
  const double tau = get_number(sec, "tau", 0.0, w);
  const std::string frame_name = get_string(sec, "frame", "u", w);
  const auto ce = potential::critical_exponents(spec);
  fowler::FowlerParams frame;
  if (frame_name == "u") frame = fowler::FowlerParams::make(spec, ce.l_u);
  else if (frame_name == "s") frame = fowler::FowlerParams::make(spec, ce.l_s);
  else if (frame_name == "sobolev") frame = fowler::FowlerParams::sobolev_frame(spec);
  else throw ConfigError("portrait.frame must be u, s or sobolev");
  const auto alphas = get_numbers(sec, "alphas", {0.25, 0.5, 1.0, 2.0, 4.0}, w);
  const auto betas = get_numbers(sec, "betas", {}, w);
  const bool singular = get_bool(sec, "singular", true, w);
  const bool slow = get_bool(sec, "slow", false, w);
  const long resolution = get_integer(sec, "resolution", 400, w);
  const long samples = get_integer(sec, "samples", 400, w);
  const double r_max = get_number(sec, "r_max", 1e4, w);
  if (resolution < 20 || samples < 2) throw ConfigError("portrait: need resolution >= 20 and samples >= 2");

  Json fixed;
  double b_star = 0.0;
  try {
    const auto fp = fowler::fixed_point_P(spec, frame, fowler::SLimit::at(tau));
    b_star = fp.b_star;
    fixed = {{"P1", jnum(fp.P1)}, {"P2", jnum(fp.P2)}, {"tag", fowler::to_string(fp.tag)},
             {"discriminant", jnum(fp.discriminant)}, {"dg", jnum(fp.dg)}, {"H", jnum(fp.H_at_P)},
             {"b_star", jnum(fp.b_star)}};
  } catch (const std::exception& e) {
    fixed = {{"error", e.what()}};
  }
  std::vector<double> levels = get_numbers(sec, "levels", {}, w);
  if (levels.empty()) levels = {b_star - 0.5 * (std::abs(b_star) + 0.01), 0.5 * b_star, 0.0, 0.05};

  // trajectories
  struct Traj {
    std::string kind;
    double param;
    std::vector<std::array<double, 4>> rows;
  };
  std::vector<std::pair<std::string, double>> jobs;
  for (double a : alphas) jobs.emplace_back("Regular", a);
  for (double b : betas) jobs.emplace_back("FastDecay", b);
  if (singular) jobs.emplace_back("Singular", std::numeric_limits<double>::infinity());
  if (slow) jobs.emplace_back("SlowDecay", std::numeric_limits<double>::infinity());
  std::vector<Traj> trajs(jobs.size());
  parallel_for(jobs.size(), ctx.jobs, [&](std::size_t i) {
    const auto& [kind, p] = jobs[i];
    auto prof = kind == "Regular"     ? shooting::regular_solution(spec, p, r_max, opt)
                : kind == "FastDecay" ? shooting::fast_decay_solution(spec, p, 1.0 / r_max, opt)
                : kind == "Singular"  ? shooting::singular_solution(spec, -30.0, 30.0, opt)
                                      : shooting::slow_decay_solution(spec, 30.0, -30.0, opt);
    Traj t{kind, p, {}};
    const double a = prof.s_lo(), b = prof.s_hi();
    for (long k = 0; k < samples; ++k) {
      const double s = k == samples - 1 ? b : a + (b - a) * static_cast<double>(k) / static_cast<double>(samples - 1);
      const auto pt = prof.phase(s, frame.m);
      t.rows.push_back({s, pt.y1, pt.y2, fowler::pohozaev_H(spec, pt, frame)});
    }
    trajs[i] = std::move(t);
  });

  ensure_dir(ctx.out);
  {
    CsvWriter csv(ctx.out / "trajectories.csv", "trajectories", {"id", "kind", "param", "s", "y1", "y2", "H"});
    for (std::size_t i = 0; i < trajs.size(); ++i)
      for (const auto& r : trajs[i].rows)
        csv.row({std::to_string(i), trajs[i].kind, fmt(trajs[i].param), fmt(r[0]), fmt(r[1]), fmt(r[2]), fmt(r[3])});
  }
  Json level_meta = Json::array();
  {
    CsvWriter csv(ctx.out / "levelsets.csv", "levelsets", {"level", "b", "curve", "closed", "y1", "y2"});
    for (std::size_t i = 0; i < levels.size(); ++i) {
      const auto ls = fowler::level_set_K(spec, levels[i], tau, frame, static_cast<int>(resolution));
      for (std::size_t c = 0; c < ls.curves.size(); ++c)
        for (const auto& p : ls.curves[c])
          csv.row({static_cast<double>(i), levels[i], static_cast<double>(c), ls.closed[c] ? 1.0 : 0.0, p[0], p[1]});
      level_meta.push_back({{"level", i},
                            {"b", jnum(levels[i])},
                            {"b_star", jnum(ls.b_star)},
                            {"topology", fowler::to_string(ls.topology)},
                            {"expected", fowler::to_string(ls.expected)},
                            {"curves", ls.curves.size()}});
    }
  }
  write_json(ctx.out / "portrait.json", {{"potential", potential_to_json(spec)},
                                         {"tau", jnum(tau)},
                                         {"frame", {{"name", frame_name}, {"l", jnum(frame.l)}, {"m", jnum(frame.m)}}},
                                         {"fixed_point", fixed},
                                         {"levels", level_meta}});
  Log log{ctx.log};
  log << "frame l = " << num(frame.l) << ", tau = " << num(tau) << "\n";
  if (fixed.contains("tag")) log << "fixed point P1 = " << num(fixed["P1"].get<double>()) << " " << fixed["tag"].get<std::string>() << "\n";
  for (const auto& l : level_meta) log << "K(" << num(l["b"].is_number() ? l["b"].get<double>() : 0.0) << "): " << l["topology"].get<std::string>() << "\n";
  return kOk;
}

// ---------------------------------------------------------------- barriers

struct BuiltBarriers {
  std::vector<std::pair<std::string, BarrierProfile>> profiles;  // name, profile
  Json anchors;
};

BuiltBarriers build_barriers(const PotentialSpec& spec, const Json& sec, const std::string& w,
                             const shooting::ShootOptions& opt) {
  const std::string construction = get_string(sec, "construction", "gs", w);
  BuiltBarriers out;
  if (construction == "gs") {
    const double a1 = get_number(sec, "alpha1", 1.0, w), a2 = get_number(sec, "alpha2", 1.1, w);
    const double r_max = get_number(sec, "r_max", 1e4, w);
    if (!(a1 > 0.0 && a2 > a1)) throw ConfigError(w + ": need 0 < alpha1 < alpha2");
    auto pair = barriers::build_gs_pair(spec, a1, a2, r_max, opt);
    out.anchors = {{"alpha1", a1}, {"alpha2", a2}};
    out.profiles.emplace_back("upper", std::move(pair.upper));
    out.profiles.emplace_back("lower", std::move(pair.lower));
  } else if (construction == "fast") {
    const double tau = get_number(sec, "tau", 0.0, w);
    auto pair = barriers::build_fast_decay_pair(spec, tau, opt);
    out.anchors = {{"tau", tau}, {"alpha_star", pair.anchors[0]}, {"beta1", pair.anchors[1]},
                   {"beta2", pair.anchors[2]}, {"section", pair.section}};
    out.profiles.emplace_back("upper", std::move(pair.upper));
    out.profiles.emplace_back("lower", std::move(pair.lower));
  } else if (construction == "slow") {
    const double tau = get_number(sec, "tau", 0.0, w);
    out.anchors = {{"tau", tau}};
    out.profiles.emplace_back("chi", barriers::build_slow_decay_upper(spec, tau, opt));
  } else {
    throw ConfigError(w + ".construction must be gs, fast or slow");
  }
  return out;
}

int cmd_barriers(const Context& ctx) {
  check_keys(ctx.cfg, "barriers", {"construction", "alpha1", "alpha2", "r_max", "tau", "samples", "r_range",
                                   "continuity_tol", "residual_tol"});
  const auto spec = prepare(ctx);
  const auto opt = parse_solver(ctx.cfg, kBarrierSolver);
  const Json& sec = section(ctx.cfg, "barriers");
  const long samples = get_integer(sec, "samples", 400, "barriers");
  const auto range = get_numbers(sec, "r_range", {1e-3, 1e3}, "barriers");
  if (samples < 2) throw ConfigError("barriers.samples must be >= 2");
  if (range.size() != 2 || !(range[0] > 0.0 && range[1] > range[0])) throw ConfigError("barriers.r_range must be [r1, r2] with 0 < r1 < r2");
  barriers::VerifyOptions vo;
  vo.continuity_tol = get_number(sec, "continuity_tol", vo.continuity_tol, "barriers");
  vo.residual_tol = get_number(sec, "residual_tol", vo.residual_tol, "barriers");

  const auto built = build_barriers(spec, sec, "barriers", opt);
  ensure_dir(ctx.out);
  Log log{ctx.log};
  bool ok = true;
  Json report = {{"potential", potential_to_json(spec)}, {"anchors", built.anchors}};
  for (const auto& [name, bp] : built.profiles) {
    const auto rep = barriers::verify_barrier(bp, vo);
    write_barrier(ctx.out / ("barrier_" + name), bp, rep, range[0], range[1], static_cast<std::size_t>(samples));
    report[name] = barrier_meta(bp, rep);
    ok = ok && rep.passed;
    log << name << ": " << barriers::to_string(bp.kind()) << " D = " << num(bp.D()) << " L = " << num(bp.L())
        << " R_glue = " << num(bp.R_glue()) << " J = " << num(bp.J()) << " continuity = " << num(rep.continuity)
        << " residual = " << num(rep.residual) << (rep.passed ? " ok" : " FAILED: " + rep.notes) << "\n";
  }
  if (built.profiles.size() == 2) {
    const auto& up = built.profiles[0].second;
    const auto& lo = built.profiles[1].second;
    const auto ord = barriers::check_order(up, lo, potential::log_grid(range[0], range[1], 400));
    report["order"] = {{"ordered", ord.ordered}, {"max_violation", jnum(ord.max_violation)}, {"at_r", jnum(ord.at_r)}};
    ok = ok && ord.ordered;
    log << "order upper <= lower: " << (ord.ordered ? "ok" : "violated") << " (" << num(ord.max_violation) << " at r = "
        << num(ord.at_r) << ")\n";
  }
  report["passed"] = ok;
  write_json(ctx.out / "barriers.json", report);
  return ok ? kOk : kAssertionFailed;
}

// ---------------------------------------------------------------- evolve

struct Prepared {
  std::vector<double> phi;
  double kappa;
  std::string label;
};

std::vector<double> gaussian(const parabolic::RadialGrid& g, double amp, double width) {
  std::vector<double> phi;
  for (double r : g.r) phi.push_back(amp * std::exp(-(r * r) / (width * width)));
  return phi;
}

Prepared discretized(const PotentialSpec& spec, const BarrierProfile& bp, const parabolic::RadialGrid& grid) {
  const auto db = parabolic::discretize_barrier(spec, bp, grid);
  return {db.u, db.kappa, barriers::to_string(db.kind)};
}

Json run_meta(const PotentialSpec& spec, const parabolic::RadialGrid& grid, const EvolutionResult& res,
              const parabolic::EvolveControls& ctl) {
  Json j;
  j["potential"] = potential_to_json(spec);
  j["grid"] = {{"r_min", jnum(grid.r_min())}, {"r_max", jnum(grid.r_max())}, {"h0", jnum(grid.h0)},
               {"growth", jnum(grid.growth)}, {"nodes", grid.size()}};
  try {
    const auto rt = parabolic::suggested_rho_T(spec, res.series.front().norm_w, ctl.weight);
    j["advisory"] = {{"rho", jnum(rt.rho)}, {"T0", jnum(rt.T0)}, {"D1", jnum(rt.D1)}};
  } catch (const std::exception& e) {
    j["advisory"] = {{"error", e.what()}};
  }
  return j;
}

int cmd_evolve(const Context& ctx) {
  check_keys(ctx.cfg, "data", {"type", "amplitude", "width", "construction", "which", "alpha1", "alpha2", "tau", "r_max"});
  const auto spec = prepare(ctx);
  auto ctl = parse_evolve(ctx.cfg);
  const auto grid = parse_grid(ctx.cfg, spec.n, {});
  const Json& data = section(ctx.cfg, "data");
  const std::string type = get_string(data, "type", "gaussian", "data");
  Prepared prep;
  if (type == "gaussian") {
    const double amp = get_number(data, "amplitude", 1.0, "data"), width = get_number(data, "width", 1.0, "data");
    if (!(amp >= 0.0) || !(width > 0.0)) throw ConfigError("data: need amplitude >= 0 and width > 0");
    prep = {gaussian(grid, amp, width), spec.n - 2.0, "gaussian"};
  } else if (type == "barrier") {
    const auto built = build_barriers(spec, data, "data", parse_solver(ctx.cfg, kBarrierSolver));
    const std::string which = get_string(data, "which", built.profiles.front().first, "data");
    const auto it = std::find_if(built.profiles.begin(), built.profiles.end(), [&](const auto& p) { return p.first == which; });
    if (it == built.profiles.end()) throw ConfigError("data.which must name a barrier of the construction (upper, lower or chi)");
    prep = discretized(spec, it->second, grid);
  } else {
    throw ConfigError("data.type must be gaussian or barrier");
  }
  if (std::isnan(ctl.kappa)) ctl.kappa = prep.kappa;
  const auto res = parabolic::evolve(spec, grid, prep.phi, ctl);
  auto meta = run_meta(spec, grid, res, ctl);
  meta["data"] = prep.label;
  write_evolution(ctx.out, grid, res, ctl, meta);
  Log log{ctx.log};
  log << "fate " << parabolic::to_string(res.fate.kind) << " at t = " << num(res.fate.time) << " after " << res.steps
      << " steps; norm " << num(res.series.front().norm_w) << " -> " << num(res.series.back().norm_w) << "\n";
  if (!res.diagnostics.empty()) log << "diagnostics: " << res.diagnostics << "\n";
  return res.fate.kind == FateKind::Undecided ? kInconclusive : kOk;
}

// ---------------------------------------------------------------- dichotomy

int cmd_dichotomy(const Context& ctx) {
  check_keys(ctx.cfg, "dichotomy", {"construction", "alpha1", "alpha2", "tau", "r_max", "check_doubling"});
  const auto spec = prepare(ctx);
  const auto ctl = parse_evolve(ctx.cfg);
  const auto grid = parse_grid(ctx.cfg, spec.n, {});
  const Json& sec = section(ctx.cfg, "dichotomy");
  const std::string construction = get_string(sec, "construction", "gs", "dichotomy");
  if (construction != "gs" && construction != "fast") throw ConfigError("dichotomy.construction must be gs or fast");
  const bool doubling = get_bool(sec, "check_doubling", true, "dichotomy");
  const auto built = build_barriers(spec, sec, "dichotomy", parse_solver(ctx.cfg, kBarrierSolver));

  struct Run {
    std::string name;
    const BarrierProfile* bp;
    parabolic::RadialGrid grid;
    EvolutionResult res;
    parabolic::EvolveControls ctl;
  };
  std::vector<Run> runs;
  const auto grid2 = parabolic::RadialGrid::graded(spec.n, grid.r_min(), 2.0 * grid.r_max(), grid.h0, grid.growth);
  for (const auto& [name, bp] : built.profiles) {
    runs.push_back({name, &bp, grid, {}, ctl});
    if (doubling) runs.push_back({name + "_2x", &bp, grid2, {}, ctl});
  }
  parallel_for(runs.size(), ctx.jobs, [&](std::size_t i) {
    auto& r = runs[i];
    const auto prep = discretized(spec, *r.bp, r.grid);
    if (std::isnan(r.ctl.kappa)) r.ctl.kappa = prep.kappa;
    r.res = parabolic::evolve(spec, r.grid, prep.phi, r.ctl);
  });

  Log log{ctx.log};
  Json report = {{"potential", potential_to_json(spec)}, {"construction", construction}, {"anchors", built.anchors}};
  bool undecided = false, ok = true;
  std::map<std::string, FateKind> fates;
  for (auto& r : runs) {
    const bool upper = r.name.rfind("upper", 0) == 0;
    const auto& res = r.res;
    const auto expected = upper ? FateKind::Decayed : FateKind::BlowUp;
    const bool monotone = upper ? res.nonincreasing : res.nondecreasing;
    const bool pass = res.fate.kind == expected && monotone;
    undecided = undecided || res.fate.kind == FateKind::Undecided;
    ok = ok && pass;
    fates[r.name] = res.fate.kind;
    auto meta = run_meta(spec, r.grid, res, r.ctl);
    meta["data"] = r.name;
    write_evolution(ctx.out / r.name, r.grid, res, r.ctl, meta);
    report["runs"][r.name] = {{"fate", parabolic::to_string(res.fate.kind)},
                              {"expected", parabolic::to_string(expected)},
                              {"time", jnum(res.fate.time)},
                              {"monotone", monotone},
                              {"r_max", jnum(r.grid.r_max())},
                              {"passed", pass}};
    log << r.name << " (r_max " << num(r.grid.r_max()) << "): " << parabolic::to_string(res.fate.kind) << " at t = "
        << num(res.fate.time) << ", " << (upper ? "non-increasing " : "non-decreasing ") << (monotone ? "yes" : "no")
        << (pass ? "" : "  FAILED") << "\n";
  }
  if (doubling) {
    bool stable = true;
    for (const auto& [name, bp] : built.profiles) stable = stable && fates[name] == fates[name + "_2x"];
    report["stable_under_doubling"] = stable;
    ok = ok && stable;
    log << "fates stable under doubling r_max: " << (stable ? "yes" : "no") << "\n";
  }
  report["passed"] = ok;
  ensure_dir(ctx.out);
  write_json(ctx.out / "dichotomy.json", report);
  if (undecided) return kInconclusive;
  return ok ? kOk : kAssertionFailed;
}

// ---------------------------------------------------------------- fujita

int cmd_fujita(const Context& ctx) {
  check_keys(ctx.cfg, "fujita", {"amplitude", "width", "t_end", "expect"});
  const auto spec = prepare(ctx);
  auto ctl = parse_evolve(ctx.cfg);
  const auto grid = parse_grid(ctx.cfg, spec.n, {0.0, 1e4, 0.05, 1.02});
  const Json& sec = section(ctx.cfg, "fujita");
  const double amp = get_number(sec, "amplitude", 0.1, "fujita");
  const double width = get_number(sec, "width", 1.0, "fujita");
  const std::string expect = get_string(sec, "expect", "auto", "fujita");
  ctl.t_end = get_number(sec, "t_end", 1e8, "fujita");
  if (!(amp >= 0.0) || !(width > 0.0) || !(ctl.t_end > 0.0)) throw ConfigError("fujita: need amplitude >= 0, width > 0, t_end > 0");
  static const std::set<std::string> expects = {"auto", "none", "BlowUp", "Decayed", "Steady"};
  if (!expects.count(expect)) throw ConfigError("fujita.expect must be auto, none, BlowUp, Decayed or Steady");

  const auto ce = potential::critical_exponents(spec);
  const bool below = ce.l_u <= ce.fujita_plus_one;
  std::string want = expect;
  if (expect == "auto") want = amp == 0.0 ? "Steady" : below ? "BlowUp" : "none";

  // small data first decays by many decades even when it later blows up, so the decay floor
  // only judges the finished run
  const auto fate_controls = ctl.fate;
  ctl.fate.decay_floor = 0.0;
  if (std::isnan(ctl.kappa)) ctl.kappa = spec.n - 2.0;
  auto res = parabolic::evolve(spec, grid, gaussian(grid, amp, width), ctl);
  res.fate = parabolic::detect_fate(res.series, fate_controls);
  ctl.fate = fate_controls;

  auto meta = run_meta(spec, grid, res, ctl);
  meta["data"] = "gaussian";
  meta["amplitude"] = amp;
  meta["l"] = jnum(ce.l_u);
  meta["fujita_plus_one"] = jnum(ce.fujita_plus_one);
  meta["expected"] = want;
  write_evolution(ctx.out, grid, res, ctl, meta);
  Log log{ctx.log};
  log << "l = " << num(ce.l_u) << (below ? " <= " : " > ") << "P_F = " << num(ce.fujita_plus_one) << "; fate "
      << parabolic::to_string(res.fate.kind) << " at t = " << num(res.fate.time) << " (expected " << want << ")\n";
  if (res.fate.kind == FateKind::Undecided) return kInconclusive;
  if (want != "none" && want != parabolic::to_string(res.fate.kind)) return kAssertionFailed;
  return kOk;
}

using Command = int (*)(const Context&);
const std::vector<std::pair<std::string, Command>>& table() {
  static const std::vector<std::pair<std::string, Command>> t = {
      {"exponents", cmd_exponents}, {"shoot", cmd_shoot},       {"classify-sweep", cmd_classify_sweep},
      {"portrait", cmd_portrait},   {"barriers", cmd_barriers}, {"evolve", cmd_evolve},
      {"dichotomy", cmd_dichotomy}, {"fujita", cmd_fujita}};
  return t;
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& [n, c] : table()) v.push_back(n);
    return v;
  }();
  return names;
}

void parallel_for(std::size_t count, unsigned jobs, const std::function<void(std::size_t)>& body) {
  const std::size_t workers = std::min<std::size_t>(std::max(1u, jobs), count);
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < count;) {
      try {
        body(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t k = 0; k < workers; ++k) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

int run_command(const std::string& name, const Context& ctx) {
  const auto it = std::find_if(table().begin(), table().end(), [&](const auto& p) { return p.first == name; });
  std::ostream* err = ctx.log;
  auto report = [&](const char* what, const std::exception& e) {
    if (err) *err << what << ": " << e.what() << "\n";
  };
  if (it == table().end()) {
    if (err) *err << "unknown command '" << name << "'\n";
    return kConfigError;
  }
  try {
    return it->second(ctx);
  } catch (const ConfigError& e) {
    report("config error", e);
    return kConfigError;
  } catch (const barriers::RegimeError& e) {
    report("outside the construction's regime", e);
    return kInconclusive;
  } catch (const shooting::NotFound& e) {
    report("construction not found", e);
    return kInconclusive;
  } catch (const std::invalid_argument& e) {
    report("invalid parameter", e);
    return kConfigError;
  } catch (const std::exception& e) {
    report("error", e);
    return kInconclusive;
  }
}

}  // namespace radheat::cli
