#include "radheat/cli/emit.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

namespace radheat::cli {

namespace {

std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

Json jnum(double v) {
  if (std::isfinite(v)) return v;
  return fmt(v);
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::string& kind,
                     const std::vector<std::string>& header)
    : out_(path), path_(path.string()), columns_(header.size()) {
  if (!out_) throw std::runtime_error("cannot write '" + path_ + "'");
  out_ << "# radheat-csv " << kind << " v" << kCsvVersion << "\n";
  for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << csv_cell(header[i]);
  out_ << "\n";
}

void CsvWriter::row(const std::vector<double>& values) {
  std::vector<std::string> cells;
  cells.reserve(values.size());
  for (double v : values) cells.push_back(fmt(v));
  row(cells);
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  if (cells.size() != columns_) throw std::logic_error("CSV row width differs from the header in '" + path_ + "'");
  for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << csv_cell(cells[i]);
  out_ << "\n";
  if (!out_) throw std::runtime_error("write failed for '" + path_ + "'");
}

void write_json(const std::filesystem::path& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << j.dump(2) << "\n";
}

void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create directory '" + dir.string() + "': " + ec.message());
}

Json profile_meta(const shooting::StationaryProfile& p) {
  Json j;
  j["kind"] = shooting::to_string(p.kind());
  j["param"] = jnum(p.param());
  j["frame_l"] = jnum(p.frame().l);
  j["r_lo"] = jnum(p.r_lo());
  j["r_hi"] = jnum(p.r_hi());
  j["crossed"] = p.crossed();
  j["zero_radius"] = p.crossed() ? jnum(p.zero_radius()) : Json(nullptr);
  const auto c = p.classification();
  j["classification"] = {{"tag", shooting::to_string(c.tag)}, {"value", jnum(c.value)}};
  auto fit = [&](auto f) -> Json {
    try {
      return jnum(f());
    } catch (const std::exception&) {
      return nullptr;
    }
  };
  j["fits"] = {{"singular", fit([&] { return p.fit_singular(); })},
               {"slow", fit([&] { return p.fit_slow(); })},
               {"fast", fit([&] { return p.fit_fast(); })}};
  return j;
}

void write_profile(const std::filesystem::path& stem, const shooting::StationaryProfile& p, std::size_t samples) {
  CsvWriter csv(stem.string() + ".csv", "profile", {"r", "U", "Up"});
  for (const auto& s : p.samples(samples)) csv.row({s.r, s.U, s.Up});
  write_json(stem.string() + ".json", profile_meta(p));
}

Json barrier_meta(const barriers::BarrierProfile& b, const barriers::BarrierReport& rep) {
  Json j;
  j["kind"] = barriers::to_string(b.kind());
  j["requested"] = barriers::to_string(b.requested());
  j["D"] = jnum(b.D());
  j["L"] = jnum(b.L());
  j["R_glue"] = jnum(b.R_glue());
  j["J"] = jnum(b.J());
  j["tail"] = b.tail();
  Json pieces = Json::array();
  for (const auto& p : b.pieces())
    pieces.push_back({{"kind", shooting::to_string(p.profile.kind())},
                      {"param", jnum(p.profile.param())},
                      {"r_from", jnum(p.r_from)},
                      {"r_to", jnum(p.r_to)}});
  j["pieces"] = pieces;
  Json junctions = Json::array();
  for (const auto& x : b.junctions()) junctions.push_back({{"r", jnum(x.r)}, {"jump", jnum(x.jump)}, {"gap", jnum(x.gap)}});
  j["junctions"] = junctions;
  j["verification"] = {{"continuity", jnum(rep.continuity)}, {"residual", jnum(rep.residual)},
                       {"continuity_ok", rep.continuity_ok}, {"residual_ok", rep.residual_ok},
                       {"jumps_ok", rep.jumps_ok},           {"label_mismatch", rep.label_mismatch},
                       {"passed", rep.passed},               {"notes", rep.notes}};
  return j;
}

void write_barrier(const std::filesystem::path& stem, const barriers::BarrierProfile& b,
                   const barriers::BarrierReport& rep, double r1, double r2, std::size_t samples) {
  CsvWriter csv(stem.string() + ".csv", "barrier", {"r", "U", "Up"});
  for (const auto& s : b.samples(r1, r2, samples)) csv.row({s.r, s.U, s.Up});
  write_json(stem.string() + ".json", barrier_meta(b, rep));
}

Json evolution_summary(const parabolic::EvolutionResult& res, const parabolic::EvolveControls& ctl) {
  Json j;
  j["fate"] = parabolic::to_string(res.fate.kind);
  j["T_est"] = res.fate.kind == parabolic::FateKind::BlowUp ? jnum(res.fate.time) : Json(nullptr);
  j["t_final"] = jnum(res.t_final);
  j["kappa"] = jnum(res.kappa);
  j["steps"] = res.steps;
  j["rejected"] = res.rejected;
  j["nonincreasing"] = res.nonincreasing;
  j["nondecreasing"] = res.nondecreasing;
  j["radially_nonincreasing"] = res.radially_nonincreasing;
  j["max_rise"] = jnum(res.max_rise);
  j["max_drop"] = jnum(res.max_drop);
  j["initial_norm"] = jnum(res.series.front().norm_w);
  j["final_norm"] = jnum(res.series.back().norm_w);
  j["diagnostics"] = res.diagnostics;
  j["controls"] = {{"scheme", parabolic::to_string(ctl.scheme)},
                   {"t_end", jnum(ctl.t_end)},
                   {"rtol", jnum(ctl.rtol)},
                   {"cfl", jnum(ctl.cfl)},
                   {"mmatrix", jnum(ctl.mmatrix)},
                   {"inner_nu", jnum(ctl.inner_nu)},
                   {"nu", jnum(ctl.weight.nu)},
                   {"outer", jnum(ctl.weight.outer)},
                   {"norm_nus", ctl.norm_nus},
                   {"blowup_threshold", jnum(ctl.fate.blowup_threshold)},
                   {"decay_floor", jnum(ctl.fate.decay_floor)},
                   {"dt_collapse", jnum(ctl.fate.dt_collapse)},
                   {"steady_tol", jnum(ctl.fate.steady_tol)}};
  return j;
}

void write_evolution(const std::filesystem::path& dir, const parabolic::RadialGrid& grid,
                     const parabolic::EvolutionResult& res, const parabolic::EvolveControls& ctl, Json summary) {
  ensure_dir(dir);
  std::vector<std::string> head = {"t", "norm_w"};
  for (double nu : ctl.norm_nus) head.push_back("norm_nu_" + fmt(nu));
  head.push_back("dt");
  head.push_back("min_dt");
  {
    CsvWriter csv(dir / "series.csv", "series", head);
    double min_dt = std::numeric_limits<double>::infinity();
    for (const auto& p : res.series) {
      if (p.dt > 0.0) min_dt = std::min(min_dt, p.dt);
      std::vector<double> row = {p.t, p.norm_w};
      row.insert(row.end(), p.norm_nu.begin(), p.norm_nu.end());
      row.push_back(p.dt);
      row.push_back(min_dt);
      csv.row(row);
    }
  }
  {
    CsvWriter csv(dir / "final.csv", "profile_u", {"r", "u"});
    for (std::size_t j = 0; j < grid.size(); ++j) csv.row({grid.r[j], res.final_u[j]});
  }
  if (!res.snapshots.empty()) {
    CsvWriter csv(dir / "snapshots.csv", "snapshots", {"t", "r", "u"});
    for (const auto& s : res.snapshots)
      for (std::size_t j = 0; j < grid.size(); ++j) csv.row({s.t, grid.r[j], s.u[j]});
  }
  const Json extra = evolution_summary(res, ctl);
  for (const auto& [k, v] : extra.items()) summary[k] = v;
  write_json(dir / "summary.json", summary);
}

}  // namespace radheat::cli
