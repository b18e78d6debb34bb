// Deterministic CSV and JSON output for profiles, barriers and evolution runs.
#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "radheat/barriers.hpp"
#include "radheat/cli/config.hpp"
#include "radheat/parabolic.hpp"
#include "radheat/shooting.hpp"

namespace radheat::cli {

// Bumped whenever a CSV column set changes; written as the first line "# radheat-csv <kind> v<N>".
inline constexpr int kCsvVersion = 1;

// Shortest round-trip text for a double; inf and nan spelled out.
std::string fmt(double v);
// Number, or the strings "inf", "-inf", "nan" (JSON has no literal for them).
Json jnum(double v);

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::string& kind, const std::vector<std::string>& header);
  void row(const std::vector<double>& values);
  void row(const std::vector<std::string>& cells);

 private:
  std::ofstream out_;
  std::string path_;
  std::size_t columns_;
};

void write_json(const std::filesystem::path& path, const Json& j);
void ensure_dir(const std::filesystem::path& dir);

Json profile_meta(const shooting::StationaryProfile& p);
// CSV (r, U, U') on log-spaced radii within the profile's range.
void write_profile(const std::filesystem::path& stem, const shooting::StationaryProfile& p, std::size_t samples);

Json barrier_meta(const barriers::BarrierProfile& b, const barriers::BarrierReport& rep);
void write_barrier(const std::filesystem::path& stem, const barriers::BarrierProfile& b,
                   const barriers::BarrierReport& rep, double r1, double r2, std::size_t samples);

Json evolution_summary(const parabolic::EvolutionResult& res, const parabolic::EvolveControls& ctl);
// series.csv, final.csv, snapshots.csv (when any) and summary.json inside dir.
void write_evolution(const std::filesystem::path& dir, const parabolic::RadialGrid& grid,
                     const parabolic::EvolutionResult& res, const parabolic::EvolveControls& ctl, Json summary);

}  // namespace radheat::cli
