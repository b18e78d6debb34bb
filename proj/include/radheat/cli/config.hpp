// Experiment configuration: JSON file plus dotted-key overrides, validated into library types.
#pragma once

#include <filesystem>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "radheat/parabolic.hpp"
#include "radheat/shooting.hpp"

namespace radheat::cli {

using Json = nlohmann::json;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Empty path gives an empty object.
Json load_config(const std::filesystem::path& path);
// "a.b.c=value"; value parsed as JSON when possible, else kept as a string.
void apply_override(Json& cfg, const std::string& assignment);

// Rejects keys outside `allowed` in cfg[section] (absent sections pass).
void check_keys(const Json& cfg, const std::string& section, std::initializer_list<const char*> allowed);
void check_top_level(const Json& cfg);

const Json& section(const Json& cfg, const std::string& name);
double get_number(const Json& sec, const std::string& key, double fallback, const std::string& where);
double require_number(const Json& sec, const std::string& key, const std::string& where);
long get_integer(const Json& sec, const std::string& key, long fallback, const std::string& where);
bool get_bool(const Json& sec, const std::string& key, bool fallback, const std::string& where);
std::string get_string(const Json& sec, const std::string& key, const std::string& fallback,
                       const std::string& where);
// Number list; a single number is accepted, and {"from", "to", "count"} gives a log-spaced list.
std::vector<double> get_numbers(const Json& sec, const std::string& key, std::vector<double> fallback,
                                const std::string& where);

potential::PotentialSpec parse_potential(const Json& cfg);
Json potential_to_json(const potential::PotentialSpec& spec);
shooting::ShootOptions parse_solver(const Json& cfg, shooting::ShootOptions defaults);

struct GridDefaults {
  double r_min = 0.0, r_max = 1e3, h0 = 0.01, growth = 1.02;
};
parabolic::RadialGrid parse_grid(const Json& cfg, int n, const GridDefaults& d);
parabolic::EvolveControls parse_evolve(const Json& cfg);

}  // namespace radheat::cli
