// Subcommands of the command-line front end.
#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "radheat/cli/config.hpp"

namespace radheat::cli {

enum ExitCode : int { kOk = 0, kConfigError = 1, kInconclusive = 2, kAssertionFailed = 3 };

struct Context {
  Json cfg = Json::object();
  std::filesystem::path out = "out";
  unsigned jobs = 1;
  std::ostream* log = nullptr;  // human-readable report; nullptr silences it
};

const std::vector<std::string>& command_names();

// Runs one subcommand and maps errors to exit codes.
int run_command(const std::string& name, const Context& ctx);

// Calls body(i) for i < count on at most `jobs` threads; rethrows the first failure by index.
void parallel_for(std::size_t count, unsigned jobs, const std::function<void(std::size_t)>& body);

}  // namespace radheat::cli
