// Command-line front end: radheat-cli <command> [--config PATH] [--out DIR] [--jobs N] [--set key=value]...
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "radheat/cli/commands.hpp"

int main(int argc, char** argv) {
  namespace rc = radheat::cli;
  CLI::App app{"Radial semilinear heat equation laboratory"};
  app.require_subcommand(1);
  std::string config;
  std::string out = "out";
  unsigned jobs = 1;
  std::vector<std::string> sets;
  bool quiet = false;
  for (const auto& name : rc::command_names()) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config, "JSON experiment config")->check(CLI::ExistingFile);
    sub->add_option("--out", out, "output directory");
    sub->add_option("--jobs", jobs, "worker threads for independent runs")->check(CLI::Range(1u, 256u));
    sub->add_option("--set", sets, "override a config key, e.g. --set potential.q=[7]");
    sub->add_flag("--quiet", quiet, "suppress the report on stdout");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? rc::kOk : rc::kConfigError;
  }

  rc::Context ctx;
  ctx.out = out;
  ctx.jobs = jobs;
  ctx.log = quiet ? nullptr : &std::cout;
  try {
    ctx.cfg = rc::load_config(config);
    for (const auto& s : sets) rc::apply_override(ctx.cfg, s);
  } catch (const rc::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return rc::kConfigError;
  }
  const auto* sub = app.get_subcommands().front();
  return rc::run_command(sub->get_name(), ctx);
}
