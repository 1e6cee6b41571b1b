#include <iostream>

#include "CLI11.hpp"
#include "ptori/run.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Parabolic invariant manifolds of invariant tori"};
  app.require_subcommand(1);

  ptori::CliRequest req;
  int order = 0;
  std::string branch;

  auto add_run = [&](const std::string& name, const std::string& help) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", req.config_path, "JSON configuration file")->check(CLI::ExistingFile);
    sub->add_option("--out", req.out_dir, "output directory");
    sub->add_option("--order", order, "target order n (overrides n_target)")->check(CLI::PositiveNumber);
    sub->add_option("--branch", branch, "stable or unstable (overrides branch)")
        ->check(CLI::IsMember({"stable", "unstable"}));
    return sub;
  };
  add_run("solve-map", "parameterize the manifolds of a reduced map");
  add_run("solve-flow", "parameterize the manifolds of a reduced vector field");
  add_run("helicoure", "parameterize the manifolds of a helicoure field");
  add_run("oscillator", "degenerate oscillator with a quasi-periodic forcing");
  add_run("hecu", "He atom scattering off a Cu surface");
  add_run("diagnose-operators", "sector, inverse operator and contraction diagnostics");

  CLI::App* cmp = app.add_subcommand("compare", "compare two runs coefficient by coefficient");
  cmp->add_option("runs", req.inputs, "two manifold.json files or run directories")->expected(2)->required();
  cmp->add_option("--out", req.out_dir, "directory for compare.json");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  req.command = app.get_subcommands().front()->get_name();
  if (order > 0) req.order = order;
  if (!branch.empty()) req.branch = branch;
  return ptori::run_cli(req, std::cout, std::cerr);
}
