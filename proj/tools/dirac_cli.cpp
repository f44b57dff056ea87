#include "dirac/cli.hpp"

#include <CLI11.hpp>

int main(int argc, char** argv) {
  using dirac::cli::RunConfig;
  RunConfig cfg;
  CLI::App app{"Dirac structures: property checks, composition and simulation"};
  app.require_subcommand(1);

  double tol = 0.0;
  auto add_tol = [&](CLI::App* sub, const char* what) { sub->add_option("--tol", tol, what)->check(CLI::PositiveNumber); };

  auto* check = app.add_subcommand("check", "run the seeded property batteries");
  check->add_option("--seed", cfg.seed, "random seed")->capture_default_str();
  check->add_option("--instances", cfg.instances, "instances per suite")->capture_default_str();
  check->add_option("--structure", cfg.structures, "structure JSON files to classify");
  check->add_option("--output", cfg.output, "report path (default: standard output)");
  add_tol(check, "subspace equality tolerance (default 1e-9)");

  auto* comp = app.add_subcommand("compose", "compose two Dirac structures through an interconnection");
  comp->add_option("--da", cfg.da, "structure on U1 x U2")->required();
  comp->add_option("--db", cfg.db, "structure on V1 x V2")->required();
  comp->add_option("--di", cfg.di, "interconnection on U2 x V2")->required();
  dirac::Index u1 = -1, u2 = -1, v1 = -1, v2 = -1;
  comp->add_option("--u1", u1, "dim U1");
  comp->add_option("--u2", u2, "dim U2");
  comp->add_option("--v1", v1, "dim V1");
  comp->add_option("--v2", v2, "dim V2");
  comp->add_option("--output", cfg.output, "result path (default: standard output)");

  auto* sim = app.add_subcommand("simulate", "integrate a model and write its trajectory");
  sim->add_option("--model", cfg.model, "model name")->required()->check(CLI::IsMember(dirac::cli::model_names()));
  sim->add_option("--netlist", cfg.netlist, "netlist JSON (lc)");
  sim->add_option("--closure", cfg.closure, "port closure structure JSON");
  sim->add_option("--params", cfg.params, "model parameters JSON");
  sim->add_flag("--closed", cfg.closed, "close the ports (pendulum-pair, port-controlled)");
  sim->add_flag("--project-initial", cfg.project_initial, "project an inconsistent initial state");
  sim->add_option("--dt", cfg.dt, "time step")->capture_default_str();
  sim->add_option("--t-final", cfg.t_final, "final time")->capture_default_str();
  sim->add_option("--scheme", cfg.scheme, "midpoint or rk4")->check(CLI::IsMember({"midpoint", "rk4"}))->capture_default_str();
  sim->add_option("--output", cfg.output, "trajectory path");
  sim->add_option("--format", cfg.format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  add_tol(sim, "consistency tolerance (default 1e-6)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : dirac::cli::Exit::usage;
  }

  for (auto* sub : app.get_subcommands()) cfg.command = sub->get_name();
  if (tol > 0) cfg.tol = tol;
  if (u1 >= 0) cfg.u1 = u1;
  if (u2 >= 0) cfg.u2 = u2;
  if (v1 >= 0) cfg.v1 = v1;
  if (v2 >= 0) cfg.v2 = v2;
  return dirac::cli::run(cfg);
}
