#include <iostream>

#include "CLI11.hpp"
#include "cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Weakly admissible hierarchical meshes: check, run, render, convergence"};
  app.require_subcommand(1);

  std::string mesh_path, config_path, overlay_path, out_path;
  wahm::cli::CheckRequest check;
  int strict = 0;
  bool no_cells = false;

  auto* c = app.add_subcommand("check", "Admissibility verdicts and per-cell powers of a mesh dump");
  c->add_option("mesh", mesh_path, "mesh JSON")->required()->check(CLI::ExistingFile);
  c->add_option("--strict", strict, "require strict admissibility of class m");
  c->add_flag("--weak", check.weak, "require weak admissibility");
  c->add_flag("--clustered", check.clustered, "require a clustered hierarchy");
  c->add_flag("--no-cells", no_cells, "omit the per-cell listing");

  auto* r = app.add_subcommand("run", "Adaptive loop from a run config");
  r->add_option("config", config_path, "run config JSON")->required()->check(CLI::ExistingFile);

  auto* v = app.add_subcommand("render", "SVG of a two-dimensional mesh dump");
  v->add_option("mesh", mesh_path, "mesh JSON")->required()->check(CLI::ExistingFile);
  v->add_option("--overlay", overlay_path, "marks JSON shaded under the cells")->check(CLI::ExistingFile);
  v->add_option("-o,--output", out_path, "output SVG")->required();

  auto* e = app.add_subcommand("convergence", "EOC tables for the quasi-interpolant and the L2 projection");
  e->add_option("config", config_path, "run config JSON")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  if (c->parsed()) {
    if (c->count("--strict")) check.strict = strict;
    check.list_cells = !no_cells;
    return wahm::cli::cmd_check(mesh_path, check, std::cout, std::cerr);
  }
  if (r->parsed()) return wahm::cli::cmd_run(config_path, std::cout, std::cerr);
  if (v->parsed()) return wahm::cli::cmd_render(mesh_path, overlay_path, out_path, std::cout, std::cerr);
  return wahm::cli::cmd_convergence(config_path, std::cout, std::cerr);
}
