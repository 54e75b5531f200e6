#include "degen/cli.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"Dual complexes, limit measures and fiber-mass convergence for degenerating families"};
  app.footer(degen::csv_columns_help());
  app.require_subcommand(1);

  degen::RunConfig cfg;
  std::string L;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--model", cfg.model_path, "model document (JSON)");
    sub->add_option("--out", cfg.out_path, "output path (blowup: output directory)");
  };
  auto chart_opts = [&](CLI::App* sub) {
    sub->add_option("--chart", cfg.chart_path, "local chart document (JSON)");
    sub->add_option("--testfn", cfg.testfn_path, "test function document (JSON)");
    sub->add_option("--L", L, "L schedule: comma list or geometric a:b:n");
    sub->add_option("--seed", cfg.seed, "Monte Carlo seed");
    sub->add_option("--samples", cfg.samples, "Monte Carlo sample count");
    sub->add_option("--workers", cfg.workers, "Monte Carlo worker threads")->capture_default_str();
    sub->add_flag("--probe", cfg.probe, "allow charts with beta > 1 (divergence probing)");
    sub->add_option("--out", cfg.out_path, "output path");
  };

  auto* check = app.add_subcommand("check", "report whether the pair is sub-log-canonical");
  common(check);
  auto* weights = app.add_subcommand("weights", "print kappa, kappa_min, the essential faces and d");
  common(weights);
  auto* limit = app.add_subcommand("limit", "write the limit measure document");
  common(limit);
  limit->add_option("--masses", cfg.masses_path, "residue mass table (JSON)");
  limit->add_option("--testfn", cfg.testfn_path, "optional test function to integrate");
  auto* converge = app.add_subcommand("converge", "write a convergence CSV for a chart");
  chart_opts(converge);
  auto* fit = app.add_subcommand("fit", "convergence CSV with fitted exponents");
  chart_opts(fit);
  auto* blowup = app.add_subcommand("blowup", "blow up a stratum, writing the new model and the retraction");
  common(blowup);
  blowup->add_option("--center", cfg.center, "stratum to blow up, e.g. E0,B1 or E0#label");
  blowup->add_option("--point-codim", cfg.point_codim, "blow up a point of this codimension on the center instead");
  auto* demo = app.add_subcommand("demo", "run a builtin example end to end");
  demo->add_option("name", cfg.example, "p1, torus, torus2 or node")->required();
  demo->add_option("--L", L, "L schedule");
  demo->add_option("--seed", cfg.seed, "Monte Carlo seed");
  demo->add_option("--samples", cfg.samples, "Monte Carlo sample count");
  demo->add_option("--workers", cfg.workers, "Monte Carlo worker threads");
  demo->add_option("--out", cfg.out_path, "output path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : degen::kValidation;
  }
  cfg.command = app.get_subcommands().front()->get_name();
  if (!L.empty()) cfg.L_schedule = L;
  return degen::run(cfg, std::cout, std::cerr);
}
