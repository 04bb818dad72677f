#include <CLI11.hpp>

#include <iostream>

#include "transverse/log.hpp"
#include "transverse/scenario.hpp"

using namespace transverse;

namespace {

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> density;
  std::optional<int> max_retries;
  std::optional<double> tol_rank;
};

void add_overrides(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--density", o.density, "intersection seeds per curve unit (per axis for surfaces)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--max-retries", o.max_retries, "regular-value candidates per simplex")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--tol-rank", o.tol_rank, "minimum normalized singular value")
      ->check(CLI::PositiveNumber);
}

void apply(Scenario& sc, const Overrides& o) {
  auto& p = sc.pipeline;
  if (o.seed) p.seed = *o.seed;
  if (o.density) (sc.h().domain_dim() >= 2 ? p.surface_density : p.verify_density) = *o.density;
  if (o.max_retries) p.max_retries = *o.max_retries;
  if (o.tol_rank) p.tol_rank = *o.tol_rank;
  p.validate();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Perturb a triangulation until it is transverse to a smooth map"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::string out_dir;
  Overrides over;

  auto* run = app.add_subcommand("run", "run the perturbation pipeline, then verify");
  run->add_option("scenario", scenario_path, "scenario file")->required();
  run->add_option("--seed", over.seed, "rng seed (overrides the scenario)");
  run->add_option("--out", out_dir, "output directory")->required();
  add_overrides(run, over);

  auto* verify = app.add_subcommand("verify-only", "verify the unperturbed mesh");
  verify->add_option("scenario", scenario_path, "scenario file")->required();
  verify->add_option("--out", out_dir, "output directory")->required();
  add_overrides(verify, over);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  Scenario sc;
  try {
    sc = load_scenario(scenario_path);
    apply(sc, over);
  } catch (const std::exception& e) {
    std::cerr << scenario_path << ": " << e.what() << '\n';
    return 2;
  }

  try {
    const bool verify_only = verify->parsed();
    const RunOutcome out = run_scenario(sc, out_dir, verify_only);
    const auto& r = out.report;
    std::cout << sc.name << ": " << (out.exit_code == 0 ? "PASS" : "FAIL") << " (links "
              << out.links << ", transverse " << r.transverse_count << ", tangent "
              << r.tangent_count << ", skeleton hits " << r.skeleton_hits << ")\n";
    for (const auto& f : out.failures) std::cout << "  level failure: " << f << '\n';
    for (const auto& f : out.files) std::cout << "  wrote " << f << '\n';
    return out.exit_code;
  } catch (const FormatError& e) {
    std::cerr << scenario_path << ": " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    log_error(e.what());
    return 1;
  }
}
