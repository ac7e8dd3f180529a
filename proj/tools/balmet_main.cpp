// Experiment runner: balances direct sums of line bundles over CP1 and
// CP1xCP1, builds exact wedge-map (Gieseker) points with destabilizing
// one-parameter subgroups, and verifies pullback-form and isometry-invariance
// properties of the balanced embeddings. Reports are JSON (+ CSV histories).

#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "balmet/cli.hpp"

namespace {

using balmet::ExperimentConfig;

void add_common(CLI::App* cmd, ExperimentConfig& config, bool& quad_order_set,
                std::string& base_name, std::string& init_name) {
  cmd->add_option("--bundle", config.bundle, "Bundle spec, e.g. \"O(2)\" or \"O(1,0)+O(0,1)\"")
      ->required();
  cmd->add_option("--base", base_name, "Base manifold: cp1 or cp1xcp1 (inferred when omitted)")
      ->check(CLI::IsMember({"cp1", "cp1xcp1"}));
  cmd->add_option("--quad-order", config.quad_order, "Quadrature order per factor (radial and angular)")
      ->check(CLI::PositiveNumber)
      ->each([&quad_order_set](const std::string&) { quad_order_set = true; });
  cmd->add_option("--max-iter", config.max_iter, "Balancing iteration cap")->check(CLI::PositiveNumber);
  cmd->add_option("--tol", config.tol, "Balancing convergence tolerance (Frobenius defect)");
  cmd->add_option("--seed", config.seed, "Random seed");
  cmd->add_option("--init", init_name, "Initial transform: identity or random")
      ->check(CLI::IsMember({"identity", "random"}));
  cmd->add_option("--output,-o", config.output_path, "Report path (stdout when omitted)");
}

int resolve_and_run(ExperimentConfig& config, bool quad_order_set, const std::string& base_name,
                    const std::string& init_name) {
  if (!base_name.empty()) {
    config.base = base_name == "cp1" ? balmet::BaseKind::CP1 : balmet::BaseKind::CP1xCP1;
  }
  if (init_name == "random") config.init = balmet::InitialTransform::RandomUnitary;

  config.quad_order_source = "default";
  if (quad_order_set) {
    config.quad_order_source = "flag";
  } else if (const char* env = std::getenv("BALMET_QUAD_ORDER")) {
    try {
      config.quad_order = std::stoi(env);
      config.quad_order_source = "env";
    } catch (const std::exception&) {
      std::cerr << "config error: BALMET_QUAD_ORDER is not an integer: " << env << "\n";
      return 2;
    }
  }
  return balmet::run_experiment(config);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"balanced bundle metrics over CP1 and CP1xCP1"};
  app.require_subcommand(1);

  ExperimentConfig config;
  bool quad_order_set = false;
  std::string base_name, init_name, expect_name;

  CLI::App* balance = app.add_subcommand(
      "balance", "Run the balancing fixed-point iteration and report convergence");
  add_common(balance, config, quad_order_set, base_name, init_name);
  balance->add_option("--expect", expect_name,
                      "Assertion: converged (default) or no-balance")
      ->check(CLI::IsMember({"converged", "no-balance"}));
  balance->add_option("--history", config.history_path,
                      "Defect history CSV path (defaults next to the report)");

  CLI::App* gieseker = app.add_subcommand(
      "gieseker", "Build the exact wedge map and its destabilizing subgroup weights");
  add_common(gieseker, config, quad_order_set, base_name, init_name);
  gieseker->add_flag("--dump-point", config.dump_point, "Embed the full wedge map in the report");
  gieseker->add_option("--column-cap", config.column_cap, "Wedge column budget");

  CLI::App* embed = app.add_subcommand(
      "embed-check", "Compare the pulled-back Kaehler form of the balanced embedding "
                     "against its closed form");
  add_common(embed, config, quad_order_set, base_name, init_name);
  embed->add_option("--points", config.points, "Number of sample points");
  embed->add_option("--step", config.fd_step, "Finite-difference step");
  embed->add_option("--form-tol", config.form_tol, "Relative error bound on form coefficients");

  CLI::App* invariance = app.add_subcommand(
      "invariance", "Check the balanced metric under random isometries of the base");
  add_common(invariance, config, quad_order_set, base_name, init_name);
  invariance->add_option("--elements", config.elements, "Number of random isometries");
  invariance->add_option("--check-tol", config.invariance_tol, "Discrepancy bound");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? 0 : 2;
  }

  if (balance->parsed()) {
    config.subcommand = balmet::Subcommand::Balance;
    if (expect_name == "no-balance") config.expect = balmet::Expect::NoBalance;
  } else if (gieseker->parsed()) {
    config.subcommand = balmet::Subcommand::Gieseker;
  } else if (embed->parsed()) {
    config.subcommand = balmet::Subcommand::EmbedCheck;
  } else if (invariance->parsed()) {
    config.subcommand = balmet::Subcommand::Invariance;
  }
  return resolve_and_run(config, quad_order_set, base_name, init_name);
}
