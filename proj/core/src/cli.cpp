#include "balmet/cli.hpp"

#include <cmath>
#include <fstream>
#include <iostream>

#include "balmet/bundle.hpp"
#include "balmet/embedding.hpp"
#include "balmet/errors.hpp"
#include "balmet/gieseker.hpp"
#include "balmet/metric.hpp"
#include "balmet/report.hpp"

namespace balmet {

namespace {

void write_output(const std::string& path, const std::string& body) {
  if (path.empty()) {
    std::cout << body;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << body;
}

std::string derived_history_path(const ExperimentConfig& config) {
  if (!config.history_path.empty()) return config.history_path;
  if (config.output_path.empty()) return {};
  std::string path = config.output_path;
  const std::size_t dot = path.rfind('.');
  if (dot != std::string::npos && path.find('/', dot) == std::string::npos) {
    path.resize(dot);
  }
  return path + ".csv";
}

BalanceOptions balance_options(const ExperimentConfig& config) {
  BalanceOptions opts;
  opts.tol = config.tol;
  opts.max_iter = config.max_iter;
  opts.quad_order = config.quad_order;
  opts.seed = config.seed;
  opts.init = config.init;
  return opts;
}

int run_balance(const ExperimentConfig& config, const BundleSpec& spec) {
  const BalanceResult result = find_balanced(spec, balance_options(config));
  write_output(config.output_path, balance_report_json(config, spec, result));
  const std::string history = derived_history_path(config);
  if (!history.empty()) write_output(history, balance_history_csv(result));

  const bool ok = config.expect == Expect::Converged ? result.converged
                                                     : result.diagnosis != Diagnosis::Balanced;
  if (!ok) {
    std::cerr << "balance: expected " << to_string(config.expect) << ", got "
              << to_string(result.diagnosis) << " after " << result.iterations
              << " iterations (defect " << result.defect_history.back() << ")\n";
  }
  return ok ? 0 : 1;
}

int run_gieseker(const ExperimentConfig& config, const BundleSpec& spec) {
  const GiesekerPoint point = gieseker_point(spec, config.column_cap);
  std::optional<Destabilization> witness;
  if (spec.rank() == 2) {
    witness = destabilizing_ops(point);
  } else if (spec.rank() > 2) {
    witness = find_destabilizing_pair(point);  // empty when all pairwise ratios agree
  }
  write_output(config.output_path,
               gieseker_report_json(config, spec, witness, config.dump_point ? &point : nullptr));

  const bool destabilizes = witness && witness->destabilizes;
  const bool consistent = destabilizes == !ratio_criterion(spec).holds;
  if (!consistent) {
    std::cerr << "gieseker: subgroup weight and ratio criterion disagree\n";
  }
  return consistent ? 0 : 1;
}

int run_embed_check(const ExperimentConfig& config, const BundleSpec& spec) {
  EmbedCheckData data;
  const BalanceResult balanced = find_balanced(spec, balance_options(config));
  data.balanced = balanced.converged;
  data.balance_diagnosis = balanced.diagnosis;
  if (balanced.converged) {
    const SectionBasis basis = h0_basis(spec);
    data.points = sample_points(spec.base, config.points, config.seed, 1.25);
    // The pulled-back form of a balanced basis matches the determinant twist:
    // sum of summand twists per factor, times the Fubini-Study coefficient.
    std::array<int, 2> det_twist{0, 0};
    for (const Twist& t : spec.summands) {
      det_twist[0] += t.deg[0];
      det_twist[1] += t.deg[1];
    }
    const int n = spec.base.factor_count();
    for (const ChartPoint& x : data.points) {
      const PullbackForm form =
          pullback_form(basis, balanced.final_transform, x, config.fd_step);
      Eigen::MatrixXcd expected = Eigen::MatrixXcd::Zero(n, n);
      for (int f = 0; f < n; ++f) {
        const double t = std::norm(x.coord[static_cast<std::size_t>(f)]);
        expected(f, f) = det_twist[static_cast<std::size_t>(f)] / ((1.0 + t) * (1.0 + t));
      }
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          const double scale = std::sqrt(std::real(expected(i, i)) * std::real(expected(j, j)));
          const double err = std::abs(form.coefficients(i, j) - expected(i, j)) / scale;
          data.max_rel_error = std::max(data.max_rel_error, err);
        }
      }
      data.max_richardson_delta = std::max(data.max_richardson_delta, form.richardson_delta);
      data.forms.push_back(form.coefficients);
      data.expected.push_back(std::move(expected));
    }
  }
  write_output(config.output_path, embed_report_json(config, spec, data));

  const bool ok = data.balanced && data.max_rel_error < config.form_tol;
  if (!ok) {
    std::cerr << "embed-check: " << (data.balanced ? "form mismatch" : "balancing failed")
              << " (max rel error " << data.max_rel_error << ")\n";
  }
  return ok ? 0 : 1;
}

int run_invariance(const ExperimentConfig& config, const BundleSpec& spec) {
  InvarianceData data;
  const BalanceResult balanced = find_balanced(spec, balance_options(config));
  data.balanced = balanced.converged;
  data.balance_diagnosis = balanced.diagnosis;
  data.elements = config.elements;
  if (balanced.converged) {
    const auto elements = random_isometries(spec.base, config.elements, config.seed);
    const auto samples = sample_points(spec.base, 20, config.seed + 1, 1.25);
    data.max_discrepancy =
        isometry_invariance_check(spec, balanced.final_transform, elements, samples);
  }
  write_output(config.output_path, invariance_report_json(config, spec, data));

  const bool ok = data.balanced && data.max_discrepancy < config.invariance_tol;
  if (!ok) {
    std::cerr << "invariance: " << (data.balanced ? "discrepancy too large" : "balancing failed")
              << " (max " << data.max_discrepancy << ")\n";
  }
  return ok ? 0 : 1;
}

}  // namespace

int run_experiment(const ExperimentConfig& config) {
  BundleSpec spec;
  try {
    if (!(config.tol > 0.0)) throw std::invalid_argument("tol must be positive");
    if (config.quad_order < 4) throw std::invalid_argument("quad order must be >= 4");
    spec = config.base ? parse_bundle(config.bundle, *config.base) : parse_bundle(config.bundle);
  } catch (const parse_error& e) {
    std::cerr << "config error: " << e.what() << "\n"
              << "grammar: sum := term ('+' term)*; term := 'O(' int (',' int)? ')'\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }

  try {
    switch (config.subcommand) {
      case Subcommand::Balance: return run_balance(config, spec);
      case Subcommand::Gieseker: return run_gieseker(config, spec);
      case Subcommand::EmbedCheck: return run_embed_check(config, spec);
      case Subcommand::Invariance: return run_invariance(config, spec);
    }
  } catch (const resource_error& e) {
    std::cerr << "resource error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "experiment failed: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace balmet
