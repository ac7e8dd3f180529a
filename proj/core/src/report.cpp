#include "balmet/report.hpp"

#include <cstdio>

#include <json.hpp>

namespace balmet {

namespace {

using nlohmann::json;

json to_json(const Eigen::MatrixXcd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      row.push_back({m(i, j).real(), m(i, j).imag()});
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

json to_json(const ChartPoint& x) {
  json coords = json::array();
  for (int f = 0; f < x.factors; ++f) {
    coords.push_back({x.coord[static_cast<std::size_t>(f)].real(),
                      x.coord[static_cast<std::size_t>(f)].imag()});
  }
  return coords;
}

json spec_json(const BundleSpec& spec) {
  json twists = json::array();
  for (const Twist& t : spec.summands) {
    if (spec.base.factor_count() == 2) {
      twists.push_back({t.deg[0], t.deg[1]});
    } else {
      twists.push_back(t.deg[0]);
    }
  }
  return json{{"base", to_string(spec.base.kind)},
              {"rank", spec.rank()},
              {"sections", spec.total_sections()},
              {"twists", std::move(twists)}};
}

json config_json(const ExperimentConfig& c) {
  json out{{"subcommand", to_string(c.subcommand)},
           {"bundle", c.bundle},
           {"quad_order", c.quad_order},
           {"quad_order_source", c.quad_order_source},
           {"max_iter", c.max_iter},
           {"tol", c.tol},
           {"seed", c.seed},
           {"init", to_string(c.init)},
           {"expect", to_string(c.expect)},
           {"output", c.output_path}};
  out["base"] = c.base ? json(to_string(*c.base)) : json(nullptr);
  switch (c.subcommand) {
    case Subcommand::Balance:
      out["history"] = c.history_path;
      break;
    case Subcommand::Gieseker:
      out["dump_point"] = c.dump_point;
      out["column_cap"] = c.column_cap;
      break;
    case Subcommand::EmbedCheck:
      out["points"] = c.points;
      out["fd_step"] = c.fd_step;
      out["form_tol"] = c.form_tol;
      break;
    case Subcommand::Invariance:
      out["elements"] = c.elements;
      out["invariance_tol"] = c.invariance_tol;
      break;
  }
  return out;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace

std::string to_string(Subcommand s) {
  switch (s) {
    case Subcommand::Balance: return "balance";
    case Subcommand::Gieseker: return "gieseker";
    case Subcommand::EmbedCheck: return "embed-check";
    case Subcommand::Invariance: return "invariance";
  }
  return "unknown";
}

std::string to_string(Expect e) {
  return e == Expect::Converged ? "converged" : "no-balance";
}

std::string to_string(BaseKind k) { return k == BaseKind::CP1 ? "cp1" : "cp1xcp1"; }

std::string to_string(InitialTransform i) {
  return i == InitialTransform::Identity ? "identity" : "random";
}

std::string balance_report_json(const ExperimentConfig& config, const BundleSpec& spec,
                                const BalanceResult& result) {
  json j{{"schema_version", kReportSchemaVersion},
         {"config", config_json(config)},
         {"spec", spec_json(spec)}};
  j["result"] = json{{"converged", result.converged},
                     {"diagnosis", to_string(result.diagnosis)},
                     {"iterations", result.iterations},
                     {"defect_history", result.defect_history},
                     {"min_eigenvalue_history", result.min_eigenvalue_history},
                     {"trace_history", result.trace_history},
                     {"gram_final", to_json(result.gram_final)},
                     {"transform", to_json(result.final_transform.matrix())}};
  return dump(j);
}

std::string balance_history_csv(const BalanceResult& result) {
  std::string out = "iteration,defect,min_gram_eigenvalue\n";
  char line[96];
  for (std::size_t i = 0; i < result.defect_history.size(); ++i) {
    std::snprintf(line, sizeof(line), "%zu,%.17g,%.17g\n", i, result.defect_history[i],
                  result.min_eigenvalue_history[i]);
    out += line;
  }
  return out;
}

std::string gieseker_report_json(const ExperimentConfig& config, const BundleSpec& spec,
                                 const std::optional<Destabilization>& witness,
                                 const GiesekerPoint* dump_point) {
  const RatioCriterion rc = ratio_criterion(spec);
  json ratios = json::array();
  for (const auto& [num, den] : rc.ratios) {
    ratios.push_back({num, den});
  }
  json j{{"schema_version", kReportSchemaVersion},
         {"config", config_json(config)},
         {"spec", spec_json(spec)},
         {"ratio_holds", rc.holds},
         {"ratios", std::move(ratios)}};
  if (witness) {
    j["lambda"] = witness->subgroup.exponents;
    j["weight"] = witness->weight;
    j["destabilizes"] = witness->destabilizes;
    j["blocks"] = witness->blocks;
  } else {
    j["lambda"] = json(nullptr);
    j["weight"] = 0;
    j["destabilizes"] = false;
  }
  if (dump_point) {
    json cols = json::array();
    for (std::size_t c = 0; c < dump_point->columns.size(); ++c) {
      json entries = json::array();
      for (const auto& [row, coeff] : dump_point->column_entries[c]) {
        entries.push_back({row, coeff.str()});
      }
      cols.push_back(json{{"subset", dump_point->columns[c]}, {"entries", std::move(entries)}});
    }
    j["point"] = json{{"rows", dump_point->row_count}, {"columns", std::move(cols)}};
  }
  return dump(j);
}

std::string embed_report_json(const ExperimentConfig& config, const BundleSpec& spec,
                              const EmbedCheckData& data) {
  json points = json::array();
  json forms = json::array();
  json expected = json::array();
  for (std::size_t i = 0; i < data.points.size(); ++i) {
    points.push_back(to_json(data.points[i]));
    forms.push_back(to_json(data.forms[i]));
    expected.push_back(to_json(data.expected[i]));
  }
  json j{{"schema_version", kReportSchemaVersion},
         {"config", config_json(config)},
         {"spec", spec_json(spec)},
         {"balanced", data.balanced},
         {"balance_diagnosis", to_string(data.balance_diagnosis)},
         {"points", std::move(points)},
         {"form_coefficients", std::move(forms)},
         {"expected", std::move(expected)},
         {"max_rel_error", data.max_rel_error},
         {"max_richardson_delta", data.max_richardson_delta}};
  return dump(j);
}

std::string invariance_report_json(const ExperimentConfig& config, const BundleSpec& spec,
                                   const InvarianceData& data) {
  json j{{"schema_version", kReportSchemaVersion},
         {"config", config_json(config)},
         {"spec", spec_json(spec)},
         {"balanced", data.balanced},
         {"balance_diagnosis", to_string(data.balance_diagnosis)},
         {"elements", data.elements},
         {"max_discrepancy", data.max_discrepancy}};
  return dump(j);
}

}  // namespace balmet
