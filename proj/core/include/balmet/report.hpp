#pragma once

#include <optional>
#include <string>
#include <vector>

#include "balmet/bundle.hpp"
#include "balmet/config.hpp"
#include "balmet/embedding.hpp"
#include "balmet/gieseker.hpp"
#include "balmet/metric.hpp"

namespace balmet {

inline constexpr int kReportSchemaVersion = 1;

/// JSON reports are deterministic: keys sorted, numbers shortest round-trip,
/// no timestamps. The same config and seed always produce identical bytes.
std::string balance_report_json(const ExperimentConfig& config, const BundleSpec& spec,
                                const BalanceResult& result);

/// iteration, defect, min_gram_eigenvalue rows.
std::string balance_history_csv(const BalanceResult& result);

std::string gieseker_report_json(const ExperimentConfig& config, const BundleSpec& spec,
                                 const std::optional<Destabilization>& witness,
                                 const GiesekerPoint* dump);

struct EmbedCheckData {
  std::vector<ChartPoint> points;
  std::vector<Eigen::MatrixXcd> forms;
  std::vector<Eigen::MatrixXcd> expected;
  double max_rel_error = 0.0;
  double max_richardson_delta = 0.0;
  bool balanced = false;
  Diagnosis balance_diagnosis = Diagnosis::MaxIterations;
};

std::string embed_report_json(const ExperimentConfig& config, const BundleSpec& spec,
                              const EmbedCheckData& data);

struct InvarianceData {
  int elements = 0;
  double max_discrepancy = 0.0;
  bool balanced = false;
  Diagnosis balance_diagnosis = Diagnosis::MaxIterations;
};

std::string invariance_report_json(const ExperimentConfig& config, const BundleSpec& spec,
                                   const InvarianceData& data);

}  // namespace balmet
