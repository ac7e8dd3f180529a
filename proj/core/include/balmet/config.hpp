#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "balmet/geometry.hpp"
#include "balmet/metric.hpp"

namespace balmet {

enum class Subcommand { Balance, Gieseker, EmbedCheck, Invariance };
enum class Expect { Converged, NoBalance };

std::string to_string(Subcommand s);
std::string to_string(Expect e);
std::string to_string(BaseKind k);
std::string to_string(InitialTransform i);

/// A fully-resolved experiment: every knob the runner consumes, echoed
/// verbatim into the report header so runs are reproducible from the report
/// alone.
struct ExperimentConfig {
  Subcommand subcommand = Subcommand::Balance;
  std::string bundle;
  std::optional<BaseKind> base;  // cross-checked against the bundle arity when set

  int quad_order = 64;
  std::string quad_order_source = "default";  // default | flag | env
  int max_iter = 500;
  double tol = 1e-10;
  std::uint64_t seed = 0;
  InitialTransform init = InitialTransform::Identity;
  Expect expect = Expect::Converged;

  std::string output_path;   // empty = stdout
  std::string history_path;  // balance CSV; empty = derived from output_path

  // embed-check
  int points = 10;
  double fd_step = 1e-4;
  double form_tol = 1e-6;

  // invariance
  int elements = 10;
  double invariance_tol = 1e-8;

  // gieseker
  bool dump_point = false;
  std::int64_t column_cap = 1'000'000;
};

}  // namespace balmet
