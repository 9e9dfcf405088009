// Run-configuration documents: a JSON object model with strict schema
// validation, so that a single file fully reproduces a computation.
// Every check throws ConfigError carrying the offending field path.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rasb/common.hpp"
#include "rasb/dvr.hpp"
#include "rasb/fock.hpp"
#include "rasb/propagator.hpp"

namespace rasb::config {

enum class TaskKind {
  kRelax,  // imaginary-time ground state
  kQuench, // relax, swap the interaction strength, propagate
  kDims,   // report configuration-space sizes only
  kCost,   // report sizes and the work-estimate difference
};

struct QuenchTask {
  double lambda_new = 0.0;
  double t_final = 0.0;
  double sample_interval = 0.0;
};

struct GridParams {
  double x_min = -8.0;
  double x_max = 8.0;
  int n_points = 101;
};

struct RelaxParams {
  double tol_energy = 1e-10;
  std::int64_t max_steps = 200000;
  double noise = 1e-6;
  double epsilon_rho = 1e-8;
};

struct RunConfig {
  fock::RasSpec space;
  GridParams grid;
  double omega_x = 1.0;
  dvr::Interaction interaction;
  TaskKind task = TaskKind::kRelax;
  std::optional<QuenchTask> quench;  // set iff task == kQuench
  propagator::IntegratorSpec integrator;
  RelaxParams relax;
  unsigned seed = 1;
  std::string output_prefix = "rasb";
};

struct TableCell {
  int orbitals = 1;
  int m1 = 1;
  fock::Scheme scheme = fock::Scheme::kFull;
  int n_max = 0;
  std::string scheme_label;  // the configured string, echoed in outputs
};

struct TableConfig {
  int particles = 0;
  GridParams grid;
  double omega_x = 1.0;
  dvr::Interaction interaction;
  std::vector<TableCell> cells;
  propagator::IntegratorSpec integrator;
  RelaxParams relax;
  unsigned seed = 1;
  std::string output_prefix = "rasb";
};

// Parses and validates one run document. Unknown fields, wrong types, and
// out-of-range values throw ConfigError with the field path.
RunConfig parse_run_config(const std::string& text);

// Parses and validates one table document (shared physics plus a list of
// (orbitals, m1, scheme) cells evaluated at the same N and interaction).
TableConfig parse_table_config(const std::string& text);

// Reads a whole file; throws ConfigError (field "<file>") when unreadable.
std::string read_text_file(const std::string& path);

}  // namespace rasb::config
