#include "rasb/runner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "rasb/common.hpp"
#include "rasb/dvr.hpp"
#include "rasb/eom.hpp"
#include "rasb/fock.hpp"
#include "rasb/observables.hpp"
#include "rasb/propagator.hpp"
#include "rasb/secondq.hpp"

namespace rasb::runner {
namespace {

using nlohmann::json;

class Timer {
 public:
  Timer() : start_(std::chrono::steady_clock::now()) {}

  double seconds() const {
    const auto now = std::chrono::steady_clock::now();
    return std::chrono::duration<double>(now - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

// Full double precision, 17 significant digits, for the CSV outputs.
std::string format17(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.17g", value);
  return buffer;
}

std::string scheme_string(const fock::RasSpec& spec) {
  switch (spec.scheme) {
    case fock::Scheme::kFull:
      return "full";
    case fock::Scheme::kGeneral:
      return "general:" + std::to_string(spec.n_max);
    case fock::Scheme::kEvenOnly:
      return "even:" + std::to_string(spec.n_max);
  }
  return "?";
}

std::string interaction_string(dvr::InteractionKind kind) {
  return kind == dvr::InteractionKind::kContact ? "contact" : "harmonic";
}

eom::Model build_model(const config::GridParams& grid, double omega_x,
                       const dvr::Interaction& interaction) {
  eom::Model model;
  model.grid = dvr::build_grid(grid.x_min, grid.x_max, grid.n_points);
  model.omega_x = omega_x;
  model.interaction = interaction;
  return model;
}

json space_report(const fock::RasSpec& spec) {
  const fock::FockSpace space(spec);
  json shells = json::array();
  for (const auto& block : space.blocks()) {
    shells.push_back({{"shell", block.shell},
                      {"configurations", block.d1 * block.d2},
                      {"variational", block.variational}});
  }
  return {{"dim", space.dim()},
          {"dim_extended", space.dim_extended()},
          {"dim_full", fock::dim_fci(spec.n_particles, spec.orbitals())},
          {"shells", shells}};
}

json flags_report(bool any_regularized, std::int64_t regularized_events,
                  double max_residual) {
  return {{"any_regularized", any_regularized},
          {"regularized_events", regularized_events},
          {"max_residual", max_residual}};
}

json occupation_percent(const RealVector& occupations, int n_particles) {
  json percent = json::array();
  for (Eigen::Index i = 0; i < occupations.size(); ++i) {
    percent.push_back(100.0 * occupations[i] / n_particles);
  }
  return percent;
}

json record_json(const observables::ObservableRecord& record) {
  json occ = json::array();
  for (Eigen::Index i = 0; i < record.natural_occupations.size(); ++i) {
    occ.push_back(record.natural_occupations[i]);
  }
  return {{"t", record.t},
          {"energy", record.energy},
          {"norm", record.norm},
          {"rho0", record.rho0},
          {"natural_occupations", occ}};
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot open '" + path + "' for writing");
  }
  out << content;
  if (!out.good()) {
    throw std::runtime_error("error while writing '" + path + "'");
  }
}

void write_summary(const std::string& prefix, const json& summary) {
  write_file(prefix + "_summary.json", summary.dump(2) + "\n");
}

void write_series(const std::string& prefix,
                  const std::vector<observables::ObservableRecord>& series,
                  int orbitals) {
  std::ostringstream csv;
  csv << "t,energy,norm,rho0";
  for (int i = 1; i <= orbitals; ++i) csv << ",n" << i;
  csv << "\n";
  for (const auto& record : series) {
    csv << format17(record.t) << "," << format17(record.energy) << ","
        << format17(record.norm) << "," << format17(record.rho0);
    for (Eigen::Index i = 0; i < record.natural_occupations.size(); ++i) {
      csv << "," << format17(record.natural_occupations[i]);
    }
    csv << "\n";
  }
  write_file(prefix + "_series.csv", csv.str());
}

void write_density(const std::string& prefix, const dvr::Grid& grid,
                   const RealVector& density) {
  std::ostringstream csv;
  csv << "x,rho\n";
  for (int alpha = 0; alpha < grid.n_points; ++alpha) {
    csv << format17(grid.points[alpha]) << "," << format17(density[alpha])
        << "\n";
  }
  write_file(prefix + "_density.csv", csv.str());
}

json base_summary(const config::RunConfig& cfg, const std::string& task) {
  return {{"task", task},
          {"particles", cfg.space.n_particles},
          {"orbitals", cfg.space.orbitals()},
          {"m1", cfg.space.m1},
          {"m2", cfg.space.m2},
          {"scheme", scheme_string(cfg.space)},
          {"grid",
           {{"x_min", cfg.grid.x_min},
            {"x_max", cfg.grid.x_max},
            {"n_points", cfg.grid.n_points}}},
          {"omega_x", cfg.omega_x},
          {"interaction",
           {{"kind", interaction_string(cfg.interaction.kind)},
            {"lambda", cfg.interaction.lambda}}},
          {"seed", cfg.seed},
          {"space", space_report(cfg.space)}};
}

int report_sizes(const config::RunConfig& cfg, bool with_cost,
                 std::ostream& out) {
  Timer timer;
  json summary = base_summary(cfg, with_cost ? "cost" : "dims");
  if (with_cost) {
    // Positive when the restricted orbital equations are cheaper per step
    // than the full-space ones.
    summary["cost_delta"] = fock::cost_delta(cfg.space, cfg.grid.n_points);
  }
  summary["wall_time_seconds"] = timer.seconds();
  write_summary(cfg.output_prefix, summary);
  out << "space: dim " << summary["space"]["dim"] << " (extended "
      << summary["space"]["dim_extended"] << ") -> " << cfg.output_prefix
      << "_summary.json\n";
  return kExitOk;
}

propagator::RelaxOptions to_relax_options(const config::RelaxParams& relax,
                                          unsigned seed) {
  propagator::RelaxOptions options;
  options.tol_energy = relax.tol_energy;
  options.max_steps = relax.max_steps;
  options.noise = relax.noise;
  options.seed = seed;
  options.epsilon_rho = relax.epsilon_rho;
  return options;
}

json relaxation_json(const propagator::RelaxResult& relaxation) {
  return {{"converged", relaxation.converged},
          {"steps", relaxation.steps},
          {"energy_rejections", relaxation.energy_rejections},
          {"energy", relaxation.trace.empty()
                         ? json(nullptr)
                         : json(relaxation.trace.back().energy)},
          {"warning", relaxation.warning}};
}

}  // namespace

int execute_run(const config::RunConfig& cfg, std::ostream& out,
                std::ostream& err) {
  if (cfg.task == config::TaskKind::kDims) return report_sizes(cfg, false, out);
  if (cfg.task == config::TaskKind::kCost) return report_sizes(cfg, true, out);

  Timer timer;
  const eom::Model model =
      build_model(cfg.grid, cfg.omega_x, cfg.interaction);

  propagator::Protocol protocol;
  protocol.relax_options = to_relax_options(cfg.relax, cfg.seed);
  if (cfg.task == config::TaskKind::kRelax) {
    protocol.kind = propagator::ProtocolKind::kRelax;
  } else {
    protocol.kind = propagator::ProtocolKind::kQuenchThenPropagate;
    protocol.t_final = cfg.quench->t_final;
    protocol.sample_interval = cfg.quench->sample_interval;
    protocol.quench =
        dvr::Interaction{cfg.interaction.kind, cfg.quench->lambda_new};
  }

  propagator::ProtocolResult result;
  try {
    result = propagator::run_protocol(protocol, model, cfg.space,
                                      cfg.integrator);
  } catch (const PropagationError& e) {
    err << "propagation failed: " << e.what()
        << " (last good time t = " << format17(e.last_good_time()) << ")\n";
    return kExitPropagation;
  }

  const fock::FockSpace space(cfg.space);
  const secondq::ExcitationTable table(space);
  const RealVector density =
      observables::density_profile(result.final_state, model.grid, table);

  json summary = base_summary(
      cfg, cfg.task == config::TaskKind::kRelax ? "relax" : "quench");
  summary["relaxation"] = relaxation_json(result.relaxation);
  summary["flags"] =
      flags_report(result.any_regularized, result.regularized_events,
                   result.max_residual);

  const observables::ObservableRecord& last = result.series.back();
  summary["final"] = record_json(last);
  summary["final"]["natural_occupation_percent"] =
      occupation_percent(last.natural_occupations, cfg.space.n_particles);
  summary["final_energy"] = last.energy;

  if (cfg.task == config::TaskKind::kQuench) {
    std::vector<double> times;
    std::vector<double> rho0;
    double drift = 0.0;
    times.reserve(result.series.size());
    rho0.reserve(result.series.size());
    for (const auto& record : result.series) {
      times.push_back(record.t);
      rho0.push_back(record.rho0);
      drift = std::max(drift,
                       std::abs(record.energy - result.series.front().energy));
    }
    const auto extracted = observables::breathing_frequency(times, rho0);
    json breathing = {{"extracted", extracted ? json(*extracted) : json()}};
    if (cfg.interaction.kind == dvr::InteractionKind::kHarmonicPair) {
      breathing["analytic_omega1"] = observables::breathing_omega_analytic(
          1, cfg.omega_x, cfg.space.n_particles, cfg.quench->lambda_new);
    }
    summary["quench"] = {{"lambda_new", cfg.quench->lambda_new},
                         {"t_final", cfg.quench->t_final},
                         {"sample_interval", cfg.quench->sample_interval},
                         {"samples", result.series.size()},
                         {"energy_drift", drift},
                         {"breathing", breathing}};
  }

  summary["wall_time_seconds"] = timer.seconds();
  write_summary(cfg.output_prefix, summary);
  write_series(cfg.output_prefix, result.series, cfg.space.orbitals());
  write_density(cfg.output_prefix, model.grid, density);

  out << (cfg.task == config::TaskKind::kRelax ? "relax" : "quench")
      << ": energy " << format17(last.energy) << ", files "
      << cfg.output_prefix << "_{summary.json,series.csv,density.csv}\n";
  return kExitOk;
}

namespace {

struct CellOutcome {
  bool ok = false;
  double energy = 0.0;
  std::int64_t dim = 0;
  bool converged = false;
  std::int64_t steps = 0;
  bool any_regularized = false;
  std::int64_t regularized_events = 0;
  double max_residual = 0.0;
  double wall_time = 0.0;
  std::string error;
};

// RFC-style quoting for the free-text error column.
std::string csv_quote(const std::string& text) {
  std::string quoted = "\"";
  for (char c : text) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  quoted += '"';
  return quoted;
}

unsigned worker_count(std::size_t n_cells) {
  unsigned workers = std::max(1u, std::thread::hardware_concurrency());
  if (const char* cap = std::getenv("RASB_MAX_THREADS")) {
    char* end = nullptr;
    const long parsed = std::strtol(cap, &end, 10);
    if (end != cap && *end == '\0' && parsed >= 1) {
      workers = static_cast<unsigned>(parsed);
    }
  }
  return static_cast<unsigned>(
      std::min<std::size_t>(workers, std::max<std::size_t>(n_cells, 1)));
}

}  // namespace

int execute_tables(const config::TableConfig& cfg, std::ostream& out,
                   std::ostream&) {
  Timer total;
  const eom::Model model =
      build_model(cfg.grid, cfg.omega_x, cfg.interaction);

  std::vector<fock::RasSpec> specs;
  specs.reserve(cfg.cells.size());
  for (const auto& cell : cfg.cells) {
    fock::RasSpec spec;
    spec.n_particles = cfg.particles;
    spec.m1 = cell.m1;
    spec.m2 = cell.orbitals - cell.m1;
    spec.scheme = cell.scheme;
    spec.n_max = cell.n_max;
    specs.push_back(spec);
  }

  std::vector<CellOutcome> outcomes(cfg.cells.size());
  std::atomic<std::size_t> next{0};
  const auto run_cells = [&]() {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= specs.size()) break;
      CellOutcome& outcome = outcomes[i];
      Timer timer;
      try {
        outcome.dim = fock::dim_ras(specs[i]);
        const propagator::RelaxResult relaxation =
            propagator::relax(model, specs[i], cfg.integrator,
                              to_relax_options(cfg.relax, cfg.seed));
        const fock::FockSpace space(specs[i]);
        const secondq::ExcitationTable table(space);
        outcome.energy = observables::energy(relaxation.state, model, table);
        outcome.converged = relaxation.converged;
        outcome.steps = relaxation.steps;
        outcome.any_regularized = relaxation.any_regularized;
        outcome.regularized_events = relaxation.regularized_events;
        outcome.max_residual = relaxation.max_residual;
        outcome.ok = true;
        if (!relaxation.warning.empty()) outcome.error = relaxation.warning;
      } catch (const std::exception& e) {
        outcome.ok = false;
        outcome.error = e.what();
      }
      outcome.wall_time = timer.seconds();
    }
  };

  const unsigned workers = worker_count(specs.size());
  if (workers <= 1) {
    run_cells();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run_cells);
    for (auto& thread : pool) thread.join();
  }

  std::ostringstream csv;
  csv << "orbitals,m1,scheme,configurations,energy,converged,error\n";
  json cells_json = json::array();
  std::size_t n_ok = 0;
  for (std::size_t i = 0; i < cfg.cells.size(); ++i) {
    const auto& cell = cfg.cells[i];
    const auto& outcome = outcomes[i];
    if (outcome.ok) ++n_ok;
    csv << cell.orbitals << "," << cell.m1 << "," << cell.scheme_label << ","
        << outcome.dim << ","
        << (outcome.ok ? format17(outcome.energy) : std::string()) << ","
        << (outcome.converged ? "true" : "false") << ","
        << csv_quote(outcome.error) << "\n";
    cells_json.push_back(
        {{"orbitals", cell.orbitals},
         {"m1", cell.m1},
         {"scheme", cell.scheme_label},
         {"dim", outcome.dim},
         {"ok", outcome.ok},
         {"energy", outcome.ok ? json(outcome.energy) : json()},
         {"converged", outcome.converged},
         {"steps", outcome.steps},
         {"flags",
          flags_report(outcome.any_regularized, outcome.regularized_events,
                       outcome.max_residual)},
         {"wall_time_seconds", outcome.wall_time},
         {"error", outcome.error}});
  }
  write_file(cfg.output_prefix + "_table.csv", csv.str());

  const json summary = {
      {"task", "tables"},
      {"particles", cfg.particles},
      {"grid",
       {{"x_min", cfg.grid.x_min},
        {"x_max", cfg.grid.x_max},
        {"n_points", cfg.grid.n_points}}},
      {"omega_x", cfg.omega_x},
      {"interaction",
       {{"kind", interaction_string(cfg.interaction.kind)},
        {"lambda", cfg.interaction.lambda}}},
      {"seed", cfg.seed},
      {"cells", cells_json},
      {"cells_completed", n_ok},
      {"wall_time_seconds", total.seconds()}};
  write_summary(cfg.output_prefix, summary);

  out << "tables: " << n_ok << "/" << cfg.cells.size()
      << " cells completed, files " << cfg.output_prefix
      << "_{table.csv,summary.json}\n";
  return kExitOk;
}

}  // namespace rasb::runner
