#include "rasb/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <utility>

#include <nlohmann/json.hpp>

namespace rasb::config {
namespace {

using nlohmann::json;

// Wraps one JSON object: typed accessors with defaults, path-qualified
// errors, and a finish() pass that rejects any key never asked for.
class Section {
 public:
  Section(const json& node, std::string path)
      : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) {
      throw ConfigError(label(), "expected a JSON object");
    }
  }

  std::string label() const { return path_.empty() ? "<document>" : path_; }

  std::string key_path(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  bool has(const std::string& key) const { return node_.contains(key); }

  const json* take(const std::string& key) {
    seen_.insert(key);
    auto it = node_.find(key);
    return it == node_.end() ? nullptr : &*it;
  }

  double number(const std::string& key, double fallback) {
    const json* v = take(key);
    if (v == nullptr) return fallback;
    if (!v->is_number()) {
      throw ConfigError(key_path(key), "expected a number");
    }
    return v->get<double>();
  }

  std::int64_t integer(const std::string& key, std::int64_t fallback) {
    const json* v = take(key);
    if (v == nullptr) return fallback;
    if (!v->is_number_integer()) {
      throw ConfigError(key_path(key), "expected an integer");
    }
    return v->get<std::int64_t>();
  }

  std::int64_t require_integer(const std::string& key) {
    if (!has(key)) {
      throw ConfigError(key_path(key), "required field is missing");
    }
    return integer(key, 0);
  }

  std::string text(const std::string& key, const std::string& fallback) {
    const json* v = take(key);
    if (v == nullptr) return fallback;
    if (!v->is_string()) {
      throw ConfigError(key_path(key), "expected a string");
    }
    return v->get<std::string>();
  }

  // Child object accessor; returns nullopt when the key is absent.
  std::optional<Section> object(const std::string& key) {
    const json* v = take(key);
    if (v == nullptr) return std::nullopt;
    return Section(*v, key_path(key));
  }

  const json* array(const std::string& key) {
    const json* v = take(key);
    if (v == nullptr) return nullptr;
    if (!v->is_array()) {
      throw ConfigError(key_path(key), "expected an array");
    }
    return v;
  }

  void finish() const {
    for (auto it = node_.begin(); it != node_.end(); ++it) {
      if (seen_.count(it.key()) == 0) {
        throw ConfigError(key_path(it.key()), "unknown field");
      }
    }
  }

 private:
  const json& node_;
  std::string path_;
  std::set<std::string> seen_;
};

json parse_document(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("<document>", std::string("not valid JSON: ") + e.what());
  }
}

void check_positive(const std::string& path, double value) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw ConfigError(path, "must be a positive finite number");
  }
}

void check_finite(const std::string& path, double value) {
  if (!std::isfinite(value)) {
    throw ConfigError(path, "must be finite");
  }
}

// Accepts "full", "general:<n_max>", or "even:<n_max>".
std::pair<fock::Scheme, int> parse_scheme(const std::string& value,
                                          const std::string& path) {
  if (value == "full") return {fock::Scheme::kFull, 0};
  const auto parse_tail = [&](std::size_t prefix_len) {
    const std::string tail = value.substr(prefix_len);
    std::size_t used = 0;
    int n_max = 0;
    try {
      n_max = std::stoi(tail, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != tail.size() || tail.empty() || n_max < 0) {
      throw ConfigError(path, "scheme suffix must be a non-negative integer");
    }
    return n_max;
  };
  if (value.rfind("general:", 0) == 0) {
    return {fock::Scheme::kGeneral, parse_tail(8)};
  }
  if (value.rfind("even:", 0) == 0) {
    return {fock::Scheme::kEvenOnly, parse_tail(5)};
  }
  throw ConfigError(path,
                    "expected \"full\", \"general:<n_max>\", or \"even:<n_max>\"");
}

GridParams parse_grid(Section& parent) {
  GridParams grid;
  if (auto section = parent.object("grid")) {
    grid.x_min = section->number("x_min", grid.x_min);
    grid.x_max = section->number("x_max", grid.x_max);
    grid.n_points = static_cast<int>(section->integer("n_points", grid.n_points));
    section->finish();
    check_finite(section->key_path("x_min"), grid.x_min);
    check_finite(section->key_path("x_max"), grid.x_max);
    if (!(grid.x_min < grid.x_max)) {
      throw ConfigError(section->key_path("x_max"),
                        "box must satisfy x_min < x_max");
    }
    if (grid.n_points < 3) {
      throw ConfigError(section->key_path("n_points"), "must be at least 3");
    }
  }
  return grid;
}

dvr::Interaction parse_interaction(Section& parent) {
  dvr::Interaction interaction;
  if (auto section = parent.object("interaction")) {
    const std::string kind = section->text("kind", "contact");
    if (kind == "contact") {
      interaction.kind = dvr::InteractionKind::kContact;
    } else if (kind == "harmonic") {
      interaction.kind = dvr::InteractionKind::kHarmonicPair;
    } else {
      throw ConfigError(section->key_path("kind"),
                        "expected \"contact\" or \"harmonic\"");
    }
    interaction.lambda = section->number("lambda", 0.0);
    section->finish();
    check_finite(section->key_path("lambda"), interaction.lambda);
  }
  return interaction;
}

propagator::IntegratorSpec parse_integrator(Section& parent) {
  propagator::IntegratorSpec spec;
  if (auto section = parent.object("integrator")) {
    const std::string method = section->text("method", "rk45");
    if (method == "rk45") {
      spec.method = propagator::Method::kRk45;
    } else if (method == "rk4") {
      spec.method = propagator::Method::kRk4;
    } else {
      throw ConfigError(section->key_path("method"),
                        "expected \"rk45\" or \"rk4\"");
    }
    spec.dt = section->number("dt", spec.dt);
    spec.abs_tol = section->number("abs_tol", spec.abs_tol);
    spec.rel_tol = section->number("rel_tol", spec.rel_tol);
    section->finish();
    check_positive(section->key_path("dt"), spec.dt);
    check_positive(section->key_path("abs_tol"), spec.abs_tol);
    check_positive(section->key_path("rel_tol"), spec.rel_tol);
  }
  return spec;
}

RelaxParams parse_relax(Section& parent) {
  RelaxParams relax;
  if (auto section = parent.object("relax")) {
    relax.tol_energy = section->number("tol_energy", relax.tol_energy);
    relax.max_steps = section->integer("max_steps", relax.max_steps);
    relax.noise = section->number("noise", relax.noise);
    relax.epsilon_rho = section->number("epsilon_rho", relax.epsilon_rho);
    section->finish();
    check_positive(section->key_path("tol_energy"), relax.tol_energy);
    if (relax.max_steps < 1) {
      throw ConfigError(section->key_path("max_steps"), "must be at least 1");
    }
    if (relax.noise < 0.0 || !std::isfinite(relax.noise)) {
      throw ConfigError(section->key_path("noise"),
                        "must be a non-negative finite number");
    }
    check_positive(section->key_path("epsilon_rho"), relax.epsilon_rho);
  }
  return relax;
}

unsigned parse_seed(Section& parent) {
  const std::int64_t seed = parent.integer("seed", 1);
  if (seed < 0 || seed > std::numeric_limits<unsigned>::max()) {
    throw ConfigError("seed", "must fit in an unsigned 32-bit integer");
  }
  return static_cast<unsigned>(seed);
}

// Shared by run and table documents: N, m1, orbitals, scheme string.
fock::RasSpec parse_space(Section& section, int particles) {
  fock::RasSpec space;
  space.n_particles = particles;
  const auto orbitals = section.integer("orbitals", 1);
  if (orbitals < 1) {
    throw ConfigError(section.key_path("orbitals"), "must be at least 1");
  }
  space.m1 = static_cast<int>(section.integer("m1", 1));
  if (space.m1 < 1 || space.m1 > orbitals) {
    throw ConfigError(section.key_path("m1"),
                      "must satisfy 1 <= m1 <= orbitals");
  }
  space.m2 = static_cast<int>(orbitals) - space.m1;
  const std::string scheme = section.text("scheme", "full");
  std::tie(space.scheme, space.n_max) =
      parse_scheme(scheme, section.key_path("scheme"));
  try {
    space.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(section.label() == "<document>" ? "scheme"
                                                      : section.label(),
                      e.what());
  }
  return space;
}

int parse_particles(Section& section) {
  const std::int64_t particles = section.require_integer("particles");
  if (particles < 1) {
    throw ConfigError(section.key_path("particles"), "must be at least 1");
  }
  return static_cast<int>(particles);
}

}  // namespace

RunConfig parse_run_config(const std::string& text) {
  const json document = parse_document(text);
  Section root(document, "");
  RunConfig cfg;

  const int particles = parse_particles(root);
  cfg.space = parse_space(root, particles);
  cfg.grid = parse_grid(root);
  cfg.omega_x = root.number("omega_x", 1.0);
  check_positive("omega_x", cfg.omega_x);
  cfg.interaction = parse_interaction(root);
  cfg.integrator = parse_integrator(root);
  cfg.relax = parse_relax(root);
  cfg.seed = parse_seed(root);
  cfg.output_prefix = root.text("output_prefix", "rasb");
  if (cfg.output_prefix.empty()) {
    throw ConfigError("output_prefix", "must not be empty");
  }

  const std::string task = root.text("task", "relax");
  if (task == "relax") {
    cfg.task = TaskKind::kRelax;
  } else if (task == "quench") {
    cfg.task = TaskKind::kQuench;
  } else if (task == "dims") {
    cfg.task = TaskKind::kDims;
  } else if (task == "cost") {
    cfg.task = TaskKind::kCost;
  } else {
    throw ConfigError("task",
                      "expected \"relax\", \"quench\", \"dims\", or \"cost\"");
  }

  auto quench_section = root.object("quench");
  if (cfg.task == TaskKind::kQuench) {
    if (!quench_section) {
      throw ConfigError("quench", "required for task \"quench\"");
    }
    QuenchTask quench;
    if (!quench_section->has("lambda_new")) {
      throw ConfigError(quench_section->key_path("lambda_new"),
                        "required field is missing");
    }
    quench.lambda_new = quench_section->number("lambda_new", 0.0);
    quench.t_final = quench_section->number("t_final", 0.0);
    quench.sample_interval = quench_section->number("sample_interval", 0.0);
    quench_section->finish();
    check_finite(quench_section->key_path("lambda_new"), quench.lambda_new);
    check_positive(quench_section->key_path("t_final"), quench.t_final);
    check_positive(quench_section->key_path("sample_interval"),
                   quench.sample_interval);
    if (quench.sample_interval > quench.t_final) {
      throw ConfigError(quench_section->key_path("sample_interval"),
                        "must not exceed t_final");
    }
    cfg.quench = quench;
  } else if (quench_section) {
    throw ConfigError("quench", "only allowed for task \"quench\"");
  }

  root.finish();
  return cfg;
}

TableConfig parse_table_config(const std::string& text) {
  const json document = parse_document(text);
  Section root(document, "");
  TableConfig cfg;

  cfg.particles = parse_particles(root);
  cfg.grid = parse_grid(root);
  cfg.omega_x = root.number("omega_x", 1.0);
  check_positive("omega_x", cfg.omega_x);
  cfg.interaction = parse_interaction(root);
  cfg.integrator = parse_integrator(root);
  cfg.relax = parse_relax(root);
  cfg.seed = parse_seed(root);
  cfg.output_prefix = root.text("output_prefix", "rasb");
  if (cfg.output_prefix.empty()) {
    throw ConfigError("output_prefix", "must not be empty");
  }

  const json* cells = root.array("cells");
  if (cells == nullptr) {
    throw ConfigError("cells", "required field is missing");
  }
  for (std::size_t i = 0; i < cells->size(); ++i) {
    const std::string path = "cells[" + std::to_string(i) + "]";
    Section section((*cells)[i], path);
    TableCell cell;
    cell.scheme_label = section.text("scheme", "full");
    fock::RasSpec space = parse_space(section, cfg.particles);
    section.finish();
    cell.orbitals = space.orbitals();
    cell.m1 = space.m1;
    cell.scheme = space.scheme;
    cell.n_max = space.n_max;
    cfg.cells.push_back(cell);
  }

  root.finish();
  return cfg;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ConfigError(path, "cannot open file for reading");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (!in.good() && !in.eof()) {
    throw ConfigError(path, "error while reading file");
  }
  return buffer.str();
}

}  // namespace rasb::config
