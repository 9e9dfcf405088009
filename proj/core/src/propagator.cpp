#include "rasb/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <utility>

#include "rasb/dvr.hpp"

namespace rasb::propagator {

namespace {

constexpr double kMinStep = 1e-12;
constexpr double kSafety = 0.9;
constexpr double kShrinkLimit = 0.2;
constexpr double kGrowLimit = 5.0;

// Dormand-Prince 5(4) tableau. The seventh stage evaluates the derivative
// at the fifth-order solution; its weight enters only the embedded
// fourth-order error estimate.
constexpr double kC[7] = {0.0,     1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0,
                          8.0 / 9.0, 1.0,       1.0};
constexpr double kA[7][6] = {
    {},
    {1.0 / 5.0},
    {3.0 / 40.0, 9.0 / 40.0},
    {44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0},
    {19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0,
     -212.0 / 729.0},
    {9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0,
     -5103.0 / 18656.0},
    {35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0,
     11.0 / 84.0}};
constexpr double kB5[7] = {35.0 / 384.0,    0.0,         500.0 / 1113.0,
                           125.0 / 192.0,   -2187.0 / 6784.0,
                           11.0 / 84.0,     0.0};
constexpr double kB4[7] = {5179.0 / 57600.0,  0.0,
                           7571.0 / 16695.0,  393.0 / 640.0,
                           -92097.0 / 339200.0, 187.0 / 2100.0,
                           1.0 / 40.0};

double step_factor(double err) {
  if (err <= 0.0) return kGrowLimit;
  return std::clamp(kSafety * std::pow(err, -0.2), kShrinkLimit,
                    kGrowLimit);
}

StepResult rk4_step(const DerivativeFn& f, double t, const Vector& y,
                    double dt) {
  const Vector k1 = f(t, y);
  const Vector k2 = f(t + 0.5 * dt, y + (0.5 * dt) * k1);
  const Vector k3 = f(t + 0.5 * dt, y + (0.5 * dt) * k2);
  const Vector k4 = f(t + dt, y + dt * k3);
  StepResult out;
  out.y = y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  if (!out.y.allFinite()) {
    throw PropagationError("state became non-finite during a step", t);
  }
  out.t = t + dt;
  out.dt_taken = dt;
  out.dt_next = dt;
  return out;
}

StepResult rk45_step(const DerivativeFn& f, double t, const Vector& y,
                     double dt, double abs_tol, double rel_tol) {
  double dt_try = dt;
  while (true) {
    if (dt_try < kMinStep) {
      throw PropagationError("adaptive step size underflow", t);
    }
    Vector k[7];
    bool finite = true;
    for (int s = 0; s < 7 && finite; ++s) {
      Vector arg = y;
      for (int j = 0; j < s; ++j) {
        if (kA[s][j] != 0.0) arg += (dt_try * kA[s][j]) * k[j];
      }
      // A trial stage taken with too large a step can momentarily collapse
      // the orbital basis; treat that like a non-finite stage and shrink.
      try {
        k[s] = f(t + kC[s] * dt_try, arg);
        finite = k[s].allFinite();
      } catch (const dvr::DegenerateBasisError&) {
        finite = false;
      }
    }
    if (finite) {
      Vector y5 = y;
      for (int s = 0; s < 7; ++s) {
        if (kB5[s] != 0.0) y5 += (dt_try * kB5[s]) * k[s];
      }
      Vector error = Vector::Zero(y.size());
      for (int s = 0; s < 7; ++s) {
        const double w = kB5[s] - kB4[s];
        if (w != 0.0) error += (dt_try * w) * k[s];
      }
      double sum = 0.0;
      for (Eigen::Index i = 0; i < y.size(); ++i) {
        const double scale =
            abs_tol +
            rel_tol * std::max(std::abs(y[i]), std::abs(y5[i]));
        const double ratio = std::abs(error[i]) / scale;
        sum += ratio * ratio;
      }
      const double err =
          std::sqrt(sum / static_cast<double>(std::max<Eigen::Index>(
                              y.size(), 1)));
      if (std::isfinite(err) && err <= 1.0 && y5.allFinite()) {
        StepResult out;
        out.y = std::move(y5);
        out.t = t + dt_try;
        out.dt_taken = dt_try;
        out.dt_next = dt_try * step_factor(err);
        return out;
      }
      if (std::isfinite(err)) {
        dt_try *= step_factor(err);
        continue;
      }
    }
    // A non-finite stage or error norm: retry with a strong shrink.
    dt_try *= kShrinkLimit;
  }
}

}  // namespace

void IntegratorSpec::validate() const {
  if (!(dt > 0.0)) {
    throw std::invalid_argument("integrator step must be positive");
  }
  if (!(abs_tol > 0.0) || !(rel_tol > 0.0)) {
    throw std::invalid_argument("integrator tolerances must be positive");
  }
}

StepResult advance_step(const DerivativeFn& f, double t, const Vector& y,
                        double dt, const IntegratorSpec& spec) {
  spec.validate();
  if (!(dt > 0.0)) {
    throw std::invalid_argument("step size must be positive");
  }
  switch (spec.method) {
    case Method::kRk4:
      return rk4_step(f, t, y, dt);
    case Method::kRk45:
      return rk45_step(f, t, y, dt, spec.abs_tol, spec.rel_tol);
  }
  throw std::logic_error("unhandled integration method");
}

Propagation::Propagation(const eom::Model& model,
                         const fock::RasSpec& spec,
                         const IntegratorSpec& integrator,
                         eom::TimeMode mode, double epsilon_rho)
    : model_(model),
      space_(spec),
      table_(space_),
      integrator_(integrator),
      mode_(mode),
      epsilon_rho_(epsilon_rho),
      dt_(integrator.dt) {
  integrator_.validate();
  if (!(epsilon_rho_ > 0.0)) {
    throw std::invalid_argument(
        "density regularization scale must be positive");
  }
}

void Propagation::set_state(eom::WavefunctionState state) {
  if (state.c.size() != space_.dim()) {
    throw std::invalid_argument(
        "amplitude vector does not match the configuration space");
  }
  if (state.orbitals.values.rows() != model_.grid.n_points ||
      state.orbitals.count() != space_.orbitals()) {
    throw std::invalid_argument("orbitals do not match grid or space");
  }
  state_ = std::move(state);
}

void Propagation::set_interaction(const dvr::Interaction& interaction) {
  model_.interaction = interaction;
}

void Propagation::set_dt(double dt) {
  if (!(dt > 0.0)) {
    throw std::invalid_argument("step size must be positive");
  }
  dt_ = dt;
}

Vector Propagation::pack() const {
  const std::int64_t dim = space_.dim();
  const std::int64_t grid_size =
      static_cast<std::int64_t>(model_.grid.n_points) * space_.orbitals();
  Vector y(dim + grid_size);
  y.head(dim) = state_.c;
  y.tail(grid_size) = Eigen::Map<const Vector>(
      state_.orbitals.values.data(), grid_size);
  return y;
}

void Propagation::unpack(const Vector& y) {
  const std::int64_t dim = space_.dim();
  state_.c = y.head(dim);
  state_.orbitals.values = Eigen::Map<const Matrix>(
      y.data() + dim, model_.grid.n_points, space_.orbitals());
}

Vector Propagation::flat_derivative(double t, const Vector& y) {
  const std::int64_t dim = space_.dim();
  eom::WavefunctionState probe;
  probe.c = y.head(dim);
  probe.orbitals.values = Eigen::Map<const Matrix>(
      y.data() + dim, model_.grid.n_points, space_.orbitals());
  probe.time = t;
  eom::DerivativeOptions options;
  options.mode = mode_;
  options.epsilon_rho = epsilon_rho_;
  const eom::StateDerivative d =
      eom::state_derivative(probe, model_, table_, options);
  any_regularized_ = any_regularized_ || d.eta.regularized;
  if (d.eta.regularized) ++regularized_events_;
  max_residual_ = std::max(max_residual_, d.eta.residual);
  Vector out(y.size());
  out.head(dim) = d.c_dot;
  out.tail(y.size() - dim) = Eigen::Map<const Vector>(
      d.orbital_dot.data(), y.size() - dim);
  return out;
}

void Propagation::step() {
  const auto f = [this](double t, const Vector& y) {
    return flat_derivative(t, y);
  };
  const StepResult result =
      advance_step(f, state_.time, pack(), dt_, integrator_);
  unpack(result.y);
  state_.time = result.t;
  dt_ = result.dt_next;
  if (mode_ == eom::TimeMode::kImaginary) {
    const double norm = state_.c.norm();
    if (!(norm > 0.0)) {
      throw PropagationError("amplitudes vanished in imaginary time",
                             state_.time);
    }
    state_.c /= norm;
    dvr::orthonormalize(state_.orbitals, model_.grid);
  }
}

void Propagation::advance_to(double t_target) {
  while (state_.time < t_target - 1e-12) {
    const double remaining = t_target - state_.time;
    if (dt_ <= remaining) {
      step();
      continue;
    }
    // Clamp the final step; keep the cruising step size for afterwards.
    const double saved_dt = dt_;
    dt_ = remaining;
    step();
    if (integrator_.method == Method::kRk4 || dt_ > remaining) {
      // Fixed-step methods always resume at the configured step; the
      // adaptive controller's suggestion replaces the saved step only
      // when it asked for something smaller than the clamp.
      dt_ = saved_dt;
    }
  }
}

eom::WavefunctionState make_initial_state(const eom::Model& model,
                                          const fock::FockSpace& space,
                                          double noise, unsigned seed) {
  if (noise < 0.0) {
    throw std::invalid_argument("noise amplitude must be nonnegative");
  }
  eom::WavefunctionState state;
  state.orbitals.values = dvr::harmonic_eigenbasis(
      model.grid, model.omega_x, space.orbitals());
  state.c = Vector::Zero(space.dim());
  state.c[0] = 1.0;
  if (noise > 0.0 && space.dim() > 1) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (std::int64_t i = 1; i < space.dim(); ++i) {
      state.c[i] = noise * u(rng);
    }
    state.c /= state.c.norm();
  }
  state.time = 0.0;
  return state;
}

RelaxResult relax(const eom::Model& model, const fock::RasSpec& spec,
                  const IntegratorSpec& integrator,
                  const RelaxOptions& options) {
  if (!(options.tol_energy > 0.0)) {
    throw std::invalid_argument("energy tolerance must be positive");
  }
  if (options.max_steps <= 0) {
    throw std::invalid_argument("step budget must be positive");
  }
  Propagation propagation(model, spec, integrator,
                          eom::TimeMode::kImaginary, options.epsilon_rho);
  propagation.set_state(make_initial_state(
      model, propagation.space(), options.noise, options.seed));

  RelaxResult out;
  double e_prev =
      observables::energy(propagation.state(), model, propagation.table());
  out.trace.push_back({0.0, e_prev});

  for (std::int64_t step = 0; step < options.max_steps; ++step) {
    const eom::WavefunctionState before = propagation.state();
    const double dt_before = propagation.dt();
    propagation.step();
    ++out.steps;
    const double e = observables::energy(propagation.state(), model,
                                         propagation.table());
    const double slack = 1e-8 * std::max(1.0, std::abs(e_prev));
    if (!std::isfinite(e) || e > e_prev + slack) {
      // Variational descent must not raise the energy; retry the step at
      // half size from the saved state.
      ++out.energy_rejections;
      const double halved = 0.5 * dt_before;
      if (halved < kMinStep) {
        throw PropagationError(
            "imaginary-time step underflow while rejecting an energy "
            "increase",
            before.time);
      }
      propagation.set_state(before);
      propagation.set_dt(halved);
      continue;
    }
    const double dtau = propagation.state().time - before.time;
    out.trace.push_back({propagation.state().time, e});
    const double rate = std::abs(e - e_prev) / dtau;
    e_prev = e;
    if (rate < options.tol_energy) {
      out.converged = true;
      break;
    }
  }

  out.state = propagation.state();
  out.any_regularized = propagation.any_regularized();
  out.regularized_events = propagation.regularized_events();
  out.max_residual = propagation.max_residual();
  if (!out.converged) {
    out.warning =
        "relaxation stopped at the step budget before the energy rate "
        "reached the threshold";
  }
  return out;
}

void Protocol::validate() const {
  const bool real_time = kind != ProtocolKind::kRelax;
  if (real_time) {
    if (!(t_final > 0.0)) {
      throw std::invalid_argument(
          "real-time protocols need a positive final time");
    }
    if (!(sample_interval > 0.0)) {
      throw std::invalid_argument(
          "real-time protocols need a positive sample interval");
    }
  }
  if (kind == ProtocolKind::kQuenchThenPropagate && !quench.has_value()) {
    throw std::invalid_argument(
        "quench protocols need the post-quench interaction");
  }
  if (kind != ProtocolKind::kQuenchThenPropagate && quench.has_value()) {
    throw std::invalid_argument(
        "only quench protocols accept a post-quench interaction");
  }
}

ProtocolResult run_protocol(const Protocol& protocol,
                            const eom::Model& model,
                            const fock::RasSpec& spec,
                            const IntegratorSpec& integrator) {
  protocol.validate();
  ProtocolResult out;
  out.relaxation = relax(model, spec, integrator, protocol.relax_options);
  out.any_regularized = out.relaxation.any_regularized;
  out.regularized_events = out.relaxation.regularized_events;
  out.max_residual = out.relaxation.max_residual;

  if (protocol.kind == ProtocolKind::kRelax) {
    out.final_state = out.relaxation.state;
    out.final_state.time = 0.0;
    fock::FockSpace space(spec);
    secondq::ExcitationTable table(space);
    out.series.push_back(
        observables::sample(out.final_state, model, table));
    return out;
  }

  Propagation propagation(model, spec, integrator, eom::TimeMode::kReal,
                          protocol.relax_options.epsilon_rho);
  if (protocol.quench.has_value()) {
    propagation.set_interaction(*protocol.quench);
  }
  eom::WavefunctionState state = out.relaxation.state;
  state.time = 0.0;
  propagation.set_state(std::move(state));

  out.series.push_back(observables::sample(
      propagation.state(), propagation.model(), propagation.table()));
  for (std::int64_t k = 1;; ++k) {
    const double t_sample = static_cast<double>(k) *
                            protocol.sample_interval;
    if (t_sample > protocol.t_final + 1e-9) break;
    propagation.advance_to(t_sample);
    out.series.push_back(observables::sample(
        propagation.state(), propagation.model(), propagation.table()));
  }
  out.final_state = propagation.state();
  out.any_regularized =
      out.any_regularized || propagation.any_regularized();
  out.regularized_events += propagation.regularized_events();
  out.max_residual =
      std::max(out.max_residual, propagation.max_residual());
  return out;
}

}  // namespace rasb::propagator
