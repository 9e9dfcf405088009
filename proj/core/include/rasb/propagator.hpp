// Time integration of the coupled amplitude and orbital equations, in real
// or imaginary time, and the relax/quench protocols built on it.

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "rasb/common.hpp"
#include "rasb/eom.hpp"
#include "rasb/observables.hpp"

namespace rasb::propagator {

enum class Method {
  kRk4,   // classic fixed-step fourth order
  kRk45,  // Dormand-Prince embedded 5(4) with adaptive step control
};

struct IntegratorSpec {
  Method method = Method::kRk45;
  double dt = 1e-3;       // initial step, in inverse trap frequencies
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;

  // Throws std::invalid_argument when the step or a tolerance is not
  // positive.
  void validate() const;
};

// Right-hand side over a flat state vector, as used by the steppers.
using DerivativeFn = std::function<Vector(double t, const Vector& y)>;

struct StepResult {
  Vector y;
  double t = 0.0;        // time after the accepted step
  double dt_taken = 0.0;
  double dt_next = 0.0;  // controller suggestion; equals dt_taken for RK4
};

// One accepted step. The adaptive method may try several step sizes,
// shrinking on error-control rejection; a shrink below 1e-12 or a
// non-finite stage throws PropagationError with the last accepted time.
StepResult advance_step(const DerivativeFn& f, double t, const Vector& y,
                        double dt, const IntegratorSpec& spec);

// Owns one propagation: the configuration space, the excitation table,
// the model, and the current state. Non-copyable because the table holds
// a pointer to the space.
class Propagation {
 public:
  Propagation(const eom::Model& model, const fock::RasSpec& spec,
              const IntegratorSpec& integrator,
              eom::TimeMode mode = eom::TimeMode::kReal,
              double epsilon_rho = 1e-8);
  Propagation(const Propagation&) = delete;
  Propagation& operator=(const Propagation&) = delete;

  const fock::FockSpace& space() const noexcept { return space_; }
  const secondq::ExcitationTable& table() const noexcept { return table_; }
  const eom::Model& model() const noexcept { return model_; }

  void set_state(eom::WavefunctionState state);
  const eom::WavefunctionState& state() const noexcept { return state_; }

  // Replaces the pair interaction at fixed state (an instantaneous
  // quench).
  void set_interaction(const dvr::Interaction& interaction);

  double dt() const noexcept { return dt_; }
  void set_dt(double dt);

  // One accepted step. Imaginary time renormalizes the amplitudes and
  // re-orthonormalizes the orbitals afterwards.
  void step();

  // Steps until exactly t_target, clamping the final step; the adaptive
  // step size is restored after the clamped step.
  void advance_to(double t_target);

  // True when any rotation solve or density inversion was regularized
  // since construction.
  bool any_regularized() const noexcept { return any_regularized_; }
  // Number of derivative evaluations whose rotation solve was regularized.
  std::int64_t regularized_events() const noexcept {
    return regularized_events_;
  }
  // Largest relative residual reported by the rotation solves.
  double max_residual() const noexcept { return max_residual_; }

 private:
  Vector pack() const;
  void unpack(const Vector& y);
  Vector flat_derivative(double t, const Vector& y);

  eom::Model model_;
  fock::FockSpace space_;  // must outlive table_
  secondq::ExcitationTable table_;
  IntegratorSpec integrator_;
  eom::TimeMode mode_;
  double epsilon_rho_;
  eom::WavefunctionState state_;
  double dt_ = 0.0;
  bool any_regularized_ = false;
  std::int64_t regularized_events_ = 0;
  double max_residual_ = 0.0;
};

// Harmonic-trap eigenfunctions as orbitals; all particles in the lowest
// orbital plus uniform noise on every other configuration to let the
// relaxation reach states of any symmetry. The amplitude vector is
// normalized.
eom::WavefunctionState make_initial_state(const eom::Model& model,
                                          const fock::FockSpace& space,
                                          double noise, unsigned seed);

struct RelaxOptions {
  double tol_energy = 1e-10;     // threshold on |dE| / dtau
  std::int64_t max_steps = 200000;
  double noise = 1e-6;
  unsigned seed = 1;
  double epsilon_rho = 1e-8;
};

struct EnergySample {
  double tau = 0.0;
  double energy = 0.0;
};

struct RelaxResult {
  eom::WavefunctionState state;
  std::vector<EnergySample> trace;
  bool converged = false;
  std::int64_t steps = 0;
  // Steps rejected because the energy rose beyond the monotonicity slack;
  // each rejection halves the step.
  std::int64_t energy_rejections = 0;
  bool any_regularized = false;
  std::int64_t regularized_events = 0;
  double max_residual = 0.0;
  std::string warning;  // empty when converged
};

// Imaginary-time relaxation to the lowest state of the scheme, from the
// noise-seeded initial guess, until the energy rate falls below
// tol_energy. Exhausting max_steps returns the best state found with a
// warning instead of throwing.
RelaxResult relax(const eom::Model& model, const fock::RasSpec& spec,
                  const IntegratorSpec& integrator,
                  const RelaxOptions& options = {});

enum class ProtocolKind {
  kRelax,                // imaginary time only
  kPropagate,            // relax, then real time under the same model
  kQuenchThenPropagate,  // relax, swap the interaction, then real time
};

struct Protocol {
  ProtocolKind kind = ProtocolKind::kRelax;
  double t_final = 0.0;
  double sample_interval = 0.0;
  std::optional<dvr::Interaction> quench;  // required for quench runs
  RelaxOptions relax_options;

  // Throws std::invalid_argument on inconsistent fields (non-positive
  // times for real-time runs, quench kind without a quench interaction).
  void validate() const;
};

struct ProtocolResult {
  std::vector<observables::ObservableRecord> series;
  eom::WavefunctionState final_state;
  RelaxResult relaxation;
  bool any_regularized = false;
  std::int64_t regularized_events = 0;
  double max_residual = 0.0;
};

// Runs the protocol: relaxation under the model interaction, then (for
// the real-time kinds) propagation to t_final with one observable record
// at every multiple of sample_interval, starting at t = 0.
ProtocolResult run_protocol(const Protocol& protocol,
                            const eom::Model& model,
                            const fock::RasSpec& spec,
                            const IntegratorSpec& integrator);

}  // namespace rasb::propagator
