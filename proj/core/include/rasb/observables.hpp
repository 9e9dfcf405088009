// Observables over variational states: total energy, one-body density,
// natural occupations, correlation-energy diagnostics, and breathing-mode
// frequency extraction from a density time series.

#pragma once

#include <optional>
#include <vector>

#include "rasb/common.hpp"
#include "rasb/eom.hpp"
#include "rasb/secondq.hpp"

namespace rasb::observables {

// One sampled point of a propagation. Energies are in units of the trap
// quantum, lengths in trap units, times in inverse trap frequencies.
struct ObservableRecord {
  double t = 0.0;
  double energy = 0.0;
  double norm = 0.0;
  double rho0 = 0.0;                // one-body density at x = 0
  RealVector natural_occupations;   // descending, sums to N
};

// E = sum_pq h(p, q) rho1(p, q) + 1/2 sum v(p, r, q, s) rho2(p, r, q, s).
// The imaginary part must be numerical noise; |Im E| > 1e-8 throws
// std::runtime_error, smaller imaginary parts are discarded.
double energy_from_parts(const Matrix& h, const Tensor4& v,
                         const Matrix& rho1, const Tensor4& rho2);

// Convenience overload that assembles the integrals and densities.
double energy(const eom::WavefunctionState& state, const eom::Model& model,
              const secondq::ExcitationTable& table);

// rho(x_alpha) = sum_ij rho1(i, j) conj(phi_i(x_alpha)) phi_j(x_alpha).
// Integrates to the particle number under the grid quadrature.
RealVector density_profile(const eom::WavefunctionState& state,
                           const dvr::Grid& grid,
                           const secondq::ExcitationTable& table);

// Density at x = 0: the grid value when 0 is a grid point, otherwise a
// quadratic interpolation through the three points nearest the origin.
double rho_at_origin(const RealVector& density, const dvr::Grid& grid);

// Eigenvalues of the one-body density matrix, descending, clipped to
// [0, N] (clipping tolerates eigensolver noise of order 1e-10).
RealVector natural_occupations(const eom::WavefunctionState& state,
                               const secondq::ExcitationTable& table);

struct CorrelationEnergies {
  double e_corr = 0.0;               // E_GP - E_method
  std::optional<double> fraction;    // e_corr / (E_GP - E_ref)
};

// Correlation energy recovered by a method relative to the mean-field
// result, and its fraction of a reference method's correlation energy.
// A vanishing reference correlation leaves the fraction unset.
CorrelationEnergies correlation_energies(double e_method, double e_gp,
                                         double e_ref);

// Dominant angular frequency of a uniformly sampled real series, via a
// Hann-windowed discrete spectrum scanned densely in frequency with
// parabolic refinement of the peak. Returns nullopt when the series does
// not oscillate (variance below 1e-12).
std::optional<double> breathing_frequency(const std::vector<double>& t,
                                          const std::vector<double>& rho0);

// Breathing-mode frequencies of the harmonically trapped contact gas:
// Omega_n = 2 n sqrt(omega_x^2 + 2 N lambda).
double breathing_omega_analytic(int n, double omega_x, int n_particles,
                                double lambda);

// Assembles one record from a state (shared density build).
ObservableRecord sample(const eom::WavefunctionState& state,
                        const eom::Model& model,
                        const secondq::ExcitationTable& table);

}  // namespace rasb::observables
