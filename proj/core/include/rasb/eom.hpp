#pragma once

#include "rasb/common.hpp"
#include "rasb/dvr.hpp"
#include "rasb/fock.hpp"
#include "rasb/secondq.hpp"

namespace rasb::eom {

// Physical problem definition: grid, trap frequency, and pair interaction.
struct Model {
  dvr::Grid grid;
  double omega_x = 1.0;
  dvr::Interaction interaction;
};

// Variational state: configuration amplitudes over the active space plus
// the orbital values on the grid. `time` is in units of the inverse trap
// frequency.
struct WavefunctionState {
  Vector c;
  dvr::OrbitalSet orbitals;
  double time = 0.0;
};

enum class TimeMode { kReal, kImaginary };

// Orbital-rotation matrix eta(p, q) = <phi_p | d/dt phi_q>. Anti-Hermitian
// with zero blocks inside each orbital partition; only the cross blocks
// carry information and are obtained from a linear solve.
struct EtaMatrix {
  Matrix eta;
  // True when the linear system was singular and a Tikhonov shift (or the
  // zero solution, for an identically vanishing system) was used.
  bool regularized = false;
  double condition = 0.0;  // condition estimate of the solved system
  double residual = 0.0;   // relative residual of the linear equations
};

struct StateDerivative {
  Vector c_dot;
  Matrix orbital_dot;  // n_points x M, same layout as OrbitalSet::values
  EtaMatrix eta;
};

struct DerivativeOptions {
  TimeMode mode = TimeMode::kReal;
  double epsilon_rho = 1e-8;  // density-matrix regularization scale
};

// Inverse of a Hermitian density matrix with the eigenvalue floor
// mu -> mu + eps * exp(-mu / eps), which leaves large eigenvalues
// untouched and bounds the inverse for (near-)singular ones.
Matrix regularized_inverse(const Matrix& rho1, double epsilon);

// Cross-block orbital rotation for schemes restricted to even transfer
// counts. Solves the (m1*m2) x (m1*m2) system built from the one-body
// density for X = h - i*eta on the cross block and completes eta
// anti-Hermitically. Requires an even-shell scheme.
EtaMatrix solve_eta_even(const Matrix& h, const Tensor4& v,
                         const Matrix& rho1, const Tensor4& rho2,
                         const fock::RasSpec& spec);

// Cross-block orbital rotation for contiguous-shell schemes with a
// boundary shell, via the fourth- and sixth-order boundary tensors.
// Solves zeta4 * X = RHS for X = i*eta - h. For a top shell at the
// particle number the rotation is unconstrained and set to zero.
EtaMatrix solve_eta_general(const Matrix& h, const Tensor4& v,
                            const Vector& c,
                            const secondq::ExcitationTable& table);

// Time derivative of the configuration amplitudes in real-time
// convention: returns -i * [sum_ij (h - i*eta)_ij <Phi_I|b_i^+ b_j|Psi>
// + 1/2 sum v(i,k,j,l) <Phi_I|b_i^+ b_k^+ b_l b_j|Psi>].
Vector amplitude_rhs(const Vector& c, const Matrix& h, const Tensor4& v,
                     const Matrix& eta,
                     const secondq::ExcitationTable& table);
// Same, with the excitation images of c supplied by the caller.
Vector amplitude_rhs(const Vector& c, const Matrix& h, const Tensor4& v,
                     const Matrix& eta,
                     const secondq::ExcitationTable& table,
                     const Matrix& images);

// Orbital time derivative component orthogonal to the occupied span, in
// real-time convention: -i (1 - P) [h phi_i + sum_j F_ij phi_j] with the
// mean-field coupling F built from the regularized inverse of rho1.
Matrix qspace_rhs(const dvr::OrbitalSet& orbitals, const Vector& c,
                  const Model& model, const secondq::ExcitationTable& table,
                  double epsilon_rho = 1e-8);

// Full time derivative of (C, orbitals): assembles h, v, the densities,
// eta for the active scheme, the amplitude derivative and the orbital
// derivative (rotation part plus orthogonal part). Imaginary-time mode
// multiplies every derivative by -i.
StateDerivative state_derivative(const WavefunctionState& state,
                                 const Model& model,
                                 const secondq::ExcitationTable& table,
                                 const DerivativeOptions& options = {});

}  // namespace rasb::eom
