// Sine discrete-variable representation of one spatial dimension, plus the
// orbital integrals built on it.
//
// The box [x_min, x_max] is discretized on n interior points
// x_alpha = x_min + (alpha + 1) * dx with dx = (x_max - x_min) / (n + 1),
// so functions implicitly vanish at the box edges.  An orbital is stored by
// its grid values; inner products use the quadrature
// <f|g> = dx * sum_alpha conj(f_alpha) g_alpha.

#pragma once

#include "rasb/common.hpp"

namespace rasb::dvr {

// Grid geometry together with the dense second-derivative matrix.
struct Grid {
  double x_min = 0.0;
  double x_max = 0.0;
  int n_points = 0;
  double dx = 0.0;
  RealVector points;             // x_alpha, alpha = 0 .. n_points-1
  RealMatrix second_derivative;  // symmetric, negative definite
};

// Builds the grid and the closed-form second-derivative matrix.  Throws
// std::invalid_argument for an empty box or fewer than two points.
Grid build_grid(double x_min, double x_max, int n_points);

// Time-independent orbitals are columns of a complex n_points x M matrix.
struct OrbitalSet {
  Matrix values;

  int count() const noexcept { return static_cast<int>(values.cols()); }
};

enum class InteractionKind {
  kContact,       // W(x, x') = lambda * delta(x - x')
  kHarmonicPair,  // W(x, x') = lambda * (x - x')^2
};

struct Interaction {
  InteractionKind kind = InteractionKind::kContact;
  double lambda = 0.0;
};

// Thrown by orthonormalize when the orbitals are (numerically) linearly
// dependent.
class DegenerateBasisError : public std::runtime_error {
 public:
  explicit DegenerateBasisError(const std::string& what)
      : std::runtime_error(what) {}
};

// Applies h = -(1/2) d^2/dx^2 + (1/2) omega_x^2 x^2 to every column.
Matrix apply_one_body(const Grid& grid, double omega_x,
                      const Matrix& orbitals);

// Matrix elements h(p, q) = <phi_p| h |phi_q> over the orbital set.
Matrix one_body_matrix(const OrbitalSet& orbitals, const Grid& grid,
                       double omega_x);

// Two-body integrals
//   v(p, r, q, s) = integral phi_p*(x) phi_r*(x') W(x, x') phi_q(x)
//                   phi_s(x') dx dx',
// stored with both creation indices first: (p, r) are the bra orbitals and
// (q, s) the ket orbitals, pairs (p, q) at x and (r, s) at x'.
Tensor4 two_body_tensor(const OrbitalSet& orbitals, const Grid& grid,
                        const Interaction& interaction);

// Mean-field potentials W_kl(x) = integral phi_k*(x') W(x, x') phi_l(x')
// dx', returned as an n_points x M^2 matrix whose column k*M + l holds
// W_kl on the grid.  Consistency: contracting W_kl against a bra/ket
// orbital pair reproduces two_body_tensor entries.
Matrix mean_field_operators(const OrbitalSet& orbitals, const Grid& grid,
                            const Interaction& interaction);

// In-place modified Gram-Schmidt under the grid quadrature.  Throws
// DegenerateBasisError when a column's residual norm falls below 1e-12 of
// its original size.
void orthonormalize(OrbitalSet& orbitals, const Grid& grid);

// Lowest eigenfunctions of the trap Hamiltonian, quadrature-orthonormal,
// with a deterministic sign convention (largest-magnitude entry positive).
// Used for initial guesses and fixed-basis reference calculations.
Matrix harmonic_eigenbasis(const Grid& grid, double omega_x, int count);

}  // namespace rasb::dvr
