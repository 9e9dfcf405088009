#pragma once

#include <vector>

#include "rasb/common.hpp"
#include "rasb/eom.hpp"
#include "rasb/fock.hpp"

namespace rasb::oracle {

// Many-body Hamiltonian over the complete Fock space of a fixed orbital
// set, stored densely. Used as an independent reference for the sparse
// operator machinery and for small exact diagonalizations.
struct DenseManyBodyOperator {
  Matrix matrix;
  std::vector<fock::Occupation> basis;
};

// Builds <Phi_I|H|Phi_J> by direct ladder-operator application on
// occupation lists: one-body sum over h and the half-weighted two-body
// sum over v, with v(p, r, q, s) pairing creation indices (p, r) against
// annihilation indices (q, s). Refuses state spaces above 10^4.
DenseManyBodyOperator dense_hamiltonian(const Matrix& h, const Tensor4& v,
                                        int n_particles, int n_orbitals);

double lowest_eigenvalue(const DenseManyBodyOperator& op);

// Lowest eigenvalue over the span of the lowest `fixed_basis_size` trap
// eigenfunctions, built on the model's own grid so the reference shares
// the quadrature of the dynamical solver. A variational upper bound that
// decreases monotonically with the basis size.
double exact_ground_state(const eom::Model& model, int n_particles,
                          int fixed_basis_size);

}  // namespace rasb::oracle
