// Second-quantized one-body operator application on restricted
// configuration spaces, and the reduced density matrices and boundary
// tensors assembled from it.
//
// Everything here works on the extended layout of a FockSpace (variational
// shells followed by halo shells): one application of b_i^dagger b_j to a
// state supported on the variational space never leaves that layout, which
// makes two-operator expectation values exact Gram products of the
// single-application images.

#pragma once

#include <cstdint>
#include <vector>

#include "rasb/common.hpp"
#include "rasb/fock.hpp"

namespace rasb::secondq {

// Precomputed gather maps: for every ordered orbital pair (i, j) and every
// target configuration T of the extended layout, the source configuration
// index and the bosonic ladder factor of <Phi_T| b_i^dagger b_j |Phi_src>.
// Building the table costs one pass over the layout per orbital pair;
// afterwards each operator application is a single gather.
class ExcitationTable {
 public:
  explicit ExcitationTable(const fock::FockSpace& space);

  const fock::FockSpace& space() const noexcept { return *space_; }
  int orbitals() const noexcept { return m_; }

  // Zero-pads a variational-space vector to the extended layout.
  Vector pad(const Vector& c) const;

  // out_T = factor_ij(T) * in[source_ij(T)] over the extended layout.
  // Both vectors have dim_extended entries; missing sources give zero.
  void apply(int i, int j, const Vector& in, Vector& out) const;

  // Images of the state under every excitation operator: a dim_extended x
  // M^2 matrix whose column i*M + j holds <Phi_T| b_i^dagger b_j |Psi>.
  // `c` may have dim or dim_extended entries.
  Matrix images(const Vector& c) const;

 private:
  const fock::FockSpace* space_;
  int m_ = 0;
  std::int64_t dim_ext_ = 0;
  // Per pair p = i*M + j: source index (-1 when absent) and ladder factor.
  std::vector<std::vector<std::int64_t>> source_;
  std::vector<std::vector<double>> factor_;
};

// c'_I = <Phi_I| b_i^dagger b_j |Psi> restricted to the variational space;
// sources outside the space contribute zero.  Orbital indices are 0-based.
// Throws std::invalid_argument for out-of-range indices or a coefficient
// vector of the wrong length.
Vector apply_excitation(const Vector& c, int i, int j,
                        const fock::FockSpace& space);

// One-body reduced density matrix rho1(i, j) = <Psi| b_i^dagger b_j |Psi>.
Matrix build_rho1(const Vector& c, const ExcitationTable& table,
                  const Matrix& images);
Matrix build_rho1(const Vector& c, const ExcitationTable& table);

// Two-body reduced density matrix
//   rho2(i, k, j, l) = <Psi| b_i^dagger b_k^dagger b_l b_j |Psi>,
// stored with both creation indices first, pairs (i, j) and (k, l).
Tensor4 build_rho2(const Vector& c, const ExcitationTable& table,
                   const Matrix& images);
Tensor4 build_rho2(const Vector& c, const ExcitationTable& table);

// Coefficient matrix of the even-scheme cross-space linear system.  Row
// r = i1 * m2 + (j2 - m1) is the equation labeled (i' = i1, j'' = j2);
// column c = l1 * m2 + (k2 - m1) multiplies the unknown X(l', k'').  The
// entry is rho1(i', l') [k'' == j''] - rho1(k'', j'') [i' == l'].
Matrix build_A_tensor(const Matrix& rho1, const fock::RasSpec& spec);

// Bra-side boundary vector of a general scheme: coefficients of
// <Psi| b_i1^dagger b_j2 projected on the shell just outside the
// variational space, returned over the extended layout (support only on
// that shell).  n_max = N gives the zero vector.  Throws
// std::invalid_argument for even schemes (no single boundary shell) or
// out-of-partition orbital indices.
Vector boundary_bra(const Vector& c, int i1, int j2,
                    const ExcitationTable& table);

// Fourth-order boundary tensor zeta4(k'', i', l', j'') =
// <Psi_{i'}^{j''}| (1 - Pi) b_k2^dagger b_l1 |Psi>, packed as the linear
// map of the general-scheme system: entry (row i1 * m2 + (j2 - m1),
// column l1 * m2 + (k2 - m1)).
Matrix build_zeta4(const Vector& c, const ExcitationTable& table,
                   const Matrix& images);

// Sixth-order boundary tensor zeta6(k, m, i', l, n, j'') =
// <Psi_{i'}^{j''}| (1 - Pi) b_k^dagger b_m^dagger b_n b_l |Psi> with
// k, l, m, n over all M orbitals and (i', j'') over cross-space pairs.
class Zeta6 {
 public:
  Zeta6() = default;
  Zeta6(int m, int m1);

  int orbitals() const noexcept { return m_; }

  // i1 in [0, m1); j2 in [m1, M).
  Complex& at(int k, int m, int i1, int l, int n, int j2);
  const Complex& at(int k, int m, int i1, int l, int n, int j2) const;

 private:
  std::size_t flat(int k, int m, int i1, int l, int n, int j2) const;

  int m_ = 0;
  int m1_ = 0;
  std::vector<Complex> data_;
};

Zeta6 build_zeta6(const Vector& c, const ExcitationTable& table,
                  const Matrix& images);

}  // namespace rasb::secondq
