#include "rasb/oracle.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <map>
#include <stdexcept>

#include "rasb/dvr.hpp"

namespace rasb::oracle {

namespace {

constexpr std::int64_t kDimensionCap = 10000;

}  // namespace

DenseManyBodyOperator dense_hamiltonian(const Matrix& h, const Tensor4& v,
                                        int n_particles, int n_orbitals) {
  if (n_particles < 1 || n_orbitals < 1) {
    throw std::invalid_argument(
        "dense operator needs at least one particle and one orbital");
  }
  if (h.rows() != n_orbitals || h.cols() != n_orbitals) {
    throw std::invalid_argument("one-body matrix has the wrong extent");
  }
  const std::int64_t dim = fock::dim_fci(n_particles, n_orbitals);
  if (dim > kDimensionCap) {
    throw std::invalid_argument(
        "state space dimension exceeds the dense-operator cap");
  }

  DenseManyBodyOperator op;
  const fock::FockSpace space(
      {n_particles, 1, n_orbitals - 1, fock::Scheme::kFull, 0});
  op.basis.reserve(static_cast<std::size_t>(dim));
  std::map<fock::Occupation, std::int64_t> index;
  for (std::int64_t pos = 0; pos < dim; ++pos) {
    op.basis.push_back(space.occupation_at(pos));
    index[op.basis.back()] = pos;
  }
  op.matrix = Matrix::Zero(dim, dim);

  fock::Occupation work;
  for (std::int64_t col = 0; col < dim; ++col) {
    const fock::Occupation& occ = op.basis[static_cast<std::size_t>(col)];
    // One-body: b_i^+ b_j with the ladder factors taken directly from
    // the occupations.
    for (int j = 0; j < n_orbitals; ++j) {
      if (occ[j] == 0) continue;
      for (int i = 0; i < n_orbitals; ++i) {
        if (h(i, j) == Complex(0.0)) continue;
        work = occ;
        const double f1 = std::sqrt(static_cast<double>(work[j]));
        work[j] -= 1;
        const double f2 = std::sqrt(static_cast<double>(work[i] + 1));
        work[i] += 1;
        op.matrix(index.at(work), col) += h(i, j) * (f1 * f2);
      }
    }
    // Two-body: 1/2 sum v(i,k,j,l) b_i^+ b_k^+ b_l b_j applied right to
    // left, one ladder operator at a time.
    for (int j = 0; j < n_orbitals; ++j) {
      if (occ[j] == 0) continue;
      for (int l = 0; l < n_orbitals; ++l) {
        work = occ;
        const double f1 = std::sqrt(static_cast<double>(work[j]));
        work[j] -= 1;
        if (work[l] == 0) continue;
        const double f2 = std::sqrt(static_cast<double>(work[l]));
        work[l] -= 1;
        const fock::Occupation lowered = work;
        for (int k = 0; k < n_orbitals; ++k) {
          for (int i = 0; i < n_orbitals; ++i) {
            if (v(i, k, j, l) == Complex(0.0)) continue;
            work = lowered;
            const double f3 = std::sqrt(static_cast<double>(work[k] + 1));
            work[k] += 1;
            const double f4 = std::sqrt(static_cast<double>(work[i] + 1));
            work[i] += 1;
            op.matrix(index.at(work), col) +=
                0.5 * v(i, k, j, l) * (f1 * f2 * f3 * f4);
          }
        }
      }
    }
  }
  return op;
}

double lowest_eigenvalue(const DenseManyBodyOperator& op) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(op.matrix,
                                               Eigen::EigenvaluesOnly);
  return solver.eigenvalues()(0);
}

double exact_ground_state(const eom::Model& model, int n_particles,
                          int fixed_basis_size) {
  const dvr::OrbitalSet basis{dvr::harmonic_eigenbasis(
      model.grid, model.omega_x, fixed_basis_size)};
  const Matrix h = dvr::one_body_matrix(basis, model.grid, model.omega_x);
  const Tensor4 v =
      dvr::two_body_tensor(basis, model.grid, model.interaction);
  return lowest_eigenvalue(
      dense_hamiltonian(h, v, n_particles, fixed_basis_size));
}

}  // namespace rasb::oracle
