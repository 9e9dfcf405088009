// Reference-diagonalization tests: the dense operator must agree with
// hand-computable cases, and the fixed-basis ground state must behave as
// a variational upper bound converging to analytic values.

#include "rasb/oracle.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "rasb/dvr.hpp"
#include "rasb/eom.hpp"
#include "rasb/fock.hpp"
#include "rasb/secondq.hpp"

using rasb::Complex;
using rasb::Matrix;
using rasb::Tensor4;
using rasb::Vector;
using rasb::dvr::build_grid;
using rasb::dvr::Interaction;
using rasb::dvr::InteractionKind;
using rasb::oracle::dense_hamiltonian;
using rasb::oracle::DenseManyBodyOperator;
using rasb::oracle::exact_ground_state;
using rasb::oracle::lowest_eigenvalue;

namespace {

Matrix random_hermitian(int m, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Matrix a(m, m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) a(i, j) = Complex(u(rng), u(rng));
  }
  return 0.5 * (a + a.adjoint().eval());
}

}  // namespace

TEST(DenseHamiltonian, OneParticleEqualsOneBodyMatrix) {
  const int m = 4;
  const Matrix h = random_hermitian(m, 11);
  Tensor4 v(m);
  v.setZero();
  const DenseManyBodyOperator op = dense_hamiltonian(h, v, 1, m);
  ASSERT_EQ(op.matrix.rows(), m);
  // The single-particle basis enumerates |1 in orbital q> in order.
  EXPECT_NEAR((op.matrix - h).cwiseAbs().maxCoeff(), 0.0, 1e-14);
}

TEST(DenseHamiltonian, DiagonalNonInteractingSpectrum) {
  const int m = 3;
  const int n = 3;
  Matrix h = Matrix::Zero(m, m);
  h(0, 0) = 0.5;
  h(1, 1) = 1.5;
  h(2, 2) = 2.5;
  Tensor4 v(m);
  v.setZero();
  const DenseManyBodyOperator op = dense_hamiltonian(h, v, n, m);
  for (std::size_t col = 0; col < op.basis.size(); ++col) {
    Complex expected(0.0, 0.0);
    for (int q = 0; q < m; ++q) {
      expected += static_cast<double>(op.basis[col][q]) * h(q, q);
    }
    EXPECT_NEAR(std::abs(op.matrix(col, col) - expected), 0.0, 1e-13);
    for (std::size_t row = 0; row < op.basis.size(); ++row) {
      if (row != col) {
        EXPECT_EQ(op.matrix(row, col), Complex(0.0));
      }
    }
  }
}

TEST(DenseHamiltonian, HermitianOnPhysicalTensors) {
  const auto grid = build_grid(-8.0, 8.0, 61);
  const rasb::dvr::OrbitalSet basis{
      rasb::dvr::harmonic_eigenbasis(grid, 1.0, 3)};
  const Matrix h = rasb::dvr::one_body_matrix(basis, grid, 1.0);
  const Tensor4 v = rasb::dvr::two_body_tensor(
      basis, grid, {InteractionKind::kContact, 0.37});
  const DenseManyBodyOperator op = dense_hamiltonian(h, v, 3, 3);
  EXPECT_NEAR((op.matrix - op.matrix.adjoint()).cwiseAbs().maxCoeff(), 0.0,
              1e-12);
}

TEST(DenseHamiltonian, DimensionCapRefused) {
  Matrix h = Matrix::Zero(10, 10);
  Tensor4 v(10);
  v.setZero();
  EXPECT_THROW(dense_hamiltonian(h, v, 20, 10), std::invalid_argument);
}

TEST(ExactGroundState, NoninteractingGivesHalfPerParticle) {
  rasb::eom::Model model{build_grid(-8.0, 8.0, 101), 1.0,
                         {InteractionKind::kContact, 0.0}};
  EXPECT_NEAR(exact_ground_state(model, 3, 6), 1.5, 1e-9);
}

TEST(ExactGroundState, QuadraticPairPotentialMatchesSeparation) {
  // Two bosons with a quadratic pair coupling separate into center-of-mass
  // and relative oscillators: E = omega/2 + (N-1) sqrt(omega^2 + 2 N
  // lambda)/2.
  rasb::eom::Model model{build_grid(-8.0, 8.0, 121), 1.0,
                         {InteractionKind::kHarmonicPair, 0.5}};
  const double expected = 0.5 + 0.5 * std::sqrt(1.0 + 2.0 * 2.0 * 0.5);
  EXPECT_NEAR(exact_ground_state(model, 2, 14), expected, 1e-5);
}

TEST(ExactGroundState, VariationalInBasisSize) {
  rasb::eom::Model model{build_grid(-8.0, 8.0, 81), 1.0,
                         {InteractionKind::kContact, 0.8}};
  const double e6 = exact_ground_state(model, 3, 6);
  const double e10 = exact_ground_state(model, 3, 10);
  const double e14 = exact_ground_state(model, 3, 14);
  EXPECT_GE(e6, e10 - 1e-12);
  EXPECT_GE(e10, e14 - 1e-12);
}

TEST(ExactGroundState, AmplitudeRelaxationOnFrozenBasisAgrees) {
  // Imaginary-time evolution of the amplitudes alone, over the same fixed
  // basis, must converge to the dense ground state.
  const auto grid = build_grid(-8.0, 8.0, 61);
  const int m = 3;
  const int n = 3;
  const rasb::dvr::OrbitalSet basis{
      rasb::dvr::harmonic_eigenbasis(grid, 1.0, m)};
  const Matrix h = rasb::dvr::one_body_matrix(basis, grid, 1.0);
  const Tensor4 v = rasb::dvr::two_body_tensor(
      basis, grid, {InteractionKind::kContact, 0.6});
  const DenseManyBodyOperator op = dense_hamiltonian(h, v, n, m);
  const double reference = lowest_eigenvalue(op);

  rasb::fock::FockSpace space({n, 1, m - 1, rasb::fock::Scheme::kFull, 0});
  rasb::secondq::ExcitationTable table(space);
  Vector c = Vector::Zero(space.dim());
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::int64_t i = 0; i < space.dim(); ++i) c[i] = 0.5 + u(rng);
  c /= c.norm();
  const Matrix eta = Matrix::Zero(m, m);
  const double dtau = 0.01;
  for (int it = 0; it < 6000; ++it) {
    // Forward-Euler imaginary-time step on the amplitudes.
    const Vector k =
        Complex(0.0, -1.0) * rasb::eom::amplitude_rhs(c, h, v, eta, table);
    c += dtau * k;
    c /= c.norm();
  }
  const Vector hc = op.matrix * c;
  const double energy = std::real(c.dot(hc));
  EXPECT_NEAR(energy, reference, 1e-8);
}
