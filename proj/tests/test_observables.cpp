// Observable tests: energies against the dense reference, density
// normalization and symmetry, natural occupations on hand-built states,
// the correlation-energy bookkeeping, and frequency extraction on
// synthetic series.

#include "rasb/observables.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "rasb/dvr.hpp"
#include "rasb/fock.hpp"
#include "rasb/oracle.hpp"
#include "rasb/secondq.hpp"

using rasb::Complex;
using rasb::Matrix;
using rasb::RealVector;
using rasb::Tensor4;
using rasb::Vector;
using rasb::dvr::build_grid;
using rasb::dvr::Grid;
using rasb::dvr::InteractionKind;
using rasb::dvr::OrbitalSet;
using rasb::eom::Model;
using rasb::eom::WavefunctionState;
using rasb::fock::FockSpace;
using rasb::fock::Occupation;
using rasb::fock::Scheme;
using rasb::observables::breathing_frequency;
using rasb::observables::breathing_omega_analytic;
using rasb::observables::correlation_energies;
using rasb::observables::density_profile;
using rasb::observables::energy;
using rasb::observables::energy_from_parts;
using rasb::observables::natural_occupations;
using rasb::observables::ObservableRecord;
using rasb::observables::rho_at_origin;
using rasb::observables::sample;
using rasb::secondq::ExcitationTable;

namespace {

WavefunctionState random_full_state(const Grid& grid,
                                    const FockSpace& space, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  WavefunctionState state;
  state.c = Vector(space.dim());
  for (std::int64_t i = 0; i < space.dim(); ++i) {
    state.c[i] = Complex(u(rng), u(rng));
  }
  state.c /= state.c.norm();
  OrbitalSet set;
  set.values = Matrix(grid.n_points, space.orbitals());
  for (int j = 0; j < space.orbitals(); ++j) {
    for (int a = 0; a < grid.n_points; ++a) {
      set.values(a, j) = Complex(u(rng), u(rng));
    }
  }
  rasb::dvr::orthonormalize(set, grid);
  state.orbitals = set;
  return state;
}

WavefunctionState condensate(const Grid& grid, const FockSpace& space) {
  WavefunctionState state;
  state.c = Vector::Zero(space.dim());
  state.c[0] = 1.0;
  state.orbitals.values = rasb::dvr::harmonic_eigenbasis(
      grid, 1.0, space.orbitals());
  return state;
}

}  // namespace

TEST(Energy, NoninteractingCondensateCarriesHalfQuantumEach) {
  const Grid grid = build_grid(-8.0, 8.0, 101);
  const int n = 10;
  FockSpace space({n, 1, 0, Scheme::kFull, 0});
  ExcitationTable table(space);
  const Model model{grid, 1.0, {InteractionKind::kContact, 0.0}};
  const WavefunctionState state = condensate(grid, space);
  EXPECT_NEAR(energy(state, model, table), 5.0, 1e-8);
}

TEST(Energy, MatchesDenseReferenceExpectation) {
  const Grid grid = build_grid(-7.0, 7.0, 61);
  FockSpace space({4, 1, 2, Scheme::kFull, 0});
  ExcitationTable table(space);
  const Model model{grid, 1.0, {InteractionKind::kContact, 0.45}};
  const WavefunctionState state = random_full_state(grid, space, 11);

  const Matrix h =
      rasb::dvr::one_body_matrix(state.orbitals, grid, 1.0);
  const Tensor4 v = rasb::dvr::two_body_tensor(state.orbitals, grid,
                                               model.interaction);
  const auto op = rasb::oracle::dense_hamiltonian(h, v, 4, 3);
  const Complex expectation = state.c.dot(op.matrix * state.c);
  EXPECT_NEAR(energy(state, model, table), expectation.real(), 1e-10);
}

TEST(Energy, LargeImaginaryPartIsRejected) {
  Matrix h = Matrix::Zero(2, 2);
  h(0, 1) = Complex(0.0, 1.0);  // not Hermitian against the density below
  Tensor4 v(2);
  v.setZero();
  Matrix rho1 = Matrix::Identity(2, 2);
  rho1(0, 1) = Complex(1.0, 0.0);
  Tensor4 rho2(2);
  rho2.setZero();
  EXPECT_THROW(energy_from_parts(h, v, rho1, rho2), std::runtime_error);
}

TEST(DensityProfile, CondensateValueAndNormalization) {
  const Grid grid = build_grid(-8.0, 8.0, 101);
  const int n = 7;
  FockSpace space({n, 1, 0, Scheme::kFull, 0});
  ExcitationTable table(space);
  const WavefunctionState state = condensate(grid, space);
  const RealVector density = density_profile(state, grid, table);
  EXPECT_NEAR(grid.dx * density.sum(), static_cast<double>(n), 1e-8);
  // Peak value N |phi_0(0)|^2 = N / sqrt(pi) for the trap ground state.
  EXPECT_NEAR(rho_at_origin(density, grid), n / std::sqrt(M_PI), 1e-6);
}

TEST(DensityProfile, RandomStateIsNonnegativeAndNormalized) {
  const Grid grid = build_grid(-7.0, 7.0, 61);
  FockSpace space({5, 1, 2, Scheme::kGeneral, 2});
  ExcitationTable table(space);
  const WavefunctionState state = random_full_state(grid, space, 3);
  const RealVector density = density_profile(state, grid, table);
  EXPECT_NEAR(grid.dx * density.sum(), 5.0, 1e-10);
  EXPECT_GE(density.minCoeff(), -1e-12);
}

TEST(DensityProfile, OriginOffGridIsInterpolated) {
  // An even point count leaves no grid point at x = 0; the quadratic
  // interpolation must still recover a smooth profile's origin value.
  const Grid grid = build_grid(-8.0, 8.0, 100);
  EXPECT_GT(grid.points.cwiseAbs().minCoeff(), 1e-6);
  const int n = 4;
  FockSpace space({n, 1, 0, Scheme::kFull, 0});
  ExcitationTable table(space);
  const WavefunctionState state = condensate(grid, space);
  const RealVector density = density_profile(state, grid, table);
  // The nearest grid value alone is off by 1.4e-2 here; the quadratic
  // interpolation brings the origin value to about 4e-4.
  EXPECT_NEAR(rho_at_origin(density, grid), n / std::sqrt(M_PI), 1e-3);
}

TEST(NaturalOccupations, CondensedAndFragmentedStates) {
  const Grid grid = build_grid(-8.0, 8.0, 101);
  FockSpace space({8, 1, 1, Scheme::kFull, 0});
  ExcitationTable table(space);

  WavefunctionState state = condensate(grid, space);
  RealVector occ = natural_occupations(state, table);
  ASSERT_EQ(occ.size(), 2);
  EXPECT_NEAR(occ[0], 8.0, 1e-12);
  EXPECT_NEAR(occ[1], 0.0, 1e-12);

  // |N/2, N/2> is maximally fragmented: two equal eigenvalues.
  const std::optional<std::int64_t> position =
      space.position(Occupation{4, 4});
  ASSERT_TRUE(position.has_value());
  state.c.setZero();
  state.c[*position] = 1.0;
  occ = natural_occupations(state, table);
  EXPECT_NEAR(occ[0], 4.0, 1e-12);
  EXPECT_NEAR(occ[1], 4.0, 1e-12);
}

TEST(NaturalOccupations, SumToParticleNumberOnRandomStates) {
  const Grid grid = build_grid(-7.0, 7.0, 61);
  FockSpace space({6, 1, 2, Scheme::kEvenOnly, 4});
  ExcitationTable table(space);
  for (unsigned seed = 0; seed < 5; ++seed) {
    const WavefunctionState state = random_full_state(grid, space, seed);
    const RealVector occ = natural_occupations(state, table);
    EXPECT_NEAR(occ.sum(), 6.0, 1e-10);
    for (Eigen::Index k = 1; k < occ.size(); ++k) {
      EXPECT_LE(occ[k], occ[k - 1] + 1e-12);
    }
  }
}

TEST(CorrelationEnergies, MeanFieldRecoversNothing) {
  const auto result = correlation_energies(193.55, 193.55, 192.21);
  EXPECT_DOUBLE_EQ(result.e_corr, 0.0);
  ASSERT_TRUE(result.fraction.has_value());
  EXPECT_DOUBLE_EQ(*result.fraction, 0.0);
}

TEST(CorrelationEnergies, FractionAgainstReference) {
  // Half the reference correlation recovered.
  const auto result = correlation_energies(9.5, 10.0, 9.0);
  EXPECT_NEAR(result.e_corr, 0.5, 1e-15);
  ASSERT_TRUE(result.fraction.has_value());
  EXPECT_NEAR(*result.fraction, 0.5, 1e-15);
}

TEST(CorrelationEnergies, DegenerateReferenceGivesNoFraction) {
  const auto result = correlation_energies(9.5, 10.0, 10.0);
  EXPECT_FALSE(result.fraction.has_value());
}

TEST(BreathingFrequency, RecoversSyntheticOscillation) {
  const double omega = 2.0 * std::sqrt(3.0);
  std::vector<double> t;
  std::vector<double> rho0;
  const double dt = 0.05;
  for (int k = 0; k * dt <= 15.0; ++k) {
    t.push_back(k * dt);
    rho0.push_back(3.0 + 0.2 * std::cos(omega * k * dt + 0.3));
  }
  const auto extracted = breathing_frequency(t, rho0);
  ASSERT_TRUE(extracted.has_value());
  EXPECT_NEAR(*extracted, omega, 5e-3);
}

TEST(BreathingFrequency, ConstantSeriesHasNoFrequency) {
  std::vector<double> t;
  std::vector<double> rho0;
  for (int k = 0; k < 200; ++k) {
    t.push_back(0.05 * k);
    rho0.push_back(2.5);
  }
  EXPECT_FALSE(breathing_frequency(t, rho0).has_value());
}

TEST(BreathingFrequency, TwoModeSeriesPicksTheDominantOne) {
  std::vector<double> t;
  std::vector<double> rho0;
  const double strong = 3.1;
  const double weak = 6.9;
  for (int k = 0; k * 0.05 <= 20.0; ++k) {
    const double time = 0.05 * k;
    t.push_back(time);
    rho0.push_back(1.0 + 0.3 * std::cos(strong * time) +
                   0.05 * std::cos(weak * time));
  }
  const auto extracted = breathing_frequency(t, rho0);
  ASSERT_TRUE(extracted.has_value());
  EXPECT_NEAR(*extracted, strong, 1e-2);
}

TEST(BreathingFrequency, AnalyticValuesForContactQuenches) {
  EXPECT_NEAR(breathing_omega_analytic(1, 1.0, 10, 0.1),
              2.0 * std::sqrt(3.0), 1e-12);
  EXPECT_NEAR(breathing_omega_analytic(1, 1.0, 10, 0.5),
              2.0 * std::sqrt(11.0), 1e-12);
  EXPECT_NEAR(breathing_omega_analytic(1, 1.0, 10, 0.0), 2.0, 1e-12);
  EXPECT_NEAR(breathing_omega_analytic(2, 1.0, 10, 0.1),
              4.0 * std::sqrt(3.0), 1e-12);
}

TEST(Sample, RecordFieldsAreConsistent) {
  const Grid grid = build_grid(-8.0, 8.0, 101);
  FockSpace space({5, 1, 1, Scheme::kFull, 0});
  ExcitationTable table(space);
  const Model model{grid, 1.0, {InteractionKind::kContact, 0.2}};
  WavefunctionState state = random_full_state(grid, space, 21);
  state.time = 1.25;
  const ObservableRecord record = sample(state, model, table);
  EXPECT_DOUBLE_EQ(record.t, 1.25);
  EXPECT_NEAR(record.norm, 1.0, 1e-12);
  EXPECT_NEAR(record.energy, energy(state, model, table), 1e-12);
  EXPECT_NEAR(record.natural_occupations.sum(), 5.0, 1e-10);
  const RealVector density = density_profile(state, grid, table);
  EXPECT_NEAR(record.rho0, rho_at_origin(density, grid), 1e-12);
}
