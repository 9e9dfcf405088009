#include "rasb/eom.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace rasb::eom {

namespace {

struct LinearSolveOutcome {
  Vector x;
  bool regularized = false;
  double condition = 0.0;
  double residual = 0.0;
};

// Direct solve with a singularity policy: a system whose largest singular
// value sits at or below numerical noise does not constrain the solution
// and returns zero, an ill-conditioned one is Tikhonov-shifted, and both
// cases are flagged for the run log. The noise floor matters for the
// Gram-type coupling matrices, which are quadratic in projected amplitudes
// while their right-hand sides are linear in them: dividing noise by
// squared noise would otherwise produce astronomically large rotations.
LinearSolveOutcome solve_with_policy(const Matrix& a, const Vector& b) {
  // Damped least squares: every singular value enters the pseudoinverse
  // as sigma / (sigma^2 + eps^2).  Healthy directions (sigma well above
  // eps) are solved exactly; directions that carry no signal fade to zero
  // continuously as sigma drops.  The damping must be smooth and use an
  // absolute scale: the Gram-type coupling matrices are quadratic in the
  // projected amplitudes while their right-hand sides are linear, so the
  // naive solution diverges like 1/amplitude as a boundary shell empties,
  // and a hard cutoff would make the orbital equations discontinuous in
  // the state, stalling the adaptive integrator whenever a trajectory
  // crosses it.  This mirrors the smooth floor used for the one-body
  // density inverse.
  constexpr double kEps = 1e-8;
  // Report runs where the damping moved the solution by more than about
  // one part in 1e6.
  constexpr double kFlagThreshold = 1e3 * kEps;
  LinearSolveOutcome out;
  Eigen::JacobiSVD<Matrix> svd(a,
                               Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& sigma = svd.singularValues();
  const double sigma_max = sigma.size() > 0 ? sigma(0) : 0.0;
  const double sigma_min =
      sigma.size() > 0 ? sigma(sigma.size() - 1) : 0.0;
  Vector damped =
      svd.matrixU().leftCols(sigma.size()).adjoint() * b;
  for (Eigen::Index k = 0; k < sigma.size(); ++k) {
    damped[k] *= sigma[k] / (sigma[k] * sigma[k] + kEps * kEps);
  }
  out.x = svd.matrixV().leftCols(sigma.size()) * damped;
  out.regularized = sigma_min < kFlagThreshold;
  out.condition = sigma_min > 0.0
                      ? sigma_max / sigma_min
                      : std::numeric_limits<double>::infinity();
  const double scale =
      std::max({b.norm(), sigma_max * out.x.norm(), 1e-300});
  out.residual = (a * out.x - b).norm() / scale;
  return out;
}

void check_square(const Matrix& m, int extent, const char* name) {
  if (m.rows() != extent || m.cols() != extent) {
    throw std::invalid_argument(std::string(name) +
                                " has the wrong extent");
  }
}

Matrix zero_eta(int m) { return Matrix::Zero(m, m); }

// Shared Q-space assembly once the densities are known.
Matrix qspace_from_densities(const dvr::OrbitalSet& orbitals,
                             const Matrix& rho1, const Tensor4& rho2,
                             const Model& model, double epsilon_rho) {
  const int m = orbitals.count();
  const auto& grid = model.grid;
  if (orbitals.values.rows() != grid.n_points) {
    throw std::invalid_argument("orbitals do not match the grid");
  }
  const Matrix rho1_inv = regularized_inverse(rho1, epsilon_rho);
  Matrix total = dvr::apply_one_body(grid, model.omega_x, orbitals.values);
  const Matrix w =
      dvr::mean_field_operators(orbitals, grid, model.interaction);
  Vector coef(m * m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      for (int k = 0; k < m; ++k) {
        for (int l = 0; l < m; ++l) {
          Complex acc(0.0, 0.0);
          for (int p = 0; p < m; ++p) {
            acc += rho1_inv(i, p) * rho2(p, k, j, l);
          }
          coef[static_cast<std::int64_t>(k) * m + l] = acc;
        }
      }
      const Vector field = w * coef;
      total.col(i) += field.cwiseProduct(orbitals.values.col(j));
    }
  }
  // Project out the occupied span. The projector is rebuilt from a
  // re-orthonormalized copy when the overlaps have drifted, so that it
  // stays idempotent.
  const Matrix overlap =
      grid.dx * (orbitals.values.adjoint() * orbitals.values);
  const double drift =
      (overlap - Matrix::Identity(m, m)).cwiseAbs().maxCoeff();
  const dvr::OrbitalSet* basis = &orbitals;
  dvr::OrbitalSet reorthonormalized;
  if (drift > 1e-10) {
    reorthonormalized = orbitals;
    dvr::orthonormalize(reorthonormalized, grid);
    basis = &reorthonormalized;
  }
  total -= basis->values *
           (grid.dx * (basis->values.adjoint() * total)).eval();
  return Complex(0.0, -1.0) * total;
}

}  // namespace

Matrix regularized_inverse(const Matrix& rho1, double epsilon) {
  if (epsilon <= 0.0) {
    throw std::invalid_argument("regularization scale must be positive");
  }
  const Matrix hermitian = 0.5 * (rho1 + rho1.adjoint().eval());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitian);
  const RealVector& mu = solver.eigenvalues();
  RealVector inverted(mu.size());
  for (Eigen::Index k = 0; k < mu.size(); ++k) {
    const double arg = std::min(-mu[k] / epsilon, 700.0);
    const double floored = mu[k] + epsilon * std::exp(arg);
    inverted[k] = 1.0 / floored;
  }
  return solver.eigenvectors() * inverted.asDiagonal() *
         solver.eigenvectors().adjoint();
}

EtaMatrix solve_eta_even(const Matrix& h, const Tensor4& v,
                         const Matrix& rho1, const Tensor4& rho2,
                         const fock::RasSpec& spec) {
  if (spec.scheme != fock::Scheme::kEvenOnly) {
    throw std::invalid_argument(
        "even-shell rotation solve requires an even-shell scheme");
  }
  const int m = spec.orbitals();
  const int m1 = spec.m1;
  const int m2 = spec.m2;
  check_square(h, m, "one-body matrix");
  check_square(rho1, m, "one-body density");
  EtaMatrix result;
  result.eta = zero_eta(m);
  if (m2 == 0) return result;

  const Matrix a = secondq::build_A_tensor(rho1, spec);
  Vector b(static_cast<std::int64_t>(m1) * m2);
  for (int i1 = 0; i1 < m1; ++i1) {
    for (int j2 = m1; j2 < m; ++j2) {
      Complex acc(0.0, 0.0);
      for (int k = 0; k < m; ++k) {
        for (int l = 0; l < m; ++l) {
          for (int p = 0; p < m; ++p) {
            acc += v(j2, p, k, l) * rho2(i1, p, k, l) -
                   v(k, l, i1, p) * rho2(k, l, j2, p);
          }
        }
      }
      b[static_cast<std::int64_t>(i1) * m2 + (j2 - m1)] = -acc;
    }
  }

  LinearSolveOutcome solve = solve_with_policy(a, b);
  for (int l1 = 0; l1 < m1; ++l1) {
    for (int k2 = m1; k2 < m; ++k2) {
      const Complex x =
          solve.x[static_cast<std::int64_t>(l1) * m2 + (k2 - m1)];
      result.eta(k2, l1) = kImaginaryUnit * (x - h(k2, l1));
      result.eta(l1, k2) = -std::conj(result.eta(k2, l1));
    }
  }
  result.regularized = solve.regularized;
  result.condition = solve.condition;
  result.residual = solve.residual;
  return result;
}

EtaMatrix solve_eta_general(const Matrix& h, const Tensor4& v,
                            const Vector& c,
                            const secondq::ExcitationTable& table) {
  const fock::FockSpace& space = table.space();
  const fock::RasSpec& spec = space.ras();
  if (spec.scheme == fock::Scheme::kEvenOnly) {
    throw std::invalid_argument(
        "boundary-tensor rotation solve requires a contiguous-shell "
        "scheme");
  }
  const int m = spec.orbitals();
  const int m1 = spec.m1;
  const int m2 = spec.m2;
  check_square(h, m, "one-body matrix");
  EtaMatrix result;
  result.eta = zero_eta(m);
  const bool unconstrained = spec.scheme == fock::Scheme::kFull ||
                             spec.n_max >= spec.n_particles || m2 == 0;
  if (unconstrained) return result;

  const Matrix images = table.images(c);
  const Matrix zeta4 = secondq::build_zeta4(c, table, images);
  const secondq::Zeta6 zeta6 = secondq::build_zeta6(c, table, images);
  Vector rhs(static_cast<std::int64_t>(m1) * m2);
  for (int i1 = 0; i1 < m1; ++i1) {
    for (int j2 = m1; j2 < m; ++j2) {
      Complex acc(0.0, 0.0);
      for (int k = 0; k < m; ++k) {
        for (int p = 0; p < m; ++p) {
          for (int l = 0; l < m; ++l) {
            for (int n = 0; n < m; ++n) {
              acc += v(k, p, l, n) * zeta6.at(k, p, i1, l, n, j2);
            }
          }
        }
      }
      rhs[static_cast<std::int64_t>(i1) * m2 + (j2 - m1)] = 0.5 * acc;
    }
  }

  LinearSolveOutcome solve = solve_with_policy(zeta4, rhs);
  for (int l1 = 0; l1 < m1; ++l1) {
    for (int k2 = m1; k2 < m; ++k2) {
      const Complex x =
          solve.x[static_cast<std::int64_t>(l1) * m2 + (k2 - m1)];
      result.eta(k2, l1) = -kImaginaryUnit * (x + h(k2, l1));
      result.eta(l1, k2) = -std::conj(result.eta(k2, l1));
    }
  }
  result.regularized = solve.regularized;
  result.condition = solve.condition;
  result.residual = solve.residual;
  return result;
}

Vector amplitude_rhs(const Vector& c, const Matrix& h, const Tensor4& v,
                     const Matrix& eta,
                     const secondq::ExcitationTable& table) {
  return amplitude_rhs(c, h, v, eta, table, table.images(c));
}

Vector amplitude_rhs(const Vector& c, const Matrix& h, const Tensor4& v,
                     const Matrix& eta,
                     const secondq::ExcitationTable& table,
                     const Matrix& images) {
  const fock::FockSpace& space = table.space();
  const int m = table.orbitals();
  const std::int64_t dim = space.dim();
  if (c.size() != dim) {
    throw std::invalid_argument("amplitude vector has the wrong length");
  }
  check_square(h, m, "one-body matrix");
  check_square(eta, m, "orbital rotation matrix");

  const Matrix h_eff = h - kImaginaryUnit * eta;
  Vector rhs = Vector::Zero(dim);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      rhs += h_eff(i, j) *
             images.col(static_cast<std::int64_t>(i) * m + j).head(dim);
    }
  }

  // Two-body part through products of one-body excitations: the pair
  // operator equals E_ij E_kl minus the delta contraction, so each image
  // column is re-excited once after contraction with the interaction.
  Matrix vmat(m * m, m * m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      for (int k = 0; k < m; ++k) {
        for (int l = 0; l < m; ++l) {
          vmat(static_cast<std::int64_t>(k) * m + l,
               static_cast<std::int64_t>(i) * m + j) = v(i, k, j, l);
        }
      }
    }
  }
  const Matrix contracted = images * vmat;
  Vector scratch(space.dim_extended());
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      table.apply(i, j, contracted.col(static_cast<std::int64_t>(i) * m + j),
                  scratch);
      rhs += 0.5 * scratch.head(dim);
    }
  }
  for (int i = 0; i < m; ++i) {
    for (int l = 0; l < m; ++l) {
      Complex delta_term(0.0, 0.0);
      for (int k = 0; k < m; ++k) delta_term += v(i, k, k, l);
      rhs -= 0.5 * delta_term *
             images.col(static_cast<std::int64_t>(i) * m + l).head(dim);
    }
  }
  return Complex(0.0, -1.0) * rhs;
}

Matrix qspace_rhs(const dvr::OrbitalSet& orbitals, const Vector& c,
                  const Model& model, const secondq::ExcitationTable& table,
                  double epsilon_rho) {
  const Matrix images = table.images(c);
  const Matrix rho1 = secondq::build_rho1(c, table, images);
  const Tensor4 rho2 = secondq::build_rho2(c, table, images);
  return qspace_from_densities(orbitals, rho1, rho2, model, epsilon_rho);
}

StateDerivative state_derivative(const WavefunctionState& state,
                                 const Model& model,
                                 const secondq::ExcitationTable& table,
                                 const DerivativeOptions& options) {
  const fock::FockSpace& space = table.space();
  const fock::RasSpec& spec = space.ras();
  const int m = spec.orbitals();
  if (state.orbitals.count() != m) {
    throw std::invalid_argument(
        "state orbital count does not match the active space");
  }

  const Matrix h =
      dvr::one_body_matrix(state.orbitals, model.grid, model.omega_x);
  const Tensor4 v =
      dvr::two_body_tensor(state.orbitals, model.grid, model.interaction);
  const Matrix images = table.images(state.c);
  const Matrix rho1 = secondq::build_rho1(state.c, table, images);
  const Tensor4 rho2 = secondq::build_rho2(state.c, table, images);

  EtaMatrix eta;
  eta.eta = zero_eta(m);
  if (spec.m2 > 0) {
    switch (spec.scheme) {
      case fock::Scheme::kFull:
        break;  // every rotation is gauge, fixed to zero
      case fock::Scheme::kGeneral:
        if (spec.n_max < spec.n_particles) {
          eta = solve_eta_general(h, v, state.c, table);
        }
        break;
      case fock::Scheme::kEvenOnly:
        eta = solve_eta_even(h, v, rho1, rho2, spec);
        break;
    }
  }

  StateDerivative derivative;
  derivative.c_dot = amplitude_rhs(state.c, h, v, eta.eta, table, images);
  derivative.orbital_dot =
      state.orbitals.values * eta.eta +
      qspace_from_densities(state.orbitals, rho1, rho2, model,
                            options.epsilon_rho);
  if (options.mode == TimeMode::kImaginary) {
    derivative.c_dot *= Complex(0.0, -1.0);
    derivative.orbital_dot *= Complex(0.0, -1.0);
  }
  derivative.eta = std::move(eta);
  return derivative;
}

}  // namespace rasb::eom
