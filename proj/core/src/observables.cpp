#include "rasb/observables.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "rasb/dvr.hpp"

namespace rasb::observables {

namespace {

constexpr double kImaginaryEnergyLimit = 1e-8;

struct Integrals {
  Matrix h;
  Tensor4 v;
};

Integrals assemble_integrals(const eom::WavefunctionState& state,
                             const eom::Model& model) {
  return {dvr::one_body_matrix(state.orbitals, model.grid, model.omega_x),
          dvr::two_body_tensor(state.orbitals, model.grid,
                               model.interaction)};
}

RealVector density_from_rho1(const Matrix& rho1, const Matrix& orbitals) {
  const Eigen::Index n = orbitals.rows();
  const int m = static_cast<int>(orbitals.cols());
  RealVector density = RealVector::Zero(n);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      const Vector product =
          orbitals.col(i).conjugate().cwiseProduct(orbitals.col(j));
      density += (rho1(i, j) * product).real();
    }
  }
  return density;
}

RealVector occupations_from_rho1(const Matrix& rho1, int n_particles) {
  const Matrix hermitian = 0.5 * (rho1 + rho1.adjoint().eval());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitian);
  RealVector values = solver.eigenvalues();
  std::reverse(values.begin(), values.end());
  for (Eigen::Index k = 0; k < values.size(); ++k) {
    values[k] = std::clamp(values[k], 0.0,
                           static_cast<double>(n_particles));
  }
  return values;
}

}  // namespace

double energy_from_parts(const Matrix& h, const Tensor4& v,
                         const Matrix& rho1, const Tensor4& rho2) {
  const int m = static_cast<int>(h.rows());
  if (h.cols() != m || rho1.rows() != m || rho1.cols() != m ||
      v.extent() != m || rho2.extent() != m) {
    throw std::invalid_argument("energy inputs have mismatched extents");
  }
  Complex value(0.0, 0.0);
  for (int p = 0; p < m; ++p) {
    for (int q = 0; q < m; ++q) {
      value += h(p, q) * rho1(p, q);
    }
  }
  for (int p = 0; p < m; ++p) {
    for (int r = 0; r < m; ++r) {
      for (int q = 0; q < m; ++q) {
        for (int s = 0; s < m; ++s) {
          value += 0.5 * v(p, r, q, s) * rho2(p, r, q, s);
        }
      }
    }
  }
  if (std::abs(value.imag()) > kImaginaryEnergyLimit) {
    throw std::runtime_error(
        "energy has a non-negligible imaginary part; state and "
        "Hamiltonian are inconsistent");
  }
  return value.real();
}

double energy(const eom::WavefunctionState& state, const eom::Model& model,
              const secondq::ExcitationTable& table) {
  const Integrals integrals = assemble_integrals(state, model);
  const Matrix images = table.images(state.c);
  const Matrix rho1 = secondq::build_rho1(state.c, table, images);
  const Tensor4 rho2 = secondq::build_rho2(state.c, table, images);
  return energy_from_parts(integrals.h, integrals.v, rho1, rho2);
}

RealVector density_profile(const eom::WavefunctionState& state,
                           const dvr::Grid& grid,
                           const secondq::ExcitationTable& table) {
  if (state.orbitals.values.rows() != grid.n_points) {
    throw std::invalid_argument("orbitals do not match the grid");
  }
  const Matrix rho1 = secondq::build_rho1(state.c, table);
  return density_from_rho1(rho1, state.orbitals.values);
}

double rho_at_origin(const RealVector& density, const dvr::Grid& grid) {
  if (density.size() != grid.n_points) {
    throw std::invalid_argument("density does not match the grid");
  }
  Eigen::Index nearest = 0;
  grid.points.cwiseAbs().minCoeff(&nearest);
  if (std::abs(grid.points[nearest]) < 1e-12) return density[nearest];
  // Quadratic interpolation through the three points nearest the origin.
  const Eigen::Index mid =
      std::clamp<Eigen::Index>(nearest, 1, grid.n_points - 2);
  const double x0 = grid.points[mid - 1];
  const double x1 = grid.points[mid];
  const double x2 = grid.points[mid + 1];
  const double y0 = density[mid - 1];
  const double y1 = density[mid];
  const double y2 = density[mid + 1];
  const double l0 = (0.0 - x1) * (0.0 - x2) / ((x0 - x1) * (x0 - x2));
  const double l1 = (0.0 - x0) * (0.0 - x2) / ((x1 - x0) * (x1 - x2));
  const double l2 = (0.0 - x0) * (0.0 - x1) / ((x2 - x0) * (x2 - x1));
  return y0 * l0 + y1 * l1 + y2 * l2;
}

RealVector natural_occupations(const eom::WavefunctionState& state,
                               const secondq::ExcitationTable& table) {
  const Matrix rho1 = secondq::build_rho1(state.c, table);
  return occupations_from_rho1(rho1, table.space().particles());
}

CorrelationEnergies correlation_energies(double e_method, double e_gp,
                                         double e_ref) {
  CorrelationEnergies out;
  out.e_corr = e_gp - e_method;
  const double denominator = e_gp - e_ref;
  if (denominator != 0.0) out.fraction = out.e_corr / denominator;
  return out;
}

std::optional<double> breathing_frequency(const std::vector<double>& t,
                                          const std::vector<double>& rho0) {
  if (t.size() != rho0.size()) {
    throw std::invalid_argument("time and density series differ in length");
  }
  const std::size_t n = t.size();
  if (n < 8) return std::nullopt;
  const double span = t.back() - t.front();
  if (!(span > 0.0)) return std::nullopt;

  const double mean =
      std::accumulate(rho0.begin(), rho0.end(), 0.0) / n;
  std::vector<double> centered(n);
  double variance = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    centered[k] = rho0[k] - mean;
    variance += centered[k] * centered[k];
  }
  variance /= n;
  if (variance < 1e-12) return std::nullopt;

  // Hann window against spectral leakage of the finite record.
  for (std::size_t k = 0; k < n; ++k) {
    const double phase = 2.0 * M_PI * k / static_cast<double>(n - 1);
    centered[k] *= 0.5 * (1.0 - std::cos(phase));
  }

  const double dt = span / static_cast<double>(n - 1);
  const double omega_min = 2.0 * M_PI / span;
  const double omega_max = M_PI / dt;
  const double step = omega_min / 200.0;
  const auto power = [&](double omega) {
    Complex acc(0.0, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
      acc += centered[k] * std::exp(Complex(0.0, -omega * t[k]));
    }
    return std::norm(acc);
  };

  double best_omega = omega_min;
  double best_power = -1.0;
  for (double omega = omega_min; omega <= omega_max; omega += step) {
    const double p = power(omega);
    if (p > best_power) {
      best_power = p;
      best_omega = omega;
    }
  }
  // Parabolic refinement around the scan maximum.
  const double pm = power(best_omega - step);
  const double pp = power(best_omega + step);
  const double curvature = pm - 2.0 * best_power + pp;
  if (curvature < 0.0) {
    best_omega += 0.5 * step * (pm - pp) / curvature;
  }
  return best_omega;
}

double breathing_omega_analytic(int n, double omega_x, int n_particles,
                                double lambda) {
  return 2.0 * n *
         std::sqrt(omega_x * omega_x + 2.0 * n_particles * lambda);
}

ObservableRecord sample(const eom::WavefunctionState& state,
                        const eom::Model& model,
                        const secondq::ExcitationTable& table) {
  const Integrals integrals = assemble_integrals(state, model);
  const Matrix images = table.images(state.c);
  const Matrix rho1 = secondq::build_rho1(state.c, table, images);
  const Tensor4 rho2 = secondq::build_rho2(state.c, table, images);
  ObservableRecord record;
  record.t = state.time;
  record.energy = energy_from_parts(integrals.h, integrals.v, rho1, rho2);
  record.norm = state.c.norm();
  record.rho0 = rho_at_origin(
      density_from_rho1(rho1, state.orbitals.values), model.grid);
  record.natural_occupations =
      occupations_from_rho1(rho1, table.space().particles());
  return record;
}

}  // namespace rasb::observables
