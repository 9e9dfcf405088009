#include "rasb/dvr.hpp"

#include <cmath>
#include <stdexcept>

namespace rasb::dvr {

namespace {

constexpr double kPi = 3.14159265358979323846;

void complexify_apply(const RealMatrix& op, const Matrix& in, Matrix* out) {
  // Applies a real operator to a complex matrix via two real products.
  const RealMatrix re = op * in.real();
  const RealMatrix im = op * in.imag();
  out->resize(in.rows(), in.cols());
  out->real() = re;
  out->imag() = im;
}

void check_orbitals(const OrbitalSet& orbitals, const Grid& grid,
                    const char* where) {
  if (orbitals.values.rows() != grid.n_points) {
    throw std::invalid_argument(std::string(where) +
                                ": orbital grid size mismatch");
  }
  if (orbitals.count() < 1) {
    throw std::invalid_argument(std::string(where) + ": no orbitals");
  }
}

}  // namespace

Grid build_grid(double x_min, double x_max, int n_points) {
  if (!(x_max > x_min)) {
    throw std::invalid_argument("build_grid: x_max must exceed x_min");
  }
  if (n_points < 2) {
    throw std::invalid_argument("build_grid: need at least two grid points");
  }
  Grid grid;
  grid.x_min = x_min;
  grid.x_max = x_max;
  grid.n_points = n_points;
  const double length = x_max - x_min;
  grid.dx = length / (n_points + 1);
  grid.points.resize(n_points);
  for (int a = 0; a < n_points; ++a) {
    grid.points[a] = x_min + (a + 1) * grid.dx;
  }

  // Closed-form second derivative of the sine basis, evaluated on the
  // interior points (1-based i, j in the formula below).
  const int ng = n_points + 1;
  const double pref = kPi * kPi / (2.0 * length * length);
  grid.second_derivative.resize(n_points, n_points);
  for (int i = 1; i <= n_points; ++i) {
    for (int j = 1; j <= i; ++j) {
      double value = 0.0;
      if (i == j) {
        const double s = std::sin(kPi * i / ng);
        value = -pref * ((2.0 * ng * ng + 1.0) / 3.0 - 1.0 / (s * s));
      } else {
        const double sm = std::sin(kPi * (i - j) / (2.0 * ng));
        const double sp = std::sin(kPi * (i + j) / (2.0 * ng));
        const double sign = ((i - j) % 2 == 0) ? 1.0 : -1.0;
        value = -pref * sign * (1.0 / (sm * sm) - 1.0 / (sp * sp));
      }
      grid.second_derivative(i - 1, j - 1) = value;
      grid.second_derivative(j - 1, i - 1) = value;
    }
  }
  return grid;
}

Matrix apply_one_body(const Grid& grid, double omega_x,
                      const Matrix& orbitals) {
  if (orbitals.rows() != grid.n_points) {
    throw std::invalid_argument("apply_one_body: grid size mismatch");
  }
  Matrix kinetic;
  complexify_apply(grid.second_derivative, orbitals, &kinetic);
  Matrix out = -0.5 * kinetic;
  for (int c = 0; c < orbitals.cols(); ++c) {
    out.col(c).array() +=
        (0.5 * omega_x * omega_x * grid.points.array().square()) *
        orbitals.col(c).array();
  }
  return out;
}

Matrix one_body_matrix(const OrbitalSet& orbitals, const Grid& grid,
                       double omega_x) {
  check_orbitals(orbitals, grid, "one_body_matrix");
  const Matrix h_phi = apply_one_body(grid, omega_x, orbitals.values);
  return grid.dx * (orbitals.values.adjoint() * h_phi);
}

Tensor4 two_body_tensor(const OrbitalSet& orbitals, const Grid& grid,
                        const Interaction& interaction) {
  check_orbitals(orbitals, grid, "two_body_tensor");
  const int m = orbitals.count();
  const Matrix& phi = orbitals.values;
  Tensor4 v(m);
  if (interaction.lambda == 0.0) {
    return v;
  }

  if (interaction.kind == InteractionKind::kContact) {
    // v(p, r, q, s) = lambda * dx * sum_alpha conj(phi_p phi_r) phi_q phi_s.
    // Assemble from pair products so each entry is one quadrature dot.
    Matrix pair(grid.n_points, m * m);  // column q*m+s: phi_q .* phi_s
    for (int q = 0; q < m; ++q) {
      for (int s = 0; s < m; ++s) {
        pair.col(q * m + s) = phi.col(q).cwiseProduct(phi.col(s));
      }
    }
    const Matrix gram =
        interaction.lambda * grid.dx * (pair.adjoint() * pair);
    for (int p = 0; p < m; ++p) {
      for (int r = 0; r < m; ++r) {
        for (int q = 0; q < m; ++q) {
          for (int s = 0; s < m; ++s) {
            v(p, r, q, s) = gram(p * m + r, q * m + s);
          }
        }
      }
    }
    return v;
  }

  // Harmonic pair interaction: (x - x')^2 = x^2 - 2 x x' + x'^2 separates
  // into one-body moments.
  const RealVector& x = grid.points;
  Matrix moment1(m, m);
  Matrix moment2(m, m);
  for (int p = 0; p < m; ++p) {
    for (int q = 0; q < m; ++q) {
      moment1(p, q) = grid.dx * (phi.col(p).conjugate().array() *
                                 x.array().cast<Complex>() *
                                 phi.col(q).array())
                                    .sum();
      moment2(p, q) = grid.dx * (phi.col(p).conjugate().array() *
                                 x.array().square().cast<Complex>() *
                                 phi.col(q).array())
                                    .sum();
    }
  }
  Matrix overlap = grid.dx * (phi.adjoint() * phi);
  for (int p = 0; p < m; ++p) {
    for (int r = 0; r < m; ++r) {
      for (int q = 0; q < m; ++q) {
        for (int s = 0; s < m; ++s) {
          v(p, r, q, s) = interaction.lambda *
                          (moment2(p, q) * overlap(r, s) -
                           2.0 * moment1(p, q) * moment1(r, s) +
                           overlap(p, q) * moment2(r, s));
        }
      }
    }
  }
  return v;
}

Matrix mean_field_operators(const OrbitalSet& orbitals, const Grid& grid,
                            const Interaction& interaction) {
  check_orbitals(orbitals, grid, "mean_field_operators");
  const int m = orbitals.count();
  const Matrix& phi = orbitals.values;
  Matrix w(grid.n_points, m * m);

  if (interaction.kind == InteractionKind::kContact) {
    for (int k = 0; k < m; ++k) {
      for (int l = 0; l < m; ++l) {
        w.col(k * m + l) = interaction.lambda *
                           phi.col(k).conjugate().cwiseProduct(phi.col(l));
      }
    }
    return w;
  }

  const RealVector& x = grid.points;
  for (int k = 0; k < m; ++k) {
    for (int l = 0; l < m; ++l) {
      const Complex overlap =
          grid.dx * phi.col(k).dot(phi.col(l));  // conjugates the left side
      const Complex m1 = grid.dx * (phi.col(k).conjugate().array() *
                                    x.array().cast<Complex>() *
                                    phi.col(l).array())
                                       .sum();
      const Complex m2 = grid.dx * (phi.col(k).conjugate().array() *
                                    x.array().square().cast<Complex>() *
                                    phi.col(l).array())
                                       .sum();
      w.col(k * m + l) =
          interaction.lambda *
          (overlap * x.array().square().cast<Complex>() -
           2.0 * m1 * x.array().cast<Complex>() + m2)
              .matrix();
    }
  }
  return w;
}

void orthonormalize(OrbitalSet& orbitals, const Grid& grid) {
  check_orbitals(orbitals, grid, "orthonormalize");
  Matrix& phi = orbitals.values;
  const int m = orbitals.count();
  for (int i = 0; i < m; ++i) {
    const double before = std::sqrt(grid.dx) * phi.col(i).norm();
    for (int j = 0; j < i; ++j) {
      const Complex overlap = grid.dx * phi.col(j).dot(phi.col(i));
      phi.col(i) -= overlap * phi.col(j);
    }
    const double after = std::sqrt(grid.dx) * phi.col(i).norm();
    if (after <= 1e-12 * std::max(before, 1.0)) {
      throw DegenerateBasisError(
          "orthonormalize: orbitals are numerically linearly dependent");
    }
    phi.col(i) /= after;
  }
}

Matrix harmonic_eigenbasis(const Grid& grid, double omega_x, int count) {
  if (count < 1 || count > grid.n_points) {
    throw std::invalid_argument(
        "harmonic_eigenbasis: orbital count out of range");
  }
  RealMatrix h = -0.5 * grid.second_derivative;
  for (int a = 0; a < grid.n_points; ++a) {
    h(a, a) += 0.5 * omega_x * omega_x * grid.points[a] * grid.points[a];
  }
  Eigen::SelfAdjointEigenSolver<RealMatrix> solver(h);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("harmonic_eigenbasis: eigensolver failed");
  }
  Matrix basis(grid.n_points, count);
  const double scale = 1.0 / std::sqrt(grid.dx);
  for (int c = 0; c < count; ++c) {
    RealVector column = solver.eigenvectors().col(c);
    int peak = 0;
    column.cwiseAbs().maxCoeff(&peak);
    if (column[peak] < 0.0) column = -column;
    basis.col(c) = (scale * column).cast<Complex>();
  }
  return basis;
}

}  // namespace rasb::dvr
