#include "rasb/secondq.hpp"

#include <cmath>
#include <stdexcept>

namespace rasb::secondq {

namespace {

void check_orbital_index(int i, int m, const char* where) {
  if (i < 0 || i >= m) {
    throw std::invalid_argument(std::string(where) +
                                ": orbital index out of range");
  }
}

// Shared validation for the boundary tensors: only general schemes have a
// single shell just outside the variational space.
void check_general_scheme(const fock::FockSpace& space, const char* where) {
  const fock::RasSpec& spec = space.ras();
  if (spec.scheme == fock::Scheme::kEvenOnly) {
    throw std::invalid_argument(
        std::string(where) +
        ": even schemes have no single boundary shell");
  }
}

}  // namespace

ExcitationTable::ExcitationTable(const fock::FockSpace& space)
    : space_(&space),
      m_(space.orbitals()),
      dim_ext_(space.dim_extended()),
      source_(static_cast<std::size_t>(m_) * m_),
      factor_(static_cast<std::size_t>(m_) * m_) {
  for (auto& v : source_) v.assign(static_cast<std::size_t>(dim_ext_), -1);
  for (auto& v : factor_) v.assign(static_cast<std::size_t>(dim_ext_), 0.0);

  fock::Occupation source_occ;
  for (std::int64_t t = 0; t < dim_ext_; ++t) {
    const fock::Occupation occ = space.occupation_at(t);
    for (int i = 0; i < m_; ++i) {
      if (occ[i] == 0) continue;  // target must hold a particle in i
      for (int j = 0; j < m_; ++j) {
        const std::size_t pair = static_cast<std::size_t>(i) * m_ + j;
        if (i == j) {
          source_[pair][t] = t;
          factor_[pair][t] = static_cast<double>(occ[i]);
          continue;
        }
        source_occ = occ;
        source_occ[i] -= 1;
        source_occ[j] += 1;
        const auto src = space.extended_position(source_occ);
        if (!src.has_value()) continue;
        source_[pair][t] = *src;
        factor_[pair][t] =
            std::sqrt(static_cast<double>(occ[i])) *
            std::sqrt(static_cast<double>(occ[j]) + 1.0);
      }
    }
  }
}

Vector ExcitationTable::pad(const Vector& c) const {
  if (c.size() == dim_ext_) return c;
  if (c.size() != space_->dim()) {
    throw std::invalid_argument(
        "ExcitationTable: coefficient vector has wrong length");
  }
  Vector out = Vector::Zero(dim_ext_);
  out.head(space_->dim()) = c;
  return out;
}

void ExcitationTable::apply(int i, int j, const Vector& in,
                            Vector& out) const {
  check_orbital_index(i, m_, "apply");
  check_orbital_index(j, m_, "apply");
  if (in.size() != dim_ext_) {
    throw std::invalid_argument("apply: input must use the extended layout");
  }
  const std::size_t pair = static_cast<std::size_t>(i) * m_ + j;
  const auto& src = source_[pair];
  const auto& fac = factor_[pair];
  out.resize(dim_ext_);
  for (std::int64_t t = 0; t < dim_ext_; ++t) {
    out[t] = src[t] >= 0 ? fac[t] * in[src[t]] : Complex(0.0, 0.0);
  }
}

Matrix ExcitationTable::images(const Vector& c) const {
  const Vector padded = pad(c);
  Matrix g(dim_ext_, static_cast<std::int64_t>(m_) * m_);
  Vector column;
  for (int i = 0; i < m_; ++i) {
    for (int j = 0; j < m_; ++j) {
      apply(i, j, padded, column);
      g.col(static_cast<std::int64_t>(i) * m_ + j) = column;
    }
  }
  return g;
}

Vector apply_excitation(const Vector& c, int i, int j,
                        const fock::FockSpace& space) {
  const int m = space.orbitals();
  check_orbital_index(i, m, "apply_excitation");
  check_orbital_index(j, m, "apply_excitation");
  if (c.size() != space.dim()) {
    throw std::invalid_argument(
        "apply_excitation: coefficient vector has wrong length");
  }
  Vector out = Vector::Zero(space.dim());
  fock::Occupation source_occ;
  for (std::int64_t t = 0; t < space.dim(); ++t) {
    const fock::Occupation occ = space.occupation_at(t);
    if (occ[i] == 0) continue;
    if (i == j) {
      out[t] = static_cast<double>(occ[i]) * c[t];
      continue;
    }
    source_occ = occ;
    source_occ[i] -= 1;
    source_occ[j] += 1;
    const auto src = space.position(source_occ);
    if (!src.has_value()) continue;
    out[t] = std::sqrt(static_cast<double>(occ[i])) *
             std::sqrt(static_cast<double>(occ[j]) + 1.0) * c[*src];
  }
  return out;
}

Matrix build_rho1(const Vector& c, const ExcitationTable& table,
                  const Matrix& images) {
  const int m = table.orbitals();
  const std::int64_t dim = table.space().dim();
  if (c.size() != dim) {
    throw std::invalid_argument("build_rho1: coefficient vector length");
  }
  Matrix rho1(m, m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      rho1(i, j) = c.dot(images.col(static_cast<std::int64_t>(i) * m + j)
                             .head(dim));
    }
  }
  return rho1;
}

Matrix build_rho1(const Vector& c, const ExcitationTable& table) {
  return build_rho1(c, table, table.images(c));
}

Tensor4 build_rho2(const Vector& c, const ExcitationTable& table,
                   const Matrix& images) {
  const int m = table.orbitals();
  const Matrix rho1 = build_rho1(c, table, images);
  const Matrix gram = images.adjoint() * images;
  Tensor4 rho2(m);
  for (int i = 0; i < m; ++i) {
    for (int k = 0; k < m; ++k) {
      for (int j = 0; j < m; ++j) {
        for (int l = 0; l < m; ++l) {
          Complex value = gram(static_cast<std::int64_t>(j) * m + i,
                               static_cast<std::int64_t>(k) * m + l);
          if (j == k) value -= rho1(i, l);
          rho2(i, k, j, l) = value;
        }
      }
    }
  }
  return rho2;
}

Tensor4 build_rho2(const Vector& c, const ExcitationTable& table) {
  return build_rho2(c, table, table.images(c));
}

Matrix build_A_tensor(const Matrix& rho1, const fock::RasSpec& spec) {
  spec.validate();
  const int m1 = spec.m1;
  const int m2 = spec.m2;
  if (rho1.rows() != spec.orbitals() || rho1.cols() != spec.orbitals()) {
    throw std::invalid_argument("build_A_tensor: rho1 size mismatch");
  }
  Matrix a = Matrix::Zero(static_cast<std::int64_t>(m1) * m2,
                          static_cast<std::int64_t>(m1) * m2);
  for (int i1 = 0; i1 < m1; ++i1) {
    for (int j2 = m1; j2 < m1 + m2; ++j2) {
      const std::int64_t row =
          static_cast<std::int64_t>(i1) * m2 + (j2 - m1);
      for (int l1 = 0; l1 < m1; ++l1) {
        for (int k2 = m1; k2 < m1 + m2; ++k2) {
          const std::int64_t col =
              static_cast<std::int64_t>(l1) * m2 + (k2 - m1);
          Complex value(0.0, 0.0);
          if (k2 == j2) value += rho1(i1, l1);
          if (i1 == l1) value -= rho1(k2, j2);
          a(row, col) = value;
        }
      }
    }
  }
  return a;
}

Vector boundary_bra(const Vector& c, int i1, int j2,
                    const ExcitationTable& table) {
  const fock::FockSpace& space = table.space();
  check_general_scheme(space, "boundary_bra");
  const fock::RasSpec& spec = space.ras();
  if (i1 < 0 || i1 >= spec.m1) {
    throw std::invalid_argument("boundary_bra: i1 outside the primary "
                                "partition");
  }
  if (j2 < spec.m1 || j2 >= spec.orbitals()) {
    throw std::invalid_argument("boundary_bra: j2 outside the secondary "
                                "partition");
  }

  Vector beta = Vector::Zero(space.dim_extended());
  if (space.halo_shells().empty()) {
    return beta;  // nothing beyond the variational space
  }
  const int boundary_shell = space.halo_shells().front();

  // beta_K = conj(C_{K'}) sqrt(n_j2^K) sqrt(n_i1^K + 1) with
  // K' = K - e_j2 + e_i1, i.e. the (j2, i1) gather applied to conj(C),
  // restricted to the boundary shell.
  const Vector conj_padded = table.pad(c).conjugate();
  Vector full(space.dim_extended());
  table.apply(j2, i1, conj_padded, full);
  for (const auto& block : space.blocks()) {
    if (block.shell != boundary_shell || block.variational) continue;
    beta.segment(block.offset, block.d1 * block.d2) =
        full.segment(block.offset, block.d1 * block.d2);
  }
  return beta;
}

Matrix build_zeta4(const Vector& c, const ExcitationTable& table,
                   const Matrix& images) {
  const fock::FockSpace& space = table.space();
  check_general_scheme(space, "build_zeta4");
  const fock::RasSpec& spec = space.ras();
  const int m = spec.orbitals();
  const int m1 = spec.m1;
  const int m2 = spec.m2;
  Matrix zeta4 = Matrix::Zero(static_cast<std::int64_t>(m1) * m2,
                              static_cast<std::int64_t>(m1) * m2);
  for (int i1 = 0; i1 < m1; ++i1) {
    for (int j2 = m1; j2 < m; ++j2) {
      const Vector beta = boundary_bra(c, i1, j2, table);
      const std::int64_t row =
          static_cast<std::int64_t>(i1) * m2 + (j2 - m1);
      // zeta4(k'', i', l', j'') = sum_K beta_K g_{k'' l'}[K]; the bra
      // coefficients multiply without conjugation.
      for (int l1 = 0; l1 < m1; ++l1) {
        for (int k2 = m1; k2 < m; ++k2) {
          const std::int64_t col =
              static_cast<std::int64_t>(l1) * m2 + (k2 - m1);
          zeta4(row, col) =
              (beta.transpose() *
               images.col(static_cast<std::int64_t>(k2) * m + l1))(0);
        }
      }
    }
  }
  return zeta4;
}

Zeta6::Zeta6(int m, int m1)
    : m_(m),
      m1_(m1),
      data_(static_cast<std::size_t>(m) * m * m * m * m1 * (m - m1),
            Complex(0.0, 0.0)) {}

std::size_t Zeta6::flat(int k, int m, int i1, int l, int n, int j2) const {
  const std::size_t mm = static_cast<std::size_t>(m_);
  const std::size_t m2 = static_cast<std::size_t>(m_ - m1_);
  std::size_t idx = static_cast<std::size_t>(k);
  idx = idx * mm + m;
  idx = idx * static_cast<std::size_t>(m1_) + i1;
  idx = idx * mm + l;
  idx = idx * mm + n;
  idx = idx * m2 + (j2 - m1_);
  return idx;
}

Complex& Zeta6::at(int k, int m, int i1, int l, int n, int j2) {
  return data_[flat(k, m, i1, l, n, j2)];
}

const Complex& Zeta6::at(int k, int m, int i1, int l, int n, int j2) const {
  return data_[flat(k, m, i1, l, n, j2)];
}

Zeta6 build_zeta6(const Vector& c, const ExcitationTable& table,
                  const Matrix& images) {
  const fock::FockSpace& space = table.space();
  check_general_scheme(space, "build_zeta6");
  const fock::RasSpec& spec = space.ras();
  const int m = spec.orbitals();
  const int m1 = spec.m1;
  Zeta6 zeta6(m, m1);

  Matrix gamma(space.dim_extended(), static_cast<std::int64_t>(m) * m);
  Vector column;
  for (int i1 = 0; i1 < m1; ++i1) {
    for (int j2 = m1; j2 < m; ++j2) {
      const Vector beta = boundary_bra(c, i1, j2, table);
      // gamma column k*M+l holds <B| E_kl |Phi_T> = (E_lk gather on beta).
      for (int k = 0; k < m; ++k) {
        for (int l = 0; l < m; ++l) {
          table.apply(l, k, beta, column);
          gamma.col(static_cast<std::int64_t>(k) * m + l) = column;
        }
      }
      // First chain term <B| E_kl E_mn |Psi>; plain transpose products,
      // bra coefficients are already conjugated.
      const Matrix chain = gamma.transpose() * images;
      const Eigen::RowVectorXcd delta = beta.transpose() * images;
      for (int k = 0; k < m; ++k) {
        for (int l = 0; l < m; ++l) {
          for (int mm = 0; mm < m; ++mm) {
            for (int n = 0; n < m; ++n) {
              Complex value = chain(static_cast<std::int64_t>(k) * m + l,
                                    static_cast<std::int64_t>(mm) * m + n);
              if (l == mm) {
                value -= delta(static_cast<std::int64_t>(k) * m + n);
              }
              zeta6.at(k, mm, i1, l, n, j2) = value;
            }
          }
        }
      }
    }
  }
  return zeta6;
}

}  // namespace rasb::secondq
