#include "rasb/fock.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace rasb::fock {

namespace {

// Checked signed 64-bit arithmetic; raises instead of wrapping.
std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t out = 0;
  if (__builtin_mul_overflow(a, b, &out)) {
    throw std::overflow_error("integer overflow in dimension arithmetic");
  }
  return out;
}

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t out = 0;
  if (__builtin_add_overflow(a, b, &out)) {
    throw std::overflow_error("integer overflow in dimension arithmetic");
  }
  return out;
}

std::int64_t checked_sub(std::int64_t a, std::int64_t b) {
  std::int64_t out = 0;
  if (__builtin_sub_overflow(a, b, &out)) {
    throw std::overflow_error("integer overflow in dimension arithmetic");
  }
  return out;
}

void check_occupation(const Occupation& occ, int n, int m,
                      const char* where) {
  if (static_cast<int>(occ.size()) != m) {
    throw std::invalid_argument(std::string(where) +
                                ": occupation vector has wrong length");
  }
  std::int64_t total = 0;
  for (int v : occ) {
    if (v < 0) {
      throw std::invalid_argument(std::string(where) +
                                  ": negative occupation number");
    }
    total += v;
  }
  if (total != n) {
    throw std::invalid_argument(std::string(where) +
                                ": occupation numbers do not sum to the "
                                "particle number");
  }
}

}  // namespace

std::int64_t binomial(std::int64_t a, std::int64_t b) {
  if (a < 0 || b < 0 || b > a) {
    return 0;
  }
  b = std::min(b, a - b);
  unsigned __int128 result = 1;
  for (std::int64_t i = 1; i <= b; ++i) {
    result = result * static_cast<unsigned __int128>(a - b + i);
    result /= static_cast<unsigned __int128>(i);
    if (result > static_cast<unsigned __int128>(
                     std::numeric_limits<std::int64_t>::max())) {
      throw std::overflow_error("binomial coefficient exceeds 64-bit range");
    }
  }
  return static_cast<std::int64_t>(result);
}

std::int64_t dim_fci(int n, int m) {
  if (n < 0) {
    throw std::invalid_argument("dim_fci: particle number must be >= 0");
  }
  if (m < 0) {
    throw std::invalid_argument("dim_fci: orbital number must be >= 0");
  }
  if (m == 0) {
    return n == 0 ? 1 : 0;
  }
  return binomial(static_cast<std::int64_t>(n) + m - 1, n);
}

std::vector<int> RasSpec::allowed_shells() const {
  validate();
  const int n = n_particles;
  std::vector<int> shells;
  if (m2 == 0) {
    shells.push_back(0);
    return shells;
  }
  switch (scheme) {
    case Scheme::kFull:
      for (int k = 0; k <= n; ++k) shells.push_back(k);
      break;
    case Scheme::kGeneral:
      for (int k = 0; k <= std::min(n_max, n); ++k) shells.push_back(k);
      break;
    case Scheme::kEvenOnly: {
      const int top = 2 * (n_max / 2);
      for (int k = 0; k <= std::min(top, n); k += 2) shells.push_back(k);
      break;
    }
  }
  return shells;
}

void RasSpec::validate() const {
  if (n_particles < 1) {
    throw std::invalid_argument("RasSpec: n_particles must be >= 1");
  }
  if (m1 < 1) {
    throw std::invalid_argument("RasSpec: m1 must be >= 1");
  }
  if (m2 < 0) {
    throw std::invalid_argument("RasSpec: m2 must be >= 0");
  }
  if (scheme != Scheme::kFull) {
    if (n_max < 0 || n_max > n_particles) {
      throw std::invalid_argument(
          "RasSpec: n_max must lie in [0, n_particles]");
    }
  }
}

std::int64_t dim_ras(const RasSpec& spec) {
  spec.validate();
  std::int64_t total = 0;
  for (int k : spec.allowed_shells()) {
    const std::int64_t d1 = dim_fci(spec.n_particles - k, spec.m1);
    const std::int64_t d2 = dim_fci(k, spec.m2);
    total = checked_add(total, checked_mul(d1, d2));
  }
  return total;
}

std::int64_t index_of(const Occupation& occ, int n, int m) {
  check_occupation(occ, n, m, "index_of");
  // Rank formula: J = 1 + sum_k C(n + m - 1 - k - partial_k, m - k) with
  // partial_k the running occupation total through orbital k (1-based k).
  std::int64_t j = 1;
  std::int64_t partial = 0;
  for (int k = 1; k <= m; ++k) {
    partial += occ[k - 1];
    j = checked_add(
        j, binomial(static_cast<std::int64_t>(n) + m - 1 - k - partial,
                    static_cast<std::int64_t>(m) - k));
  }
  return j;
}

Occupation occupation_of(std::int64_t j, int n, int m) {
  if (m < 1) {
    throw std::invalid_argument("occupation_of: orbital number must be >= 1");
  }
  if (n < 0) {
    throw std::invalid_argument("occupation_of: particle number must be >= 0");
  }
  if (j < 1 || j > dim_fci(n, m)) {
    throw std::invalid_argument("occupation_of: rank out of range");
  }
  Occupation occ(static_cast<std::size_t>(m), 0);
  int remaining = n;
  for (int q = 0; q < m - 1; ++q) {
    for (int nq = remaining; nq >= 0; --nq) {
      const std::int64_t block = dim_fci(remaining - nq, m - q - 1);
      if (j <= block) {
        occ[q] = nq;
        remaining -= nq;
        break;
      }
      j -= block;
    }
  }
  occ[m - 1] = remaining;
  return occ;
}

std::int64_t cost_delta(const RasSpec& spec, int n_grid) {
  spec.validate();
  (void)n_grid;  // grid-dependent costs cancel in the difference
  const int m = spec.orbitals();
  const std::int64_t m2_pow = checked_mul(m, m);
  const std::int64_t m4 = checked_mul(m2_pow, m2_pow);
  const std::int64_t full = dim_fci(spec.n_particles, m);
  const std::int64_t kept = dim_ras(spec);
  const std::int64_t saved = checked_sub(full, kept);

  if (spec.scheme == Scheme::kEvenOnly) {
    // 2M^4(saved - 1/2): evaluate 4M^4*saved - 2M^4 exactly, halve with
    // explicit floor.
    const std::int64_t four_term =
        checked_sub(checked_mul(checked_mul(4, m4), saved),
                    checked_mul(2, m4));
    std::int64_t half = four_term / 2;
    if (four_term % 2 != 0 && four_term < 0) {
      half -= 1;  // floor for negative odd values
    }
    return half;
  }

  // General scheme (the full scheme is the n_max = N special case): the
  // boundary coupling adds M^6 times the top-shell block dimension.
  const int top =
      spec.scheme == Scheme::kFull
          ? spec.n_particles
          : std::min(spec.n_max, spec.n_particles);
  const std::int64_t top_block =
      checked_mul(dim_fci(spec.n_particles - top, spec.m1),
                  dim_fci(top, spec.m2));
  const std::int64_t m6 = checked_mul(m4, m2_pow);
  return checked_sub(checked_mul(checked_mul(2, m4), saved),
                     checked_mul(m6, top_block));
}

FockSpace::FockSpace(RasSpec spec) : spec_(std::move(spec)) {
  spec_.validate();
  shells_ = spec_.allowed_shells();

  // Halo shells: reachable from a variational shell by moving one particle,
  // but not variational themselves.
  const int n = spec_.n_particles;
  if (spec_.m2 > 0) {
    switch (spec_.scheme) {
      case Scheme::kFull:
        break;  // every shell is variational
      case Scheme::kGeneral: {
        const int top = std::min(spec_.n_max, n);
        if (top < n) halo_.push_back(top + 1);
        break;
      }
      case Scheme::kEvenOnly: {
        const int top = std::min(2 * (spec_.n_max / 2), n);
        for (int k = 1; k <= std::min(top + 1, n); k += 2) {
          halo_.push_back(k);
        }
        break;
      }
    }
  }

  std::int64_t offset = 0;
  auto push_block = [&](int shell, bool variational) {
    Block b;
    b.shell = shell;
    b.offset = offset;
    b.d1 = dim_fci(n - shell, spec_.m1);
    b.d2 = dim_fci(shell, spec_.m2);
    b.variational = variational;
    blocks_.push_back(b);
    offset = checked_add(offset, checked_mul(b.d1, b.d2));
  };
  for (int k : shells_) push_block(k, true);
  dim_ = offset;
  for (int k : halo_) push_block(k, false);
  dim_extended_ = offset;
}

bool FockSpace::has_shell(int shell) const {
  return std::binary_search(shells_.begin(), shells_.end(), shell);
}

const FockSpace::Block* FockSpace::find_block(int shell) const {
  for (const Block& b : blocks_) {
    if (b.shell == shell) return &b;
  }
  return nullptr;
}

std::optional<std::int64_t> FockSpace::position(const Occupation& occ) const {
  check_occupation(occ, spec_.n_particles, orbitals(), "position");
  int shell = 0;
  for (int q = spec_.m1; q < orbitals(); ++q) shell += occ[q];
  const Block* b = find_block(shell);
  if (b == nullptr || !b->variational) return std::nullopt;

  const Occupation p1(occ.begin(), occ.begin() + spec_.m1);
  const std::int64_t j1 = index_of(p1, spec_.n_particles - shell, spec_.m1);
  std::int64_t j2 = 1;
  if (spec_.m2 > 0) {
    const Occupation p2(occ.begin() + spec_.m1, occ.end());
    j2 = index_of(p2, shell, spec_.m2);
  }
  return b->offset + (j1 - 1) * b->d2 + (j2 - 1);
}

std::optional<std::int64_t> FockSpace::extended_position(
    const Occupation& occ) const {
  check_occupation(occ, spec_.n_particles, orbitals(), "extended_position");
  int shell = 0;
  for (int q = spec_.m1; q < orbitals(); ++q) shell += occ[q];
  const Block* b = find_block(shell);
  if (b == nullptr) return std::nullopt;

  const Occupation p1(occ.begin(), occ.begin() + spec_.m1);
  const std::int64_t j1 = index_of(p1, spec_.n_particles - shell, spec_.m1);
  std::int64_t j2 = 1;
  if (spec_.m2 > 0) {
    const Occupation p2(occ.begin() + spec_.m1, occ.end());
    j2 = index_of(p2, shell, spec_.m2);
  }
  return b->offset + (j1 - 1) * b->d2 + (j2 - 1);
}

RasIndex FockSpace::ras_index_of(const Occupation& occ) const {
  check_occupation(occ, spec_.n_particles, orbitals(), "ras_index_of");
  int shell = 0;
  for (int q = spec_.m1; q < orbitals(); ++q) shell += occ[q];
  const Block* b = find_block(shell);
  if (b == nullptr || !b->variational) {
    throw std::invalid_argument(
        "ras_index_of: configuration outside the variational space");
  }
  RasIndex idx;
  idx.n_exc = shell;
  const Occupation p1(occ.begin(), occ.begin() + spec_.m1);
  idx.j_p1 = index_of(p1, spec_.n_particles - shell, spec_.m1);
  idx.j_p2 = 1;
  if (spec_.m2 > 0) {
    const Occupation p2(occ.begin() + spec_.m1, occ.end());
    idx.j_p2 = index_of(p2, shell, spec_.m2);
  }
  return idx;
}

std::int64_t FockSpace::flatten(const RasIndex& index) const {
  const Block* b = find_block(index.n_exc);
  if (b == nullptr || !b->variational) {
    throw std::invalid_argument("flatten: shell not in the variational space");
  }
  if (index.j_p1 < 1 || index.j_p1 > b->d1 || index.j_p2 < 1 ||
      index.j_p2 > b->d2) {
    throw std::invalid_argument("flatten: partition rank out of range");
  }
  return b->offset + (index.j_p1 - 1) * b->d2 + (index.j_p2 - 1);
}

Occupation FockSpace::occupation_at(std::int64_t position) const {
  if (position < 0 || position >= dim_extended_) {
    throw std::out_of_range("occupation_at: position out of range");
  }
  // Blocks are stored in layout order, so a linear scan finds the block;
  // block counts are tiny (at most N + 1).
  const Block* b = nullptr;
  for (const Block& cand : blocks_) {
    if (position >= cand.offset &&
        position < cand.offset + cand.d1 * cand.d2) {
      b = &cand;
      break;
    }
  }
  const std::int64_t local = position - b->offset;
  const std::int64_t j1 = local / b->d2 + 1;
  const std::int64_t j2 = local % b->d2 + 1;

  Occupation occ =
      occupation_of(j1, spec_.n_particles - b->shell, spec_.m1);
  if (spec_.m2 > 0) {
    const Occupation p2 = occupation_of(j2, b->shell, spec_.m2);
    occ.insert(occ.end(), p2.begin(), p2.end());
  }
  return occ;
}

std::vector<Occupation> FockSpace::enumerate() const {
  std::vector<Occupation> out;
  out.reserve(static_cast<std::size_t>(dim_));
  for (std::int64_t pos = 0; pos < dim_; ++pos) {
    out.push_back(occupation_at(pos));
  }
  return out;
}

}  // namespace rasb::fock
