// Bosonic configuration spaces with a restricted-active-space structure.
//
// The single-particle basis of M orbitals is split into a primary partition
// of m1 orbitals and a secondary partition of m2 = M - m1 orbitals.  A
// configuration |n_1, ..., n_M> is kept when the number of particles in the
// secondary partition matches one of the allowed excitation shells of the
// chosen truncation scheme.  Configurations are ordered shell by shell
// (ascending excitation count); within a shell the primary-partition index
// is the major axis.  Orbital and position indices are 0-based throughout
// the library; the combinatorial rank J returned by index_of is 1-based.

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "rasb/common.hpp"

namespace rasb::fock {

// Occupation-number vector, one entry per orbital.
using Occupation = std::vector<int>;

enum class Scheme {
  kFull,      // no truncation: every distribution over all M orbitals
  kGeneral,   // secondary shells 0, 1, ..., n_max
  kEvenOnly,  // secondary shells 0, 2, ..., 2*floor(n_max/2)
};

// Defining data of a restricted configuration space.
struct RasSpec {
  int n_particles = 0;
  int m1 = 1;     // orbitals in the primary partition (>= 1)
  int m2 = 0;     // orbitals in the secondary partition (>= 0)
  Scheme scheme = Scheme::kFull;
  int n_max = 0;  // highest excitation shell; ignored for kFull

  int orbitals() const noexcept { return m1 + m2; }

  // Shells kept by the scheme, ascending.  For m2 == 0 only shell 0 exists.
  std::vector<int> allowed_shells() const;

  // Throws std::invalid_argument when any field is out of range.
  void validate() const;
};

// Exact binomial coefficient C(a, b) with the convention C(a, b) = 0 when
// a < 0, b < 0, or b > a.  Throws std::overflow_error when the value does
// not fit in a signed 64-bit integer.
std::int64_t binomial(std::int64_t a, std::int64_t b);

// Number of ways to place n bosons in m orbitals: C(n + m - 1, n).
std::int64_t dim_fci(int n, int m);

// Number of configurations kept by the truncation scheme.
std::int64_t dim_ras(const RasSpec& spec);

// 1-based combinatorial rank of an occupation vector among all
// distributions of n bosons over m orbitals.  The enumeration starts from
// |n, 0, ..., 0> and descends lexicographically in (n_1, n_2, ...).
std::int64_t index_of(const Occupation& occ, int n, int m);

// Inverse of index_of: the occupation vector with 1-based rank j.
Occupation occupation_of(std::int64_t j, int n, int m);

// Structured position of a configuration inside its excitation shell.
struct RasIndex {
  std::int64_t j_p1 = 1;  // 1-based rank of the primary-partition part
  std::int64_t j_p2 = 1;  // 1-based rank of the secondary-partition part
  int n_exc = 0;          // particles in the secondary partition
};

// Signed work-estimate difference between solving the full-space orbital
// equations and the restricted ones for one time step.  Positive values
// mean the restriction is cheaper.  For even schemes the estimate is
// 2M^4(dim_fci - dim_ras - 1/2), evaluated as 4M^4(...) in exact integers
// and halved with explicit floor; for general schemes it is
// 2M^4(dim_fci - dim_ras) - M^6 * (top-shell block dimension), the extra
// term accounting for the boundary coupling.  The full scheme is treated
// as a general scheme whose top shell is N.  The grid size does not enter
// the difference (grid-dependent costs cancel); the parameter is accepted
// for signature stability.  Throws std::overflow_error when the estimate
// does not fit in a signed 64-bit integer.
std::int64_t cost_delta(const RasSpec& spec, int n_grid = 0);

// Enumerated configuration space with shell-blocked layout and rank-based
// position lookup.  Construction is O(M + number of shells); positions and
// occupations are computed arithmetically, so spaces with millions of
// configurations carry no per-configuration storage here.
//
// Besides the variational shells, the layout appends "halo" shells: the
// shells reachable from a variational configuration by moving exactly one
// particle between orbitals.  Operator machinery uses the extended layout
// so that one application of b_i^dagger b_j never leaves it.
class FockSpace {
 public:
  explicit FockSpace(RasSpec spec);

  const RasSpec& ras() const noexcept { return spec_; }
  int orbitals() const noexcept { return spec_.orbitals(); }
  int particles() const noexcept { return spec_.n_particles; }

  std::int64_t dim() const noexcept { return dim_; }
  std::int64_t dim_extended() const noexcept { return dim_extended_; }

  const std::vector<int>& shells() const noexcept { return shells_; }
  const std::vector<int>& halo_shells() const noexcept { return halo_; }
  bool has_shell(int shell) const;  // true for variational shells only

  // One contiguous block per shell, variational shells first, each group
  // ascending in shell index.
  struct Block {
    int shell = 0;
    std::int64_t offset = 0;  // first position of the block
    std::int64_t d1 = 0;      // configurations of the primary partition
    std::int64_t d2 = 0;      // configurations of the secondary partition
    bool variational = false;
  };
  const std::vector<Block>& blocks() const noexcept { return blocks_; }

  // 0-based position within the variational space, or nullopt when the
  // configuration lies outside it.  Throws std::invalid_argument for
  // malformed occupation vectors (wrong length, negative entries, wrong
  // total particle number).
  std::optional<std::int64_t> position(const Occupation& occ) const;

  // Same lookup over the extended (variational plus halo) layout.
  std::optional<std::int64_t> extended_position(const Occupation& occ) const;

  // Shell-resolved index of a variational configuration.  Throws
  // std::invalid_argument when the configuration is not in the space.
  RasIndex ras_index_of(const Occupation& occ) const;

  // Flat 0-based position of a shell-resolved index.
  std::int64_t flatten(const RasIndex& index) const;

  // Occupation vector at a 0-based position of the extended layout.
  Occupation occupation_at(std::int64_t position) const;

  // All variational configurations in position order.  Intended for small
  // spaces (tests, dense reference calculations).
  std::vector<Occupation> enumerate() const;

 private:
  const Block* find_block(int shell) const;

  RasSpec spec_;
  std::vector<int> shells_;
  std::vector<int> halo_;
  std::vector<Block> blocks_;
  std::int64_t dim_ = 0;
  std::int64_t dim_extended_ = 0;
};

}  // namespace rasb::fock
