// Configuration-space tests: ranking formula, shell-blocked layout, scheme
// dimensions, and the cost estimate.

#include "rasb/fock.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <functional>
#include <set>
#include <stdexcept>
#include <vector>

using rasb::fock::binomial;
using rasb::fock::cost_delta;
using rasb::fock::dim_fci;
using rasb::fock::dim_ras;
using rasb::fock::FockSpace;
using rasb::fock::index_of;
using rasb::fock::Occupation;
using rasb::fock::occupation_of;
using rasb::fock::RasSpec;
using rasb::fock::Scheme;

namespace {

// All occupation vectors of n bosons over m orbitals, first entry
// descending, independent of the library's enumeration.
std::vector<Occupation> brute_force_occupations(int n, int m) {
  std::vector<Occupation> out;
  Occupation current(static_cast<std::size_t>(m), 0);
  std::function<void(int, int)> fill = [&](int orbital, int remaining) {
    if (orbital == m - 1) {
      current[orbital] = remaining;
      out.push_back(current);
      return;
    }
    for (int k = remaining; k >= 0; --k) {
      current[orbital] = k;
      fill(orbital + 1, remaining - k);
    }
  };
  if (m >= 1) fill(0, n);
  return out;
}

}  // namespace

TEST(Binomial, ConventionAndValues) {
  EXPECT_EQ(binomial(0, 0), 1);
  EXPECT_EQ(binomial(5, 0), 1);
  EXPECT_EQ(binomial(5, 5), 1);
  EXPECT_EQ(binomial(5, 2), 10);
  EXPECT_EQ(binomial(17, 10), 19448);
  // Convention: out-of-range arguments give zero, not an error.
  EXPECT_EQ(binomial(-1, 0), 0);
  EXPECT_EQ(binomial(3, 5), 0);
  EXPECT_EQ(binomial(3, -1), 0);
  EXPECT_EQ(binomial(62, 31), 465428353255261088LL);
}

TEST(Binomial, OverflowRaises) {
  EXPECT_THROW(binomial(128, 64), std::overflow_error);
  EXPECT_THROW(binomial(1000, 500), std::overflow_error);
}

TEST(DimFci, KnownValues) {
  EXPECT_EQ(dim_fci(0, 3), 1);
  EXPECT_EQ(dim_fci(2, 2), 3);
  EXPECT_EQ(dim_fci(7, 1), 1);
  EXPECT_EQ(dim_fci(100, 2), 101);
  EXPECT_EQ(dim_fci(100, 3), 5151);
  EXPECT_EQ(dim_fci(100, 5), 4598126);
  EXPECT_EQ(dim_fci(10, 4), 286);
  EXPECT_EQ(dim_fci(10, 6), 3003);
  EXPECT_EQ(dim_fci(10, 8), 19448);
  EXPECT_EQ(dim_fci(0, 0), 1);
  EXPECT_EQ(dim_fci(3, 0), 0);
}

TEST(DimRas, TruncationSchemes) {
  // Untruncated spaces for N = 100.
  EXPECT_EQ(dim_ras({100, 1, 1, Scheme::kFull, 0}), 101);
  EXPECT_EQ(dim_ras({100, 1, 2, Scheme::kFull, 0}), 5151);
  EXPECT_EQ(dim_ras({100, 1, 4, Scheme::kFull, 0}), 4598126);

  // Single-double truncation.
  EXPECT_EQ(dim_ras({100, 1, 1, Scheme::kGeneral, 2}), 3);
  EXPECT_EQ(dim_ras({100, 1, 4, Scheme::kGeneral, 2}), 15);

  // Excitations through shell 8 with five orbitals.
  EXPECT_EQ(dim_ras({100, 1, 4, Scheme::kGeneral, 8}), 495);

  // Even-shell truncations.
  EXPECT_EQ(dim_ras({100, 1, 1, Scheme::kEvenOnly, 2}), 2);
  EXPECT_EQ(dim_ras({100, 1, 4, Scheme::kEvenOnly, 8}), 295);

  // Deep general truncation.
  EXPECT_EQ(dim_ras({100, 1, 1, Scheme::kGeneral, 25}), 26);

  // Small systems.
  EXPECT_EQ(dim_ras({2, 1, 1, Scheme::kFull, 0}), 3);
  EXPECT_EQ(dim_ras({10, 1, 7, Scheme::kFull, 0}), 19448);
  EXPECT_EQ(dim_ras({10, 1, 3, Scheme::kFull, 0}), 286);
  EXPECT_EQ(dim_ras({10, 1, 5, Scheme::kFull, 0}), 3003);
}

TEST(DimRas, FullEqualsUntruncatedForAnySplit) {
  for (int n = 1; n <= 8; ++n) {
    for (int m = 1; m <= 6; ++m) {
      for (int m1 = 1; m1 <= m; ++m1) {
        RasSpec spec{n, m1, m - m1, Scheme::kFull, 0};
        EXPECT_EQ(dim_ras(spec), dim_fci(n, m))
            << "n=" << n << " m1=" << m1 << " m2=" << m - m1;
        RasSpec top{n, m1, m - m1, Scheme::kGeneral, n};
        EXPECT_EQ(dim_ras(top), dim_fci(n, m));
      }
    }
  }
}

TEST(IndexOf, MatchesEnumerationOrder) {
  // Rank 1 is always the state with every particle in the first orbital.
  for (int n = 1; n <= 12; n += 3) {
    for (int m = 1; m <= 5; ++m) {
      Occupation occ(static_cast<std::size_t>(m), 0);
      occ[0] = n;
      EXPECT_EQ(index_of(occ, n, m), 1);
    }
  }
  EXPECT_EQ(index_of({2, 0}, 2, 2), 1);
  EXPECT_EQ(index_of({1, 1}, 2, 2), 2);
  EXPECT_EQ(index_of({0, 2}, 2, 2), 3);
}

TEST(IndexOf, BijectionExhaustive) {
  for (int n = 0; n <= 8; ++n) {
    for (int m = 1; m <= 6; ++m) {
      const auto all = brute_force_occupations(n, m);
      ASSERT_EQ(static_cast<std::int64_t>(all.size()), dim_fci(n, m));
      std::set<std::int64_t> seen;
      for (std::size_t pos = 0; pos < all.size(); ++pos) {
        const std::int64_t j = index_of(all[pos], n, m);
        // Enumeration order is exactly rank order.
        EXPECT_EQ(j, static_cast<std::int64_t>(pos) + 1);
        seen.insert(j);
        EXPECT_EQ(occupation_of(j, n, m), all[pos]);
      }
      EXPECT_EQ(static_cast<std::int64_t>(seen.size()), dim_fci(n, m));
    }
  }
}

TEST(IndexOf, MalformedInputsRaise) {
  EXPECT_THROW(index_of({1, 1}, 2, 3), std::invalid_argument);
  EXPECT_THROW(index_of({1, -1}, 0, 2), std::invalid_argument);
  EXPECT_THROW(index_of({1, 2}, 2, 2), std::invalid_argument);
  EXPECT_THROW(occupation_of(0, 2, 2), std::invalid_argument);
  EXPECT_THROW(occupation_of(4, 2, 2), std::invalid_argument);
}

TEST(FockSpace, EnumerationMatchesExample) {
  FockSpace space({2, 1, 1, Scheme::kFull, 0});
  const auto states = space.enumerate();
  ASSERT_EQ(states.size(), 3u);
  EXPECT_EQ(states[0], (Occupation{2, 0}));
  EXPECT_EQ(states[1], (Occupation{1, 1}));
  EXPECT_EQ(states[2], (Occupation{0, 2}));
}

TEST(FockSpace, ShellBlockedLayout) {
  // Shells ascending, primary partition major within a shell.
  FockSpace space({3, 1, 2, Scheme::kGeneral, 1});
  EXPECT_EQ(space.dim(), 3);
  EXPECT_EQ(space.occupation_at(0), (Occupation{3, 0, 0}));
  EXPECT_EQ(space.occupation_at(1), (Occupation{2, 1, 0}));
  EXPECT_EQ(space.occupation_at(2), (Occupation{2, 0, 1}));
  // One shell of halo states beyond the truncation.
  ASSERT_EQ(space.halo_shells(), (std::vector<int>{2}));
  EXPECT_EQ(space.dim_extended(), 6);
  EXPECT_EQ(space.occupation_at(3), (Occupation{1, 2, 0}));
  EXPECT_EQ(space.occupation_at(4), (Occupation{1, 1, 1}));
  EXPECT_EQ(space.occupation_at(5), (Occupation{1, 0, 2}));
  EXPECT_FALSE(space.position({1, 2, 0}).has_value());
  EXPECT_EQ(space.extended_position({1, 2, 0}).value_or(-1), 3);
}

TEST(FockSpace, HaloShells) {
  // Full spaces have no halo.
  EXPECT_TRUE(FockSpace({4, 2, 2, Scheme::kFull, 0}).halo_shells().empty());
  // A general scheme at the top shell has none either.
  EXPECT_TRUE(
      FockSpace({4, 1, 3, Scheme::kGeneral, 4}).halo_shells().empty());
  // Even schemes reach every odd shell below and one above the top.
  FockSpace even({6, 1, 2, Scheme::kEvenOnly, 4});
  EXPECT_EQ(even.halo_shells(), (std::vector<int>{1, 3, 5}));
  // No secondary orbitals, no halo.
  EXPECT_TRUE(FockSpace({4, 3, 0, Scheme::kFull, 0}).halo_shells().empty());
}

TEST(FockSpace, PositionBijectionExhaustive) {
  for (int n = 1; n <= 8; ++n) {
    for (int m = 1; m <= 6; ++m) {
      for (int m1 = 1; m1 <= m; ++m1) {
        std::vector<RasSpec> specs;
        specs.push_back({n, m1, m - m1, Scheme::kFull, 0});
        for (int nmax = 0; nmax <= n; ++nmax) {
          specs.push_back({n, m1, m - m1, Scheme::kGeneral, nmax});
          specs.push_back({n, m1, m - m1, Scheme::kEvenOnly, nmax});
        }
        for (const RasSpec& spec : specs) {
          FockSpace space(spec);
          const auto states = space.enumerate();
          ASSERT_EQ(static_cast<std::int64_t>(states.size()),
                    dim_ras(spec));
          std::set<std::int64_t> seen;
          for (std::size_t pos = 0; pos < states.size(); ++pos) {
            const auto found = space.position(states[pos]);
            ASSERT_TRUE(found.has_value());
            EXPECT_EQ(*found, static_cast<std::int64_t>(pos));
            EXPECT_EQ(space.flatten(space.ras_index_of(states[pos])),
                      static_cast<std::int64_t>(pos));
            seen.insert(*found);
          }
          EXPECT_EQ(seen.size(), states.size());
          // The extended layout is a bijection too.
          for (std::int64_t pos = 0; pos < space.dim_extended(); ++pos) {
            const auto occ = space.occupation_at(pos);
            EXPECT_EQ(space.extended_position(occ).value_or(-1), pos);
          }
        }
      }
    }
  }
}

TEST(FockSpace, OutsideConfigurationsRejected) {
  FockSpace space({3, 1, 2, Scheme::kGeneral, 1});
  EXPECT_THROW(space.ras_index_of({1, 2, 0}), std::invalid_argument);
  EXPECT_THROW(space.position({1, 1}), std::invalid_argument);
  EXPECT_THROW(space.position({4, 0, 0}), std::invalid_argument);
  EXPECT_THROW(space.occupation_at(space.dim_extended()), std::out_of_range);
}

TEST(RasSpecValidation, RejectsBadFields) {
  EXPECT_THROW(dim_ras({0, 1, 1, Scheme::kFull, 0}), std::invalid_argument);
  EXPECT_THROW(dim_ras({3, 0, 1, Scheme::kFull, 0}), std::invalid_argument);
  EXPECT_THROW(dim_ras({3, 1, -1, Scheme::kFull, 0}), std::invalid_argument);
  EXPECT_THROW(dim_ras({3, 1, 1, Scheme::kGeneral, 4}),
               std::invalid_argument);
  EXPECT_THROW(dim_ras({3, 1, 1, Scheme::kGeneral, -1}),
               std::invalid_argument);
}

TEST(CostDelta, EvenSchemesAlwaysGain) {
  for (int n = 2; n <= 40; n += 2) {
    for (int m = 2; m <= 6; ++m) {
      for (int nmax = 2; nmax <= std::min(n, 8); nmax += 2) {
        RasSpec spec{n, 1, m - 1, Scheme::kEvenOnly, nmax};
        if (dim_ras(spec) < dim_fci(n, m)) {
          EXPECT_GT(cost_delta(spec), 0)
              << "n=" << n << " m=" << m << " nmax=" << nmax;
        }
      }
    }
  }
}

TEST(CostDelta, GeneralSchemeSignFlip) {
  // Ten particles, eight orbitals: the restriction stops paying off once
  // the top shell passes five.
  for (int nmax = 0; nmax <= 5; ++nmax) {
    RasSpec spec{10, 1, 7, Scheme::kGeneral, nmax};
    EXPECT_GT(cost_delta(spec), 0) << "nmax=" << nmax;
  }
  RasSpec flipped{10, 1, 7, Scheme::kGeneral, 6};
  EXPECT_LT(cost_delta(flipped), 0);
}

TEST(CostDelta, ExactIntegerValues) {
  // 2M^4(dim_fci - dim_ras) - M^6 * top-shell block, checked by hand.
  RasSpec spec{10, 1, 7, Scheme::kGeneral, 5};
  EXPECT_EQ(cost_delta(spec), 31719424);
  RasSpec flipped{10, 1, 7, Scheme::kGeneral, 6};
  EXPECT_EQ(cost_delta(flipped), -96960512);
  // Even scheme: 2M^4(dim_fci - dim_ras) - M^4.
  RasSpec even{100, 1, 1, Scheme::kEvenOnly, 2};
  EXPECT_EQ(cost_delta(even), 2 * 16 * (101 - 2) - 16);
}

TEST(CostDelta, OverflowRaises) {
  RasSpec spec{400, 1, 39, Scheme::kGeneral, 2};
  EXPECT_THROW(cost_delta(spec), std::overflow_error);
}
