#pragma once

// Exhaustive search for exact realizations of a target table by one shared
// source of fixed cardinality m and deterministic local strategies.
//
// Restricting to deterministic strategies is only sound for targets whose
// perfect correlations force determinism (the correlated no-input and the
// matching-inputs targets); callers are responsible for that precondition.
//
// Enumeration order: party i's strategy is the base-|A_i| integer whose
// digits are its outputs for (x, r) in row-major order (x major, r minor),
// first digit most significant; tuples are ordered lexicographically with
// party 0 most significant. The first accepted tuple is returned.
//
// A tuple is accepted when the least-squares weights p(r) reproduce the
// target within `tolerance` in the ∞-norm and are nonnegative within
// `tolerance`. Before solving, values r whose column would put mass on a
// zero cell of the target are pinned to p(r) = 0 (nonnegativity forces it)
// and duplicate columns are merged into their first occurrence.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "json.hpp"
#include "randcomp/netmodel.hpp"

namespace randcomp::witness {

inline constexpr std::uint64_t kDefaultSearchCap = 1'000'000'000;

struct PartyAlphabet {
  std::size_t inputs = 1;
  std::size_t outputs = 1;
};

struct FeasibilityProblem {
  ConditionalDistribution target;
  std::vector<PartyAlphabet> parties;
  std::size_t m = 1;
  double tolerance = 1e-9;
};

struct Realization {
  FinitePMF source_pmf;
  /// strategies[i][x * m + r] = output of party i on input x and source value r.
  std::vector<std::vector<std::size_t>> strategies;
};

struct SearchOptions {
  /// Cap on strategy tuples × m × |X| (joint inputs).
  std::uint64_t step_cap = kDefaultSearchCap;
  unsigned jobs = 1;
};

/// Elementary steps the search at this m would take (saturating).
std::uint64_t search_steps(const FeasibilityProblem& problem);

std::optional<Realization> deterministic_feasible(const FeasibilityProblem& problem,
                                                  const SearchOptions& opts = {});

std::optional<std::size_t> min_cardinality(const ConditionalDistribution& target,
                                           const std::vector<PartyAlphabet>& parties,
                                           std::size_t m_max, double tolerance = 1e-9,
                                           const SearchOptions& opts = {});

/// u_x[r] = 1 iff party 0 outputs 1 on (x, r). Checks ⟨u_x,u_y⟩_p = 1/2 on
/// the diagonal and 1/4 off it, and that v_x = u_x − 1/2 are orthogonal with
/// ⟨v_x,v_x⟩_p = 1/4, all within 1e-9.
bool verify_inner_product_pattern(const Realization& realization, std::size_t x_size);

/// Network with one source "R" seen by every party and point-mass strategies.
NetworkSpec realization_network(const Realization& realization,
                                const std::vector<PartyAlphabet>& parties);

/// Same realization with one extra source value of probability zero.
Realization pad_realization(const Realization& realization, const std::vector<PartyAlphabet>& parties);

/// {"source_pmf": [...], "strategies": [[...], ...], "symmetry_pruning": false}
nlohmann::json to_json(const Realization& realization);

}  // namespace randcomp::witness
