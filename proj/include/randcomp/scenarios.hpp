#pragma once

// Concrete networks and their target tables: perfectly correlated outputs
// with no inputs, and the matching-inputs task realized with XOR parities of
// shared fair bits.

#include <cstddef>
#include <cstdint>

#include "randcomp/netmodel.hpp"

namespace randcomp::scenarios {

struct ScenarioInstance {
  NetworkSpec network;
  ConditionalDistribution target;
};

/// h parties, one source R over supp(q) seen by all, everyone outputs r.
/// Target: p(a,...,a) = q(a), zero off the diagonal, single dummy input.
ScenarioInstance build_correlated_no_input(std::size_t h, const FinitePMF& q);

/// Two parties with inputs in [x_size] and binary outputs: equal fair bits
/// when the inputs match, independent fair bits otherwise.
ConditionalDistribution target_matching_distribution(std::size_t x_size);

/// k = ceil(log2(x_size + 1)) shared fair bits as one uniform source "R" of
/// size 2^k. Input j (0-based) selects the subset of bits whose
/// characteristic vector equals j + 1; both parties output its parity.
NetworkSpec xor_strategy_network(std::size_t x_size);

/// Number of shared bits used by xor_strategy_network.
std::size_t xor_bits(std::size_t x_size);

/// Triangle network: three sources of size `source_size`, each seen by two
/// of the three parties, with random output PMFs drawn from `seed`.
NetworkSpec triangle_demo(std::size_t source_size, std::size_t outputs, std::uint64_t seed);

}  // namespace randcomp::scenarios
