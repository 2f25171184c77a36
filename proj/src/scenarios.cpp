#include "randcomp/scenarios.hpp"

#include <bit>

#include "randcomp/error.hpp"
#include "randcomp/rng.hpp"

namespace randcomp::scenarios {

ScenarioInstance build_correlated_no_input(std::size_t h, const FinitePMF& q) {
  if (h < 2) throw InvalidArgument("correlated scenario needs at least two parties");
  q.check("q");
  const std::size_t k = q.size();

  std::vector<std::size_t> support;
  std::vector<double> weights;
  for (std::size_t a = 0; a < k; ++a) {
    if (q[a] > 0.0) {
      support.push_back(a);
      weights.push_back(q[a]);
    }
  }

  StructuredNetwork net;
  SourceSpec r{"R", FinitePMF(std::move(weights)), {}};
  for (std::size_t p = 0; p < h; ++p) {
    r.visible_to.push_back(p);
    PartySpec party{"P" + std::to_string(p), 1, k, {}};
    auto& rows = party.strategy.emplace_back();
    for (std::size_t value : support) rows.push_back(FinitePMF::point_mass(k, value));
    net.parties.push_back(std::move(party));
  }
  net.sources.push_back(std::move(r));

  std::size_t outputs = 1;
  for (std::size_t p = 0; p < h; ++p) outputs *= k;
  ConditionalDistribution target(1, outputs);
  // The all-equal tuple (a, ..., a) sits at a · (1 + k + k² + ...).
  std::size_t stride = 0;
  for (std::size_t p = 0, pow = 1; p < h; ++p, pow *= k) stride += pow;
  for (std::size_t a = 0; a < k; ++a) target.at(0, a * stride) = q[a];
  return {std::move(net), std::move(target)};
}

ConditionalDistribution target_matching_distribution(std::size_t x_size) {
  if (x_size < 1) throw InvalidArgument("x_size must be at least 1");
  ConditionalDistribution t(x_size * x_size, 4);
  for (std::size_t x1 = 0; x1 < x_size; ++x1) {
    for (std::size_t x2 = 0; x2 < x_size; ++x2) {
      auto row = t.row(x1 * x_size + x2);
      if (x1 == x2) {
        row[0] = 0.5;  // a = (0, 0)
        row[3] = 0.5;  // a = (1, 1)
      } else {
        for (double& p : row) p = 0.25;
      }
    }
  }
  return t;
}

std::size_t xor_bits(std::size_t x_size) {
  if (x_size < 1) throw InvalidArgument("x_size must be at least 1");
  return static_cast<std::size_t>(std::bit_width(x_size));  // ceil(log2(x_size + 1))
}

NetworkSpec xor_strategy_network(std::size_t x_size) {
  const std::size_t k = xor_bits(x_size);
  const std::size_t values = std::size_t{1} << k;
  StructuredNetwork net;
  net.sources.push_back({"R", FinitePMF::uniform(values), {0, 1}});
  for (std::size_t p = 0; p < 2; ++p) {
    PartySpec party{p == 0 ? "A" : "B", x_size, 2, {}};
    for (std::size_t j = 0; j < x_size; ++j) {
      const std::size_t subset = j + 1;
      auto& rows = party.strategy.emplace_back();
      for (std::size_t r = 0; r < values; ++r) {
        rows.push_back(FinitePMF::point_mass(2, std::popcount(r & subset) & 1u));
      }
    }
    net.parties.push_back(std::move(party));
  }
  return net;
}

NetworkSpec triangle_demo(std::size_t source_size, std::size_t outputs, std::uint64_t seed) {
  if (source_size < 1 || outputs < 1) throw InvalidArgument("triangle demo sizes must be positive");
  rng::Engine gen(seed);
  StructuredNetwork net;
  // Source "R{i}" is shared by parties i and (i + 1) mod 3.
  for (std::size_t i = 0; i < 3; ++i) {
    net.sources.push_back(
        {"R" + std::to_string(i + 1), FinitePMF::uniform(source_size), {i, (i + 1) % 3}});
  }
  for (std::size_t p = 0; p < 3; ++p) {
    PartySpec party{std::string(1, static_cast<char>('A' + p)), 1, outputs, {}};
    auto& rows = party.strategy.emplace_back();
    for (std::size_t t = 0; t < source_size * source_size; ++t) {
      std::vector<double> w(outputs);
      double total = 0.0;
      for (double& v : w) total += (v = rng::uniform01(gen));
      for (double& v : w) v /= total;
      rows.emplace_back(std::move(w));
    }
    net.parties.push_back(std::move(party));
  }
  return net;
}

}  // namespace randcomp::scenarios
