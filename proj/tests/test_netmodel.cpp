#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "randcomp/error.hpp"
#include "randcomp/kernels.hpp"
#include "randcomp/netmodel.hpp"
#include "support/oracles.hpp"

using namespace randcomp;
using randcomp::testing::brute_force_evaluate;

namespace {

PartySpec constant_party(const std::string& name, std::size_t inputs, std::size_t outputs,
                         std::size_t tuples, std::size_t out) {
  PartySpec p{name, inputs, outputs, {}};
  p.strategy.assign(inputs, std::vector<FinitePMF>(tuples, FinitePMF::point_mass(outputs, out)));
  return p;
}

StructuredNetwork bell_constant_zero() {
  StructuredNetwork net;
  net.sources.push_back({"R", FinitePMF({0.25, 0.75}), {0, 1}});
  net.parties.push_back(constant_party("A", 2, 2, 2, 0));
  net.parties.push_back(constant_party("B", 2, 2, 2, 0));
  return net;
}

// Two parties with no inputs that both output the shared fair bit.
StructuredNetwork shared_coin(const std::string& id = "R") {
  StructuredNetwork net;
  net.sources.push_back({id, FinitePMF::uniform(2), {0, 1}});
  for (const char* name : {"A", "B"}) {
    PartySpec p{name, 1, 2, {{FinitePMF::point_mass(2, 0), FinitePMF::point_mass(2, 1)}}};
    net.parties.push_back(p);
  }
  return net;
}

// One party, one source, broadcasting the coin.
StructuredNetwork single_coin(const std::string& id) {
  StructuredNetwork net;
  net.sources.push_back({id, FinitePMF::uniform(2), {0}});
  net.parties.push_back({"P", 1, 2, {{FinitePMF::point_mass(2, 0), FinitePMF::point_mass(2, 1)}}});
  return net;
}

StructuredNetwork trivial_network() {
  StructuredNetwork net;
  net.parties.push_back({"T", 1, 1, {{FinitePMF({1.0})}}});
  return net;
}

void check_close(const ConditionalDistribution& p, const ConditionalDistribution& q, double tol) {
  REQUIRE(p.inputs() == q.inputs());
  REQUIRE(p.outputs() == q.outputs());
  CHECK(infinity_distance(p, q) <= tol);
}

}  // namespace

TEST_SUITE("validate_network") {
  TEST_CASE("well-formed Bell spec validates") {
    const auto net = validate_network(bell_constant_zero());
    CHECK(net.joint_inputs() == 4);
    CHECK(net.joint_outputs() == 4);
    CHECK(net.source_tuples() == 2);
    CHECK(net.table_cells() == 32);
  }

  TEST_CASE("row summing to 1.1 is a normalization error") {
    auto spec = bell_constant_zero();
    spec.parties[0].strategy[1][0] = FinitePMF({0.5, 0.6});
    CHECK_THROWS_AS(validate_network(spec), NormalizationError);
    auto spec2 = bell_constant_zero();
    spec2.sources[0].pmf = FinitePMF({0.5, 0.6});
    CHECK_THROWS_AS(validate_network(spec2), NormalizationError);
  }

  TEST_CASE("negative weight is rejected even if the row sums to one") {
    auto spec = bell_constant_zero();
    spec.parties[1].strategy[0][1] = FinitePMF({1.5, -0.5});
    CHECK_THROWS_AS(validate_network(spec), NormalizationError);
  }

  TEST_CASE("tolerance is 1e-9") {
    auto spec = bell_constant_zero();
    spec.sources[0].pmf = FinitePMF({0.25, 0.75 + 5e-10});
    CHECK_NOTHROW(validate_network(spec));
    spec.sources[0].pmf = FinitePMF({0.25, 0.75 + 5e-9});
    CHECK_THROWS_AS(validate_network(spec), NormalizationError);
  }

  TEST_CASE("structure errors") {
    auto empty_vis = bell_constant_zero();
    empty_vis.sources[0].visible_to.clear();
    CHECK_THROWS_AS(validate_network(empty_vis), StructureError);

    auto dangling = bell_constant_zero();
    dangling.sources[0].visible_to = {0, 5};
    CHECK_THROWS_AS(validate_network(dangling), StructureError);

    auto incomplete = bell_constant_zero();
    incomplete.parties[0].strategy[1].pop_back();
    CHECK_THROWS_AS(validate_network(incomplete), StructureError);

    auto missing_input = bell_constant_zero();
    missing_input.parties[1].strategy.pop_back();
    CHECK_THROWS_AS(validate_network(missing_input), StructureError);

    auto wrong_width = bell_constant_zero();
    wrong_width.parties[1].strategy[0][0] = FinitePMF({1.0});
    CHECK_THROWS_AS(validate_network(wrong_width), StructureError);

    auto duplicate = bell_constant_zero();
    duplicate.sources.push_back(duplicate.sources[0]);
    CHECK_THROWS_AS(validate_network(duplicate), StructureError);

    BlackboxNetwork bb{1, 2, {{"R", FinitePMF::uniform(2), {}}}, {{FinitePMF::uniform(2)}}};
    CHECK_THROWS_AS(validate_network(bb), StructureError);  // kernel misses r = 1
  }

  TEST_CASE("sources are reordered by id") {
    StructuredNetwork net = shared_coin("Z");
    net.sources.push_back({"A", FinitePMF::uniform(3), {0}});
    // Party 0 now sees (A, Z): tuple index = a * 2 + z.
    auto& rows = net.parties[0].strategy[0];
    rows.clear();
    for (std::size_t a = 0; a < 3; ++a) {
      for (std::size_t z = 0; z < 2; ++z) rows.push_back(FinitePMF::point_mass(2, z));
    }
    const auto v = validate_network(net);
    CHECK(v.sources()[0].id == "A");
    CHECK(v.sources()[1].id == "Z");
    CHECK(v.parties()[0].visible == std::vector<std::size_t>{0, 1});
    const auto p = evaluate(v);
    CHECK(p.at(0, 0) == doctest::Approx(0.5));
    CHECK(p.at(0, 3) == doctest::Approx(0.5));
  }
}

TEST_SUITE("evaluate") {
  TEST_CASE("deterministic zero outputs") {
    const auto p = evaluate(validate_network(bell_constant_zero()));
    for (std::size_t x = 0; x < 4; ++x) {
      CHECK(p.at(x, 0) == 1.0);
      for (std::size_t a = 1; a < 4; ++a) CHECK(p.at(x, a) == 0.0);
    }
  }

  TEST_CASE("maximally correlated shared coin") {
    const auto p = evaluate(validate_network(shared_coin()));
    CHECK(p.at(0, 0) == 0.5);
    CHECK(p.at(0, 1) == 0.0);
    CHECK(p.at(0, 2) == 0.0);
    CHECK(p.at(0, 3) == 0.5);
  }

  TEST_CASE("2x2x2 instance matches its hand-expanded blackbox kernel") {
    // Alice: x=0 outputs r; x=1 outputs 1-r with prob 0.8.
    // Bob:   x=0 outputs r with prob 0.6; x=1 outputs 0.
    const double pa[2][2][2] = {{{1, 0}, {0, 1}}, {{0.2, 0.8}, {0.8, 0.2}}};
    const double pb[2][2][2] = {{{0.6, 0.4}, {0.4, 0.6}}, {{1, 0}, {1, 0}}};
    const double pr[2] = {0.3, 0.7};

    StructuredNetwork s;
    s.sources.push_back({"R", FinitePMF({pr[0], pr[1]}), {0, 1}});
    PartySpec alice{"A", 2, 2, {}}, bob{"B", 2, 2, {}};
    for (int x = 0; x < 2; ++x) {
      alice.strategy.push_back({FinitePMF({pa[x][0][0], pa[x][0][1]}), FinitePMF({pa[x][1][0], pa[x][1][1]})});
      bob.strategy.push_back({FinitePMF({pb[x][0][0], pb[x][0][1]}), FinitePMF({pb[x][1][0], pb[x][1][1]})});
    }
    s.parties = {alice, bob};

    // kernel[x1 x2][r][a1 a2] = pa[x1][r][a1] * pb[x2][r][a2]
    BlackboxNetwork b{4, 4, {{"R", FinitePMF({pr[0], pr[1]}), {}}}, {}};
    for (int x1 = 0; x1 < 2; ++x1) {
      for (int x2 = 0; x2 < 2; ++x2) {
        std::vector<FinitePMF> per_r;
        for (int r = 0; r < 2; ++r) {
          std::vector<double> row;
          for (int a1 = 0; a1 < 2; ++a1) {
            for (int a2 = 0; a2 < 2; ++a2) row.push_back(pa[x1][r][a1] * pb[x2][r][a2]);
          }
          per_r.emplace_back(row);
        }
        b.kernel.push_back(per_r);
      }
    }
    const auto ps = evaluate(validate_network(s));
    const auto pbb = evaluate(validate_network(b));
    check_close(ps, pbb, 1e-12);
    // Spot value: x = (1, 0), a = (1, 1): 0.3*0.8*0.4 + 0.7*0.2*0.6
    CHECK(ps.at(2, 3) == doctest::Approx(0.3 * 0.8 * 0.4 + 0.7 * 0.2 * 0.6).epsilon(1e-14));
  }

  TEST_CASE("enumeration cap") {
    const auto net = validate_network(bell_constant_zero());
    CHECK_THROWS_AS(evaluate(net, {.enumeration_cap = 31}), EnumerationCapExceeded);
    CHECK_NOTHROW(evaluate(net, {.enumeration_cap = 32}));
  }

  TEST_CASE("property: rows are PMFs and evaluator paths agree on 50 random networks") {
    std::mt19937_64 gen(11);
    for (int i = 0; i < 50; ++i) {
      CAPTURE(i);
      const auto spec = randcomp::testing::random_network(gen, 1 + gen() % 3, gen() % 4);
      const auto net = validate_network(spec);
      const auto p = evaluate(net);
      CHECK_NOTHROW(p.check_rows(1e-9));
      check_close(p, evaluate(to_blackbox(net)), 1e-12);
      check_close(p, brute_force_evaluate(spec), 1e-12);
    }
  }

  TEST_CASE("scalar and SIMD evaluation are bit-identical") {
    std::mt19937_64 gen(5);
    const auto net = validate_network(randcomp::testing::random_network(gen, 3, 3, 3, 4));
    kernels::set_force_scalar(true);
    const auto scalar = evaluate(net);
    kernels::set_force_scalar(false);
    const auto dispatched = evaluate(net);
    CHECK(scalar == dispatched);
  }

  TEST_CASE("property: renaming sources (reordering tuples) leaves evaluation unchanged") {
    std::mt19937_64 gen(3);
    for (int i = 0; i < 30; ++i) {
      const auto net = validate_network(randcomp::testing::random_network(gen, 2, 3));
      // Reverse the sort order: S0 -> z2, S1 -> z1, S2 -> z0.
      const auto renamed = rename_sources(net, {{"S0", "z2"}, {"S1", "z1"}, {"S2", "z0"}});
      CHECK(renamed.sources()[0].id == "z0");
      check_close(evaluate(net), evaluate(renamed), 1e-12);
      const auto bb = to_blackbox(net);
      check_close(evaluate(bb), evaluate(rename_sources(bb, {{"S0", "z2"}, {"S2", "z0"}})), 1e-12);
    }
  }
}

TEST_SUITE("infinity_distance") {
  TEST_CASE("examples") {
    const ConditionalDistribution p(1, 2, {1.0, 0.0});
    const ConditionalDistribution q(1, 2, {0.0, 1.0});
    CHECK(infinity_distance(p, p) == 0.0);
    CHECK(infinity_distance(p, q) == 1.0);
    CHECK(infinity_distance(ConditionalDistribution(1, 2, {0.5, 0.5}),
                            ConditionalDistribution(1, 2, {0.25, 0.75})) == 0.25);
  }

  TEST_CASE("shape mismatch") {
    CHECK_THROWS_AS(infinity_distance(ConditionalDistribution(1, 2), ConditionalDistribution(2, 1)),
                    ShapeMismatch);
  }

  TEST_CASE("property: metric axioms on 200 random triples") {
    std::mt19937_64 gen(99);
    for (int i = 0; i < 200; ++i) {
      const std::size_t X = 1 + gen() % 4, A = 1 + gen() % 6;
      const auto p = randcomp::testing::random_table(gen, X, A);
      const auto q = randcomp::testing::random_table(gen, X, A);
      const auto r = randcomp::testing::random_table(gen, X, A);
      const double pq = infinity_distance(p, q);
      CHECK(pq >= 0.0);
      CHECK(pq == infinity_distance(q, p));
      CHECK(infinity_distance(p, p) <= 1e-12);
      if (p != q) CHECK(pq > 0.0);
      CHECK(infinity_distance(p, r) <= pq + infinity_distance(q, r) + 1e-15);
    }
  }
}

TEST_SUITE("product_compose") {
  TEST_CASE("trivial network is an identity element") {
    std::mt19937_64 gen(1);
    const auto n = validate_network(randcomp::testing::random_network(gen, 2, 2));
    const auto composed = product_compose(n, validate_network(trivial_network()));
    CHECK(composed.parties().size() == 3);
    check_close(evaluate(composed), evaluate(n), 0.0);
  }

  TEST_CASE("independent coins factorize, colliding ids are suffixed") {
    const auto c = product_compose(validate_network(single_coin("R")),
                                   validate_network(single_coin("R")));
    REQUIRE(c.sources().size() == 2);
    CHECK(c.sources()[0].id == "R");
    CHECK(c.sources()[1].id == "R_2");
    const auto p = evaluate(c);
    for (std::size_t a = 0; a < 4; ++a) CHECK(p.at(0, a) == 0.25);
  }

  TEST_CASE("suffixing re-sorts n2's tables correctly") {
    // n2 has ids "a" and "a_1"; "a" collides and becomes "a_2", sorting after "a_1".
    StructuredNetwork n2;
    n2.sources.push_back({"a", FinitePMF({0.1, 0.9}), {0}});
    n2.sources.push_back({"a_1", FinitePMF({0.2, 0.3, 0.5}), {0}});
    PartySpec p{"Q", 1, 3, {{}}};
    for (std::size_t x = 0; x < 2; ++x) {
      for (std::size_t y = 0; y < 3; ++y) p.strategy[0].push_back(FinitePMF::point_mass(3, (x + y) % 3));
    }
    n2.parties.push_back(p);
    const auto v2 = validate_network(n2);
    const auto c = product_compose(validate_network(single_coin("a")), v2);
    check_close(evaluate(c), outer_product(evaluate(validate_network(single_coin("a"))), evaluate(v2)),
                1e-12);
  }

  TEST_CASE("property: composition equals the outer product oracle") {
    std::mt19937_64 gen(21);
    for (int i = 0; i < 25; ++i) {
      const auto s1 = randcomp::testing::random_network(gen, 2, 1);
      const auto s2 = randcomp::testing::random_network(gen, 2, 2);
      const auto p1 = brute_force_evaluate(s1);
      const auto p2 = brute_force_evaluate(s2);
      // Outer product by explicit loops.
      ConditionalDistribution expected(p1.inputs() * p2.inputs(), p1.outputs() * p2.outputs());
      for (std::size_t x1 = 0; x1 < p1.inputs(); ++x1)
        for (std::size_t x2 = 0; x2 < p2.inputs(); ++x2)
          for (std::size_t a1 = 0; a1 < p1.outputs(); ++a1)
            for (std::size_t a2 = 0; a2 < p2.outputs(); ++a2)
              expected.at(x1 * p2.inputs() + x2, a1 * p2.outputs() + a2) = p1.at(x1, a1) * p2.at(x2, a2);

      const auto n1 = validate_network(s1), n2 = validate_network(s2);
      check_close(evaluate(product_compose(n1, n2)), expected, 1e-12);
      // Mixed structured / blackbox goes through the kernel path.
      const auto mixed = product_compose(to_blackbox(n1), n2);
      CHECK(mixed.is_blackbox());
      check_close(evaluate(mixed), expected, 1e-12);
    }
  }
}

TEST_CASE("substitute_source re-slices tables onto the new alphabet") {
  std::mt19937_64 gen(8);
  auto spec = randcomp::testing::random_network(gen, 2, 2, 2, 3);
  while (spec.sources[0].pmf.size() != 3) spec = randcomp::testing::random_network(gen, 2, 2, 2, 3);
  spec.sources[0].pmf = FinitePMF({0.2, 0.3, 0.5});
  const auto net = validate_network(spec);
  const std::size_t idx = *net.source_index("S0");
  // Keep values 0 and 2 with new weights.
  const std::vector<std::size_t> keep{0, 2};
  const auto sub = substitute_source(net, idx, FinitePMF({0.4, 0.6}), keep);
  CHECK(sub.sources()[idx].pmf.size() == 2);

  // Oracle: same network with the original alphabet and weights (0.4, 0, 0.6).
  auto zeroed = spec;
  zeroed.sources[0].pmf = FinitePMF({0.4, 0.0, 0.6});
  check_close(evaluate(sub), brute_force_evaluate(zeroed), 1e-12);

  CHECK_THROWS_AS(substitute_source(net, idx, FinitePMF({1.0}), std::vector<std::size_t>{3}),
                  ShapeMismatch);
  CHECK_THROWS_AS(substitute_source(net, 9, FinitePMF({1.0}), std::vector<std::size_t>{0}),
                  SourceNotFound);
}
