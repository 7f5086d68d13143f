#include "doctest.h"

#include <random>

#include "gradientlab/chains.hpp"
#include "gradientlab/cost.hpp"
#include "gradientlab/low_index.hpp"
#include "oracles.hpp"

using namespace gradientlab;

namespace {

Rational q(long n, long d = 1) {
  Rational r(n, d);
  r.canonicalize();
  return r;
}

std::vector<oracle::Perm> perms_of(const FiniteAction& act) {
  std::vector<oracle::Perm> out;
  for (const auto& p : act.permutations)
    out.push_back(oracle::Perm(p.begin(), p.end()));
  return out;
}

// Orbit data of <l> computed through the generated permutation group.
struct OracleOrbits {
  std::size_t count;
  std::size_t orbit_of_zero;
};

OracleOrbits oracle_orbits(const FiniteAction& act, const SubgroupSpec& l) {
  const auto gens = perms_of(act);
  std::vector<oracle::Perm> images;
  for (const auto& w : l.generators)
    images.push_back(oracle::evaluate(w, gens, act.degree));
  std::set<std::uint32_t> zero;
  for (const auto& g : oracle::generated_group(images, act.degree))
    zero.insert(g[0]);
  return {oracle::orbit_count(images, act.degree), zero.size()};
}

} // namespace

TEST_CASE("orbit relation cost on the six-coset example") {
  auto p = std::make_shared<const GroupPresentation>(parse_presentation("gens: a, b; rels: a^2, b^3"));
  auto subs = low_index_normal_subgroups(p, 6).value();
  std::size_t seen = 0;
  for (const auto& h : subs) {
    if (h.index() != 6) continue;
    ++seen;
    auto act = to_action(h.table);
    auto r = orbit_relation_cost(act, parse_subgroup_spec("sub: b", *p));
    CHECK(r.orbit_count == 2);
    CHECK(r.min_cost == q(2, 3));
    CHECK(r.predicted == q(2, 3));
    CHECK(r.match);
    CHECK(r.transitive_cost_minus_one == q(-1, 6));

    CHECK(orbit_relation_cost(act, SubgroupSpec{}).min_cost == 0);
    CHECK(orbit_relation_cost(act, SubgroupSpec{}).match);
    auto whole = orbit_relation_cost(act, SubgroupSpec::whole(*p));
    CHECK(whole.min_cost == q(5, 6));
    CHECK(whole.match);

    auto audit = greedy_graphing_audit(act, parse_subgroup_spec("sub: b", *p), 100, 0);
    CHECK(audit.passed());
    CHECK(audit.min_observed >= q(2, 3));
    CHECK(audit.forest_only > 0);
    CHECK(audit.min_observed == q(2, 3));
  }
  CHECK(seen == 2);
}

TEST_CASE("the identity needs a normal subgroup") {
  // Stabilizer of a point for a -> (1 2), b -> (0 1 2): index 3, not normal.
  auto p = std::make_shared<const GroupPresentation>(parse_presentation("gens: a, b; rels: a^2, b^3"));
  auto t = todd_coxeter(p, parse_subgroup_spec("sub: a, b a b, b^-1 a b^-1", *p)).value();
  REQUIRE(t.index() == 3);
  REQUIRE_FALSE(is_normal(t));
  auto act = to_action(t);
  bool some_mismatch = false;
  for (const char* l : {"a", "b a b^-1", "b^-1 a b"}) {
    auto r = orbit_relation_cost(act, parse_subgroup_spec(std::string("sub: ") + l, *p));
    CHECK(r.min_cost == q(1, 3));
    some_mismatch |= !r.match;
  }
  CHECK(some_mismatch);
}

TEST_CASE("cost identity against the permutation oracle") {
  struct Case {
    const char* group;
    std::size_t max_index;
    std::vector<const char*> ls;
  };
  std::vector<Case> cases = {
      {"gens: a, b; rels: a^2, b^3", 12, {"a", "b", "a b", "b a b^-1", "a, b^-1 a b"}},
      {"gens: a, b", 4, {"a", "b", "a b^-1", "a^2, b"}},
      {"gens: a, b; rels: a b a^-1 b^-1", 8, {"a", "b", "a b", "a^2 b^3"}},
      {"gens: a, b; rels: a^4, b^4, a^2 b^-2", 8, {"a", "b", "a^2", "a b"}},
  };
  std::size_t triples = 0;
  for (const auto& c : cases) {
    auto p = std::make_shared<const GroupPresentation>(parse_presentation(c.group));
    for (const auto& h : low_index_normal_subgroups(p, c.max_index).value()) {
      auto act = to_action(h.table);
      for (const char* lw : c.ls) {
        auto l = parse_subgroup_spec(std::string("sub: ") + lw, *p);
        auto r = orbit_relation_cost(act, l);
        auto o = oracle_orbits(act, l);
        CHECK(r.orbit_count == o.count);
        CHECK(r.min_cost == q(static_cast<long>(act.degree - o.count), static_cast<long>(act.degree)));
        CHECK(r.predicted == 1 - q(1, static_cast<long>(o.orbit_of_zero)));
        CHECK(r.match);
        CHECK(graphs_orbit_relation(spanning_forest(act, l), act, l));
        ++triples;
      }
    }
  }
  CHECK(triples >= 20);
}

TEST_CASE("graphing audit") {
  auto p = std::make_shared<const GroupPresentation>(parse_presentation("gens: a, b; rels: a b a^-1 b^-1"));
  auto chain = p_chain(p, 2, 2);
  auto act = to_action(chain.levels.back().table);  // 16 points
  auto l = parse_subgroup_spec("sub: a", *p);
  auto a1 = greedy_graphing_audit(act, l, 200, 7);
  auto a2 = greedy_graphing_audit(act, l, 200, 7);
  CHECK(to_json(a1).dump() == to_json(a2).dump());
  CHECK(a1.passed());
  CHECK(a1.min_cost == q(3, 4));
  std::size_t total = 0;
  for (auto [extra, n] : a1.extra_edges) {
    CHECK(extra <= 3);
    total += n;
  }
  CHECK(total == 200);
  CHECK(a1.forest_only == a1.extra_edges[0]);
  // each extra edge adds 1/16
  auto top = a1.extra_edges.rbegin()->first;
  CHECK(a1.max_observed == a1.min_cost + q(static_cast<long>(top), 16));
  CHECK(a1.min_observed == a1.min_cost + q(static_cast<long>(a1.extra_edges.begin()->first), 16));
  CHECK(to_json(greedy_graphing_audit(act, l, 200, 8)).dump() != to_json(a1).dump());
  CHECK_THROWS_AS(greedy_graphing_audit(act, l, 0, 0), DomainError);

  FiniteGraphing broken{act.degree, spanning_forest(act, l).edges};
  broken.edges.pop_back();
  CHECK_FALSE(graphs_orbit_relation(broken, act, l));
  broken.edges.emplace_back(0, act.apply(0, parse_word("b", *p)));
  CHECK_FALSE(graphs_orbit_relation(broken, act, l));
}

TEST_CASE("minimal cost grows down a chain") {
  auto p = std::make_shared<const GroupPresentation>(parse_presentation("gens: a, b; rels: a b a^-1 b^-1"));
  auto chain = p_chain(p, 2, 4);
  auto l = parse_subgroup_spec("sub: a", *p);
  Rational prev = -1;
  long k = 1;
  for (const auto& h : chain.levels) {
    auto r = orbit_relation_cost(to_action(h.table), l);
    CHECK(r.match);
    CHECK(r.min_cost == 1 - q(1, k));
    CHECK(r.min_cost >= prev);
    prev = r.min_cost;
    k *= 2;
  }
}
