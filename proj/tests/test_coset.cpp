#include "doctest.h"

#include "gradientlab/coset_table.hpp"
#include "oracles.hpp"

using namespace gradientlab;

namespace {

std::shared_ptr<const GroupPresentation> pres(const char* text) {
  return std::make_shared<const GroupPresentation>(parse_presentation(text));
}

CosetTable enumerate(const std::shared_ptr<const GroupPresentation>& p, const char* sub = "sub:") {
  auto out = todd_coxeter(p, parse_subgroup_spec(sub, *p));
  REQUIRE(out.ok());
  return out.value();
}

} // namespace

TEST_CASE("small enumerations") {
  auto z2 = pres("gens: a; rels: a^2");
  auto t = enumerate(z2);
  CHECK(t.index() == 2);
  CHECK(t.verify());
  CHECK(t.is_standard());

  auto z2z3 = pres("gens: a, b; rels: a^2, b^3");
  CHECK(enumerate(z2z3, "sub: a, b a b^-1, b^-1 a b").index() == 3);
  CHECK(enumerate(z2z3, "sub: b, a b a^-1").index() == 2);
  CHECK_FALSE(todd_coxeter(z2z3, parse_subgroup_spec("sub: a", *z2z3), EnumerationLimits{5000, 1'000'000}).ok());
  CHECK(enumerate(z2z3, "sub: a, b").index() == 1);

  auto z2sq = pres("gens: a, b; rels: a b a^-1 b^-1");
  CHECK(enumerate(z2sq, "sub: a^2, b^3").index() == 6);
  CHECK(enumerate(z2sq, "sub: a^2 b^2, b^4").index() == 8);

  auto trivial_rank = pres("gens:");
  CHECK(enumerate(trivial_rank).index() == 1);
}

TEST_CASE("finite groups match a faithful permutation representation") {
  struct Case {
    const char* text;
    std::vector<oracle::Perm> gens;
  };
  std::vector<Case> cases = {
      {"gens: a, b; rels: a^3, b^2, (a b)^2", {oracle::cycle(3, {0, 1, 2}), oracle::cycle(3, {0, 1})}},
      {"gens: a, b; rels: a^2, b^2, (a b)^5", {oracle::Perm{0, 4, 3, 2, 1}, oracle::Perm{1, 0, 4, 3, 2}}},
      {"gens: a, b; rels: a^2, b^3, (a b)^5",
       {oracle::Perm{1, 0, 3, 2, 4}, oracle::Perm{0, 2, 4, 3, 1}}},
      {"gens: a, b; rels: a^4, b^2, (a b)^2", {oracle::cycle(4, {0, 1, 2, 3}), oracle::cycle(4, {1, 3})}},
  };
  for (const auto& c : cases) {
    auto p = pres(c.text);
    auto group = oracle::make_group(c.gens);
    // the generating permutations must satisfy the relators
    for (const auto& r : p->relators()) {
      auto img = oracle::evaluate(r, c.gens, c.gens[0].size());
      for (std::uint32_t i = 0; i < img.size(); ++i)
        REQUIRE(img[i] == i);
    }
    auto t = enumerate(p);
    CHECK(t.index() == group.order());
    CHECK(t.verify());
    CHECK(is_normal(t));
  }
}

TEST_CASE("limits give Indeterminate") {
  auto f2 = pres("gens: a, b");
  auto out = todd_coxeter(f2, SubgroupSpec{}, EnumerationLimits{1000, 100'000'000});
  REQUIRE_FALSE(out.ok());
  CHECK(out.failure().kind == FailureKind::indeterminate);

  auto z = pres("gens: a, b; rels: a b a^-1 b^-1");
  auto out2 = todd_coxeter(z, parse_subgroup_spec("sub: a", *z), EnumerationLimits{2'000'000, 5000});
  REQUIRE_FALSE(out2.ok());
  CHECK(out2.failure().kind == FailureKind::indeterminate);
}

TEST_CASE("tables are canonical and survive serialization") {
  auto p = pres("gens: a, b; rels: a^2, b^3, (a b)^5");
  auto t = enumerate(p, "sub: b");
  CHECK(t.index() == 20);
  auto rows = std::vector<std::uint32_t>(t.rows().begin(), t.rows().end());
  CHECK(standardize(rows, t.columns()) == rows);
  auto back = coset_table_from_json(to_json(t), p);
  CHECK(back == t);
  CHECK(back.verify());
  CHECK_FALSE(is_normal(t));
  // renumbering from another base coset gives a standard table of a conjugate
  auto other = standardize(rows, t.columns(), 7);
  CHECK(other.size() == rows.size());
  CHECK(CosetTable::from_rows(p, other).verify());
}

TEST_CASE("orbit counts agree with explicit permutation group closure") {
  auto p = pres("gens: a, b; rels: a^2, b^3, (a b)^5");
  auto t = enumerate(p, "sub: b");
  auto act = to_action(t);
  std::vector<std::vector<const char*>> subs = {{"a"}, {"b"}, {"a", "b a b^-1"}, {"a b"}, {}};
  for (const auto& names : subs) {
    std::string text = "sub:";
    for (std::size_t i = 0; i < names.size(); ++i)
      text += std::string(i ? ", " : " ") + names[i];
    auto l = parse_subgroup_spec(text, *p);
    std::vector<oracle::Perm> gens;
    for (const auto& w : l.generators) {
      oracle::Perm perm(act.degree);
      for (std::uint32_t x = 0; x < act.degree; ++x)
        perm[x] = act.apply(x, w);
      gens.push_back(perm);
    }
    std::size_t expected = gens.empty() ? act.degree : oracle::orbit_count(gens, act.degree);
    CHECK(orbit_count(act, l) == expected);
    auto orb = orbit_of(act, l, 0);
    auto all = orbits(act, l);
    std::size_t same = 0;
    for (std::uint32_t x = 0; x < act.degree; ++x)
      same += all[x] == all[0];
    CHECK(orb.size() == same);
  }
}

TEST_CASE("trace and image") {
  auto p = pres("gens: a, b; rels: a^2, b^3");
  auto t = enumerate(p, "sub: a, b a b^-1, b^-1 a b");
  CHECK(t.trace(0, parse_word("a", *p)) == 0);
  CHECK(t.trace(0, parse_word("b^3", *p)) == 0);
  CHECK(t.trace(0, parse_word("b", *p)) != 0);
  for (std::uint32_t c = 0; c < t.index(); ++c)
    for (std::uint32_t code = 0; code < t.columns(); ++code) {
      Letter l = Letter::from_code(code);
      CHECK(t.image(t.image(c, l), l.inverse()) == c);
    }
}
