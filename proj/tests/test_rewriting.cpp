#include "doctest.h"

#include <random>

#include "gradientlab/abelian.hpp"
#include "gradientlab/low_index.hpp"
#include "gradientlab/rewriting.hpp"
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

std::vector<Integer> nontrivial_factors(const AbelianData& a) {
  std::vector<Integer> out;
  for (const auto& f : a.invariant_factors)
    if (f != 1) out.push_back(f);
  return out;
}

std::size_t group_order(const GroupPresentation& p) {
  auto out = todd_coxeter(p, SubgroupSpec{});
  REQUIRE(out.ok());
  return out.value().index();
}

} // namespace

TEST_CASE("Schreier transversal and generator count") {
  auto p = pres("gens: a, b, c");
  for (const auto& rec : low_index_normal_subgroups(p, 4).value()) {
    auto sd = schreier_transversal(rec.table);
    const std::size_t k = rec.index();
    CHECK(sd.transversal.size() == k);
    CHECK(sd.transversal[0].empty());
    CHECK(sd.schreier_generators.size() == k * 3 - (k - 1));
    for (std::uint32_t c = 0; c < k; ++c)
      CHECK(rec.table.trace(0, sd.transversal[c]) == c);
    // each Schreier generator word lies in the subgroup
    for (const auto& w : schreier_generator_words(sd, rec.table.rows()))
      CHECK(rec.table.trace(0, w) == 0);
  }
}

TEST_CASE("subgroups of finite groups: rewritten presentations have the right order") {
  struct Case {
    const char* group;
    const char* sub;
  };
  std::vector<Case> cases = {
      {"gens: a, b; rels: a^3, b^2, (a b)^2", "sub: a"},
      {"gens: a, b; rels: a^3, b^2, (a b)^2", "sub: b"},
      {"gens: a, b; rels: a^2, b^3, (a b)^5", "sub: b"},
      {"gens: a, b; rels: a^2, b^3, (a b)^5", "sub: a, b a b^-1"},
      {"gens: a, b; rels: a^4, b^2, (a b)^2", "sub: a^2"},
      {"gens: a, b; rels: a^2, b^3, (a b)^4", "sub: b, a b a"},
  };
  for (const auto& c : cases) {
    auto p = pres(c.group);
    auto t = enumerate(p, c.sub);
    const std::size_t order = group_order(*p);
    auto rs = reidemeister_schreier(*p, t);
    CHECK(rs.presentation.rank() == t.index() * 2 - (t.index() - 1));
    CHECK(group_order(rs.presentation) * t.index() == order);
    auto simplified = subgroup_presentation(t);
    CHECK(simplified.presentation.rank() <= rs.presentation.rank());
    CHECK(simplified.presentation.rank() == simplified.generator_words.size());
    CHECK(group_order(simplified.presentation) * t.index() == order);
    CHECK(nontrivial_factors(abelian_data(simplified.presentation)) ==
          nontrivial_factors(abelian_data(rs.presentation)));
    // surviving generators are words of the ambient group lying in the subgroup
    SubgroupSpec gens{simplified.generator_words};
    for (const auto& w : gens.generators)
      CHECK(t.trace(0, w) == 0);
    // and they generate it
    auto regen = todd_coxeter(p, gens);
    REQUIRE(regen.ok());
    CHECK(regen.value().index() == t.index());
  }
}

TEST_CASE("normal subgroups of free groups are free of the Schreier rank") {
  for (std::size_t r : {2, 3}) {
    auto f = std::make_shared<const GroupPresentation>(GroupPresentation::free_group(r));
    for (const auto& rec : low_index_normal_subgroups(f, 6).value()) {
      auto sp = subgroup_presentation(rec.table);
      const std::size_t k = rec.index();
      CHECK(sp.presentation.rank() == k * (r - 1) + 1);
      CHECK(sp.presentation.relators().empty());
    }
  }
}

TEST_CASE("Z/2 * Z/3 index 6 normal subgroups are free of rank 2") {
  auto p = pres("gens: a, b; rels: a^2, b^3");
  auto subs = low_index_normal_subgroups(p, 6).value();
  std::size_t found = 0;
  for (auto& rec : subs) {
    if (rec.index() != 6) continue;
    ++found;
    auto sp = subgroup_presentation(rec.table);
    CHECK(sp.presentation.rank() == 2);
    CHECK(sp.presentation.relators().empty());
    auto ab = abelian_data(sp.presentation);
    CHECK(ab.d_lower == 2);
    CHECK(ab.d_upper == 2);
  }
  CHECK(found == 2);
}

TEST_CASE("transversal choice does not change the subgroup invariants") {
  auto p = pres("gens: a, b; rels: a^2, b^3, (a b)^7");
  auto tables = low_index_normal_subgroups(pres("gens: a, b; rels: a b a^-1 b^-1"), 12).value();
  for (auto& rec : tables) {
    auto base = abelian_data(reidemeister_schreier(rec.table.ambient(), rec.table).presentation);
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      auto sd = schreier_transversal_randomized(rec.table, seed);
      CHECK(sd.schreier_generators.size() == rec.index() + 1);
      auto other = abelian_data(reidemeister_schreier(rec.table.ambient(), rec.table, sd).presentation);
      CHECK(nontrivial_factors(other) == nontrivial_factors(base));
    }
  }
}

TEST_CASE("Tietze moves preserve abelian invariants on random presentations") {
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 100; ++trial) {
    std::size_t rank = 1 + rng() % 4;
    std::vector<std::string> names;
    for (std::size_t i = 0; i < rank; ++i)
      names.push_back("x" + std::to_string(i));
    std::vector<Word> rels;
    for (std::size_t r = 0, n = rng() % 5; r < n; ++r) {
      std::vector<Letter> w;
      for (std::size_t i = 0, len = 1 + rng() % 8; i < len; ++i)
        w.push_back(Letter::from_code(static_cast<std::uint32_t>(rng() % (2 * rank))));
      rels.emplace_back(w);
    }
    GroupPresentation p(names, rels);
    auto q = tietze_simplify(p);
    CHECK(q.rank() <= p.rank());
    CHECK(nontrivial_factors(abelian_data(q)) == nontrivial_factors(abelian_data(p)));
  }
}

TEST_CASE("Tietze removes trivial and redundant generators") {
  auto q = tietze_simplify(parse_presentation("gens: a, b, c; rels: c, a b^-1, a^5"));
  CHECK(q.rank() == 1);
  CHECK(q.relators().size() == 1);
  CHECK(q.relators()[0].size() == 5);
}
