#include "doctest.h"

#include "gradientlab/constructions.hpp"
#include "oracles.hpp"

using namespace gradientlab;

namespace {

const char* trefoil_text = R"(
left:
gens: a
right:
gens: b
A:
gens: c
amalgam: a^2 = b^3
assert: |A|=inf, amenable=true
)";

const char* z4z4_text = R"(
left:
gens: a
rels: a^4
right:
gens: b
rels: b^4
A:
gens: c
rels: c^2
amalgam: a^2 = b^2
assert: |A|=2
)";

const char* z2_hnn_text = R"(
base:
gens: a
A:
gens: c
hnn: a = a
assert: |A|=inf, amenable=true
)";

std::vector<oracle::Perm> permutations(const CosetTable& t) {
  std::vector<oracle::Perm> out;
  for (std::uint32_t g = 0; g < t.ambient().rank(); ++g) {
    oracle::Perm p(t.index());
    for (std::uint32_t c = 0; c < t.index(); ++c)
      p[c] = t.image(c, Letter(g, 1));
    out.push_back(p);
  }
  return out;
}

// Orbit count of the subgroup generated by `words`, by permutation group closure.
std::size_t oracle_orbits(const CosetTable& t, const std::vector<Word>& words) {
  auto gens = permutations(t);
  std::vector<oracle::Perm> sub;
  for (const auto& w : words)
    sub.push_back(oracle::evaluate(w, gens, t.index()));
  if (sub.empty()) return t.index();
  return oracle::orbit_count(sub, t.index());
}

} // namespace

TEST_CASE("free products") {
  auto z2 = parse_presentation("gens: a; rels: a^2");
  auto z3 = parse_presentation("gens: b; rels: b^3");
  CHECK(free_product(z2, z3) == parse_presentation("gens: a, b; rels: a^2, b^3"));
  CHECK(free_product(GroupPresentation::free_group(1), GroupPresentation::free_group(1, "y")).with_label("") ==
        parse_presentation("gens: x0, y0"));

  auto clash = free_product(z2, parse_presentation("gens: a, a_2; rels: a^3"));
  CHECK(clash.generator_names() == std::vector<std::string>{"a", "a_3", "a_2"});
  CHECK(clash.format(clash.relators()[1]) == "a_3^3");

  // d_p is additive over free factors
  for (std::uint64_t p : {2, 3, 5}) {
    auto x = parse_presentation("gens: a, b; rels: a^6, b^4 a b^-4 a^-1");
    auto y = parse_presentation("gens: c; rels: c^15");
    CHECK(abelian_data(free_product(x, y), {p}).d_p(p) ==
          abelian_data(x, {p}).d_p(p) + abelian_data(y, {p}).d_p(p));
  }
}

TEST_CASE("amalgams and HNN extensions") {
  auto trefoil = parse_amalgam_spec(trefoil_text);
  auto g = amalgam(trefoil);
  CHECK(g.format(g.relators()[0]) == "a^2*b^-3");
  auto snf = oracle::invariant_factors_by_minors({{2, -3}});
  CHECK(abelian_data(g).invariant_factors == std::vector<Integer>{snf[0], 0});
  CHECK(abelian_data(g).d_lower == 1);
  CHECK(abelian_data(g).torsion_free_rank == 1);

  auto z4 = amalgam(parse_amalgam_spec(z4z4_text));
  CHECK(z4 == parse_presentation("gens: a, b; rels: a^4, b^4, a^2 b^-2"));

  AmalgamSpec trivial{parse_presentation("gens: a; rels: a^2"), parse_presentation("gens: b; rels: b^3"),
                      {}, {}, std::nullopt, std::nullopt, std::nullopt};
  CHECK(amalgam(trivial) == free_product(trivial.left, trivial.right));

  auto z2 = hnn(parse_hnn_spec(z2_hnn_text));
  CHECK(z2.generator_names() == std::vector<std::string>{"a", "t"});
  CHECK(abelian_data(z2).invariant_factors == std::vector<Integer>{0, 0});

  HnnSpec bs{parse_presentation("gens: a"), {parse_word("a", parse_presentation("gens: a"))},
             {parse_word("a^2", parse_presentation("gens: a"))}, std::nullopt, std::nullopt, std::nullopt, "t"};
  auto bs12 = hnn(bs);
  CHECK(bs12.format(bs12.relators()[0]) == "t^-1*a*t*a^-2");

  HnnSpec free_hnn{parse_presentation("gens: a; rels: a^3"), {}, {}, std::nullopt, std::nullopt, std::nullopt, "t"};
  CHECK(hnn(free_hnn) == free_product(free_hnn.base, parse_presentation("gens: t")));

  HnnSpec clash = free_hnn;
  clash.stable_letter = "a";
  CHECK_THROWS_AS(hnn(clash), DomainError);
}

TEST_CASE("spec file errors") {
  CHECK_THROWS_AS(parse_amalgam_spec("left:\ngens: a\nright:\ngens: b\namalgam: a = c"), ParseError);
  CHECK_THROWS_AS(parse_amalgam_spec("left:\ngens: a\namalgam: a = a"), ParseError);
  CHECK_THROWS_AS(parse_amalgam_spec("gens: a"), ParseError);
  CHECK_THROWS_AS(parse_amalgam_spec("left:\ngens: a\nright:\ngens: b\namalgam: a b"), ParseError);
  CHECK_THROWS_AS(parse_amalgam_spec("left:\ngens: a\nright:\ngens: b\namalgam: a = b\nassert: |A|=0"),
                  ParseError);
  CHECK_THROWS_AS(parse_amalgam_spec("left:\ngens: a\nright:\ngens: b\nA:\ngens: c, d\namalgam: a = b"),
                  ParseError);
  CHECK_THROWS_AS(parse_hnn_spec("base:\ngens: a, t\nhnn: a = a"), ParseError);
  CHECK_THROWS_AS(parse_hnn_spec("base:\ngens: a\nhnn: a = a\nassert: amenable=maybe"), ParseError);
  try {
    parse_amalgam_spec("left:\ngens: a\nright:\ngens: b\namalgam: a^2 = b^x");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 5);
    CHECK(e.column() == 18);
  }
  auto h = parse_hnn_spec("base:\ngens: a\nhnn: a = a^2\nstable: s");
  CHECK(h.stable_letter == "s");
  CHECK_FALSE(h.a_order);
  CHECK_FALSE(h.amenable());
  CHECK(parse_hnn_spec("base:\ngens: a").a_order == OrderAssertion{false, 1});
}

TEST_CASE("Kurosh statistics on explicit quotients") {
  auto trefoil = parse_amalgam_spec(trefoil_text);
  auto g = std::make_shared<const GroupPresentation>(amalgam(trefoil));

  // H = Γ
  auto whole = make_record(todd_coxeter(g, SubgroupSpec::whole(*g)).value(), "whole");
  auto k0 = kurosh_stats(trefoil, whole);
  CHECK(k0.double_cosets_A == 1);
  CHECK(k0.free_generator_count == 0);
  CHECK(k0.amalgamation_bound == 1);

  // kernel of a -> 3, b -> 2 in Z/6
  auto t = todd_coxeter(g, parse_subgroup_spec("sub: a^2, b^3, a^-1 b^-1 a b, a^-1 b a b^-1", *g)).value();
  REQUIRE(t.index() == 6);
  auto h = make_record(t, "Z/6 kernel");
  auto k = kurosh_stats(trefoil, h);
  std::vector<oracle::Perm> z6 = {{3, 4, 5, 0, 1, 2}, {2, 3, 4, 5, 0, 1}};
  CHECK(oracle::orbit_count({z6[0]}, 6) == 3);
  CHECK(k.double_cosets_factors == std::vector<std::size_t>{3, 2});
  CHECK(k.double_cosets_A == 6);
  CHECK(k.free_generator_count == 2);
  CHECK(k.amalgamation_bound == 4);

  // Z^2 as an HNN extension of Z, H = 2Z x 2Z
  auto zz = parse_hnn_spec(z2_hnn_text);
  auto gz = std::make_shared<const GroupPresentation>(hnn(zz));
  auto hz = make_record(todd_coxeter(gz, parse_subgroup_spec("sub: a^2, t^2, a t a^-1 t^-1", *gz)).value(), "");
  REQUIRE(hz.index() == 4);
  auto kz = kurosh_stats(zz, hz);
  CHECK(kz.double_cosets_A == 2);
  CHECK(kz.double_cosets_factors == std::vector<std::size_t>{2});
  CHECK(kz.free_generator_count == 1);

  auto kw = kurosh_stats(zz, make_record(todd_coxeter(gz, SubgroupSpec::whole(*gz)).value(), ""));
  CHECK(kw.free_generator_count == 1);
}

TEST_CASE("Kurosh identity over every low-index normal subgroup") {
  for (const char* text : {trefoil_text, z4z4_text}) {
    auto spec = parse_amalgam_spec(text);
    auto g = std::make_shared<const GroupPresentation>(amalgam(spec));
    auto subs = low_index_normal_subgroups(g, 12);
    REQUIRE(subs.ok());
    CHECK(subs.value().size() > 3);
    for (const auto& h : subs.value()) {
      auto k = kurosh_stats(spec, h);
      const auto dca = oracle_orbits(h.table, spec.a_words_left);
      const auto dc1 = oracle_orbits(h.table, left_factor(spec).generators);
      const auto dc2 = oracle_orbits(h.table, right_factor(spec).generators);
      CHECK(k.double_cosets_A == dca);
      CHECK(k.double_cosets_factors == std::vector<std::size_t>{dc1, dc2});
      CHECK(k.free_generator_count == static_cast<long>(dca) - static_cast<long>(dc1 + dc2) + 1);
      CHECK(k.free_generator_count >= 0);
      CHECK_FALSE(embedding_suspect(spec, h));
    }
  }
  auto zz = parse_hnn_spec(z2_hnn_text);
  auto gz = std::make_shared<const GroupPresentation>(hnn(zz));
  for (const auto& h : low_index_normal_subgroups(gz, 12).value()) {
    auto k = kurosh_stats(zz, h);
    const auto dca = oracle_orbits(h.table, zz.a_words);
    const auto dck = oracle_orbits(h.table, base_group(zz).generators);
    CHECK(k.free_generator_count == static_cast<long>(dca) - static_cast<long>(dck) + 1);
    CHECK(k.free_generator_count >= 0);
  }
}

TEST_CASE("d_p sandwich") {
  auto z4 = parse_amalgam_spec(z4z4_text);
  auto g = std::make_shared<const GroupPresentation>(amalgam(z4));
  // d_2 of the whole group via the minors oracle: rank of the relation matrix mod 2
  auto factors = oracle::invariant_factors_by_minors({{4, 0}, {0, 4}, {2, -2}});
  std::size_t even = 0;
  for (const auto& f : factors)
    even += f % 2 == 0;
  for (auto& h : low_index_normal_subgroups(g, 12).value()) {
    auto r = dp_bounds_check(z4, h, 2);
    REQUIRE(r.checks.size() == 2);
    CHECK(r.checks[0].lower == 1);
    CHECK(r.checks[0].value == static_cast<long>(even));
    CHECK(r.checks[0].upper == 2);
    CHECK(r.holds());
    CHECK_FALSE(r.embedding_suspect);
  }

  auto zz = parse_hnn_spec(z2_hnn_text);
  auto gz = std::make_shared<const GroupPresentation>(hnn(zz));
  for (auto& h : low_index_normal_subgroups(gz, 9).value()) {
    for (std::uint64_t p : {2, 3}) {
      auto r = dp_bounds_check(zz, h, p);
      REQUIRE(r.checks.size() == 2);
      CHECK(r.checks[0].lower == 1);
      CHECK(r.checks[0].value == 2);
      CHECK(r.checks[0].upper == 2);
      CHECK(r.holds());
    }
  }

  // free product: both bounds collapse to additivity
  AmalgamSpec fp{parse_presentation("gens: a; rels: a^2"), parse_presentation("gens: b; rels: b^2"),
                 {}, {}, std::nullopt, OrderAssertion{false, 1}, std::nullopt};
  auto gf = std::make_shared<const GroupPresentation>(amalgam(fp));
  auto whole = make_record(todd_coxeter(gf, SubgroupSpec::whole(*gf)).value(), "");
  auto r = dp_bounds_check(fp, whole, 2);
  CHECK(r.checks[0].lower == 2);
  CHECK(r.checks[0].upper == 2);
  CHECK(r.checks[0].value == 2);
}

TEST_CASE("embedding suspicions") {
  auto bad = parse_amalgam_spec(R"(
left:
gens: a
rels: a^4
right:
gens: b
rels: b^4
A:
gens: c
rels: c^3
amalgam: a^2 = b^2
assert: |A|=3
)");
  auto g = std::make_shared<const GroupPresentation>(amalgam(bad));
  bool flagged = false;
  for (auto& h : low_index_normal_subgroups(g, 8).value())
    flagged |= embedding_suspect(bad, h).has_value();
  CHECK(flagged);

  auto wrong_order = parse_amalgam_spec(z4z4_text);
  wrong_order.a_order = OrderAssertion{true, 0};
  auto g2 = std::make_shared<const GroupPresentation>(amalgam(wrong_order));
  auto whole = make_record(todd_coxeter(g2, SubgroupSpec::whole(*g2)).value(), "");
  CHECK(embedding_suspect(wrong_order, whole).has_value());
}
