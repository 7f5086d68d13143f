#include "gradientlab/constructions.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace gradientlab {

std::string to_string(const OrderAssertion& o) {
  return o.infinite ? "inf" : std::to_string(o.order);
}

namespace {

constexpr std::size_t rename_budget = 1000;

Word shift(const Word& w, std::uint32_t offset) {
  std::vector<Letter> out;
  out.reserve(w.size());
  for (Letter l : w)
    out.emplace_back(l.gen() + offset, l.sign());
  return Word(std::move(out));
}

Word substitute(const Word& w, const std::vector<Word>& images) {
  std::vector<Letter> out;
  for (Letter l : w) {
    const Word& img = images.at(l.gen());
    if (l.sign() > 0)
      out.insert(out.end(), img.begin(), img.end());
    else {
      Word inv = invert(img);
      out.insert(out.end(), inv.begin(), inv.end());
    }
  }
  return Word(std::move(out));
}

void check_words(const GroupPresentation& p, const std::vector<Word>& words, const char* what) {
  for (const auto& w : words) {
    try {
      p.check_word(w);
    } catch (const DomainError& e) {
      throw DomainError(std::string(what) + ": " + e.what());
    }
  }
}

void check_a_pres(const std::optional<GroupPresentation>& a_pres, std::size_t count) {
  if (a_pres && a_pres->rank() != count)
    throw DomainError("presentation of A has " + std::to_string(a_pres->rank()) +
                      " generators but " + std::to_string(count) + " identification pairs");
}

bool amenable_from(const std::optional<OrderAssertion>& order, const std::optional<bool>& amenable,
                   bool trivial) {
  if (trivial) return true;
  if (order && !order->infinite) return true;
  return amenable.value_or(false);
}

void require_subgroup_of(const GroupPresentation& constructed, const SubgroupRecord& h) {
  if (!same_presentation(h.table.ambient(), constructed))
    throw DomainError("subgroup is not over the constructed presentation");
  if (!h.normal) throw DomainError("subgroup must be normal");
}

std::vector<std::size_t> orbit_sizes(const FiniteAction& act, const SubgroupSpec& l) {
  auto label = orbits(act, l);
  std::map<std::uint32_t, std::size_t> size;
  for (auto x : label)
    ++size[x];
  std::vector<std::size_t> out;
  for (const auto& [_, n] : size)
    out.push_back(n);
  std::sort(out.begin(), out.end());
  return out;
}

// Relators of A substituted into `words` must lie in H.
std::optional<std::string> relators_hold(const GroupPresentation& a_pres, const std::vector<Word>& words,
                                         const CosetTable& t, const char* side) {
  for (const auto& r : a_pres.relators()) {
    Word w = substitute(r, words);
    for (std::uint32_t c = 0; c < t.index(); ++c)
      if (t.trace(c, w) != c)
        return std::string("relator ") + a_pres.format(r) + " of A fails on the " + side +
               " words in the index-" + std::to_string(t.index()) + " quotient";
  }
  return std::nullopt;
}

std::optional<std::string> order_consistent(const std::optional<GroupPresentation>& a_pres,
                                            const std::optional<OrderAssertion>& a_order,
                                            std::size_t image_size) {
  if (!a_order) return std::nullopt;
  if (!a_order->infinite && a_order->order % image_size != 0)
    return "A acts with an orbit of size " + std::to_string(image_size) + ", which does not divide |A| = " +
           std::to_string(a_order->order);
  if (a_pres) {
    auto enumerated = todd_coxeter(*a_pres, SubgroupSpec{}, EnumerationLimits{100'000, 10'000'000});
    if (enumerated) {
      const std::size_t n = enumerated.value().index();
      if (a_order->infinite || a_order->order != n)
        return "presentation of A defines a group of order " + std::to_string(n) + " but |A| = " +
               to_string(*a_order) + " was asserted";
    }
  }
  return std::nullopt;
}

long as_long(std::size_t v) { return static_cast<long>(v); }

std::size_t d_p_of(SubgroupRecord rec, std::uint64_t p) { return derived_abelian(rec, {p}).d_p(p); }

std::optional<std::size_t> restricted_d_p(const CosetTable& t, const SubgroupSpec& l,
                                          const GroupPresentation& l_pres, std::uint64_t p,
                                          std::string& failure) {
  auto r = restrict_table(t, l, std::make_shared<const GroupPresentation>(l_pres));
  if (!r) {
    failure = r.failure().detail;
    return std::nullopt;
  }
  return d_p_of(make_record(std::move(r).value(), "restriction"), p);
}

} // namespace

void AmalgamSpec::validate() const {
  if (a_words_left.size() != a_words_right.size())
    throw DomainError("amalgam needs as many left words as right words");
  check_words(left, a_words_left, "left word of A");
  check_words(right, a_words_right, "right word of A");
  check_a_pres(a_pres, a_words_left.size());
  if (a_order && !a_order->infinite && a_order->order == 0) throw DomainError("|A| must be positive");
}

bool AmalgamSpec::amenable() const { return amenable_from(a_order, a_amenable, a_trivial()); }

void HnnSpec::validate() const {
  if (a_words.size() != phi_words.size())
    throw DomainError("HNN extension needs as many words for A as for phi(A)");
  check_words(base, a_words, "word of A");
  check_words(base, phi_words, "word of phi(A)");
  check_a_pres(a_pres, a_words.size());
  if (!is_valid_generator_name(stable_letter))
    throw DomainError("invalid stable letter name '" + stable_letter + "'");
  if (base.find(stable_letter))
    throw DomainError("stable letter '" + stable_letter + "' clashes with a generator of the base");
  if (a_order && !a_order->infinite && a_order->order == 0) throw DomainError("|A| must be positive");
}

bool HnnSpec::amenable() const { return amenable_from(a_order, a_amenable, a_trivial()); }

GroupPresentation free_product(const GroupPresentation& p1, const GroupPresentation& p2) {
  std::set<std::string> taken(p1.generator_names().begin(), p1.generator_names().end());
  taken.insert(p2.generator_names().begin(), p2.generator_names().end());
  std::vector<std::string> names = p1.generator_names();
  std::set<std::string> used(names.begin(), names.end());
  for (const auto& n : p2.generator_names()) {
    std::string chosen = n;
    for (std::size_t k = 2; used.count(chosen); ++k) {
      if (k > rename_budget) throw DomainError("cannot rename generator '" + n + "'");
      chosen = n + "_" + std::to_string(k);
      if (taken.count(chosen)) chosen = n;  // keep searching
    }
    used.insert(chosen);
    names.push_back(chosen);
  }
  std::vector<Word> relators = p1.relators();
  const auto offset = static_cast<std::uint32_t>(p1.rank());
  for (const auto& r : p2.relators())
    relators.push_back(shift(r, offset));
  std::string label;
  if (!p1.label().empty() && !p2.label().empty()) label = p1.label() + " * " + p2.label();
  return GroupPresentation(std::move(names), std::move(relators), std::move(label));
}

GroupPresentation amalgam(const AmalgamSpec& spec) {
  spec.validate();
  auto fp = free_product(spec.left, spec.right);
  if (spec.a_trivial()) return fp;
  std::vector<Word> relators = fp.relators();
  const auto offset = static_cast<std::uint32_t>(spec.left.rank());
  for (std::size_t i = 0; i < spec.a_words_left.size(); ++i)
    relators.push_back(multiply(spec.a_words_left[i], invert(shift(spec.a_words_right[i], offset))));
  std::string label;
  if (!spec.left.label().empty() && !spec.right.label().empty())
    label = spec.left.label() + " *_A " + spec.right.label();
  return GroupPresentation(fp.generator_names(), std::move(relators), std::move(label));
}

GroupPresentation hnn(const HnnSpec& spec) {
  spec.validate();
  std::vector<std::string> names = spec.base.generator_names();
  names.push_back(spec.stable_letter);
  const Letter t(static_cast<std::uint32_t>(spec.base.rank()), 1);
  std::vector<Word> relators = spec.base.relators();
  for (std::size_t i = 0; i < spec.a_words.size(); ++i) {
    Word conj = multiply(multiply(Word({t.inverse()}), spec.a_words[i]), Word({t}));
    relators.push_back(multiply(conj, invert(spec.phi_words[i])));
  }
  std::string label = spec.base.label().empty() ? "" : spec.base.label() + " *_A";
  return GroupPresentation(std::move(names), std::move(relators), std::move(label));
}

SubgroupSpec left_factor(const AmalgamSpec& spec) { return SubgroupSpec::whole(spec.left); }

SubgroupSpec right_factor(const AmalgamSpec& spec) {
  SubgroupSpec s;
  const auto offset = static_cast<std::uint32_t>(spec.left.rank());
  for (std::uint32_t g = 0; g < spec.right.rank(); ++g)
    s.generators.push_back(Word({Letter(g + offset, 1)}));
  return s;
}

SubgroupSpec amalgamated_subgroup(const AmalgamSpec& spec) { return SubgroupSpec{spec.a_words_left}; }

SubgroupSpec base_group(const HnnSpec& spec) { return SubgroupSpec::whole(spec.base); }
SubgroupSpec associated_subgroup(const HnnSpec& spec) { return SubgroupSpec{spec.a_words}; }
SubgroupSpec associated_image(const HnnSpec& spec) { return SubgroupSpec{spec.phi_words}; }

KuroshData kurosh_stats(const AmalgamSpec& spec, const SubgroupRecord& h) {
  require_subgroup_of(amalgam(spec), h);
  const auto act = to_action(h.table);
  KuroshData k;
  k.double_cosets_A = orbit_count(act, amalgamated_subgroup(spec));
  const std::size_t dc1 = orbit_count(act, left_factor(spec));
  const std::size_t dc2 = orbit_count(act, right_factor(spec));
  k.double_cosets_factors = {dc1, dc2};
  k.base_piece_counts = {dc1, dc2};
  k.free_generator_count = as_long(k.double_cosets_A) - as_long(dc1) - as_long(dc2) + 1;
  k.amalgamation_bound = dc1 + dc2 - 1;
  return k;
}

KuroshData kurosh_stats(const HnnSpec& spec, const SubgroupRecord& h) {
  require_subgroup_of(hnn(spec), h);
  const auto act = to_action(h.table);
  KuroshData k;
  k.double_cosets_A = orbit_count(act, associated_subgroup(spec));
  const std::size_t dck = orbit_count(act, base_group(spec));
  k.double_cosets_factors = {dck};
  k.base_piece_counts = {dck};
  k.free_generator_count = as_long(k.double_cosets_A) - as_long(dck) + 1;
  k.amalgamation_bound = dck - 1;
  return k;
}

nlohmann::json to_json(const KuroshData& k) {
  return {{"double_cosets_A", k.double_cosets_A},
          {"double_cosets_factors", k.double_cosets_factors},
          {"free_generator_count", k.free_generator_count},
          {"base_piece_counts", k.base_piece_counts},
          {"amalgamation_bound", k.amalgamation_bound}};
}

std::optional<std::string> embedding_suspect(const AmalgamSpec& spec, const SubgroupRecord& h) {
  require_subgroup_of(amalgam(spec), h);
  if (spec.a_trivial()) return std::nullopt;
  const auto act = to_action(h.table);
  SubgroupSpec right_words;
  const auto offset = static_cast<std::uint32_t>(spec.left.rank());
  for (const auto& w : spec.a_words_right)
    right_words.generators.push_back(shift(w, offset));
  if (orbits(act, amalgamated_subgroup(spec)) != orbits(act, right_words))
    return "left and right words of A have different orbits in the index-" +
           std::to_string(h.index()) + " quotient";
  if (spec.a_pres) {
    if (auto m = relators_hold(*spec.a_pres, spec.a_words_left, h.table, "left")) return m;
    if (auto m = relators_hold(*spec.a_pres, right_words.generators, h.table, "right")) return m;
  }
  return order_consistent(spec.a_pres, spec.a_order, orbit_of(act, amalgamated_subgroup(spec)).size());
}

std::optional<std::string> embedding_suspect(const HnnSpec& spec, const SubgroupRecord& h) {
  require_subgroup_of(hnn(spec), h);
  if (spec.a_trivial()) return std::nullopt;
  const auto act = to_action(h.table);
  if (orbit_sizes(act, associated_subgroup(spec)) != orbit_sizes(act, associated_image(spec)))
    return "A and phi(A) have different orbit sizes in the index-" + std::to_string(h.index()) +
           " quotient";
  if (spec.a_pres) {
    if (auto m = relators_hold(*spec.a_pres, spec.a_words, h.table, "A")) return m;
    if (auto m = relators_hold(*spec.a_pres, spec.phi_words, h.table, "phi(A)")) return m;
  }
  return order_consistent(spec.a_pres, spec.a_order, orbit_of(act, associated_subgroup(spec)).size());
}

bool DpBoundsReport::holds() const {
  return std::all_of(checks.begin(), checks.end(), [](const BoundCheck& c) { return c.holds(); });
}

DpBoundsReport dp_bounds_check(const AmalgamSpec& spec, SubgroupRecord& h, std::uint64_t p,
                               const EnumerationLimits&) {
  if (!is_prime(p)) throw DomainError(std::to_string(p) + " is not prime");
  const auto gamma = amalgam(spec);
  require_subgroup_of(gamma, h);
  DpBoundsReport r;
  r.prime = p;
  r.index = h.index();
  r.embedding_suspect = embedding_suspect(spec, h);

  const long d1 = as_long(abelian_data(spec.left, {p}).d_p(p));
  const long d2 = as_long(abelian_data(spec.right, {p}).d_p(p));
  std::optional<long> da;
  if (spec.a_trivial())
    da = 0;
  else if (spec.a_pres)
    da = as_long(abelian_data(*spec.a_pres, {p}).d_p(p));
  else
    r.notes.push_back("no presentation of A, so d_p(A) is unknown");
  if (da)
    r.checks.push_back({"group", d1 + d2 - *da, as_long(abelian_data(gamma, {p}).d_p(p)), d1 + d2});

  const auto k = kurosh_stats(spec, h);
  r.kurosh = k;
  std::string failure;
  auto h1 = restricted_d_p(h.table, left_factor(spec), spec.left, p, failure);
  auto h2 = restricted_d_p(h.table, right_factor(spec), spec.right, p, failure);
  std::optional<long> ha;
  if (spec.a_trivial())
    ha = 0;
  else if (spec.a_pres) {
    if (auto v = restricted_d_p(h.table, amalgamated_subgroup(spec), *spec.a_pres, p, failure))
      ha = as_long(*v);
    else
      r.notes.push_back("d_p(A ∩ H) unavailable: " + failure);
  }
  if (h1 && h2 && ha) {
    const long dc1 = as_long(k.double_cosets_factors[0]), dc2 = as_long(k.double_cosets_factors[1]);
    const long n = k.free_generator_count;
    const long base = dc1 * as_long(*h1) + dc2 * as_long(*h2);
    r.checks.push_back({"subgroup", base - (dc1 + dc2 - 1) * *ha + n * (1 - *ha),
                        as_long(derived_abelian(h, {p}).d_p(p)), base + n});
  }
  return r;
}

DpBoundsReport dp_bounds_check(const HnnSpec& spec, SubgroupRecord& h, std::uint64_t p,
                               const EnumerationLimits&) {
  if (!is_prime(p)) throw DomainError(std::to_string(p) + " is not prime");
  const auto gamma = hnn(spec);
  require_subgroup_of(gamma, h);
  DpBoundsReport r;
  r.prime = p;
  r.index = h.index();
  r.embedding_suspect = embedding_suspect(spec, h);

  const long dk = as_long(abelian_data(spec.base, {p}).d_p(p));
  std::optional<long> da;
  if (spec.a_trivial())
    da = 0;
  else if (spec.a_pres)
    da = as_long(abelian_data(*spec.a_pres, {p}).d_p(p));
  else
    r.notes.push_back("no presentation of A, so d_p(A) is unknown");
  if (da) r.checks.push_back({"group", dk - *da + 1, as_long(abelian_data(gamma, {p}).d_p(p)), dk + 1});

  const auto k = kurosh_stats(spec, h);
  r.kurosh = k;
  std::string failure;
  auto hk = restricted_d_p(h.table, base_group(spec), spec.base, p, failure);
  std::optional<long> ha;
  if (spec.a_trivial())
    ha = 0;
  else if (spec.a_pres) {
    if (auto v = restricted_d_p(h.table, associated_subgroup(spec), *spec.a_pres, p, failure))
      ha = as_long(*v);
    else
      r.notes.push_back("d_p(A ∩ H) unavailable: " + failure);
  }
  if (hk && ha) {
    const long dck = as_long(k.double_cosets_factors[0]);
    const long n = k.free_generator_count;
    const long base = dck * as_long(*hk);
    r.checks.push_back({"subgroup", base - (dck - 1) * *ha + n * (1 - *ha),
                        as_long(derived_abelian(h, {p}).d_p(p)), base + n});
  }
  return r;
}

nlohmann::json to_json(const DpBoundsReport& r) {
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : r.checks)
    checks.push_back({{"scope", c.scope},
                      {"lower", c.lower},
                      {"d_p", c.value},
                      {"upper", c.upper},
                      {"holds", c.holds()}});
  nlohmann::json j = {{"prime", r.prime}, {"index", r.index}, {"checks", checks},
                      {"notes", r.notes}, {"verdict", r.holds() ? "holds" : "violated"}};
  if (r.kurosh) j["kurosh"] = to_json(*r.kurosh);
  if (r.embedding_suspect) j["embedding_suspect"] = *r.embedding_suspect;
  return j;
}

// ---- .amal / .hnn files ----

namespace {

struct Stanzas {
  std::map<std::string, std::vector<detail::Statement>> sections;
  std::map<std::string, detail::Statement> headers;
  std::optional<detail::Statement> pairs;
  std::optional<detail::Statement> stable;
  std::optional<detail::Statement> assertion;
};

Stanzas split_stanzas(std::string_view text, const std::set<std::string>& allowed,
                      const std::string& pair_key) {
  Stanzas out;
  std::string current;
  for (auto& st : detail::split_statements(text)) {
    if (allowed.count(st.key)) {
      if (!st.value.empty())
        throw ParseError("section header '" + st.key + ":' takes no value", st.line, st.column);
      if (out.headers.count(st.key))
        throw ParseError("duplicate section '" + st.key + ":'", st.line, st.key_column);
      current = st.key;
      out.headers[st.key] = st;
      out.sections[st.key];
    } else if (st.key == "gens" || st.key == "rels" || st.key == "name") {
      if (current.empty()) throw ParseError("'" + st.key + ":' outside a section", st.line, st.key_column);
      out.sections[current].push_back(st);
    } else if (st.key == pair_key || st.key == "stable" || st.key == "assert") {
      auto& slot = st.key == pair_key ? out.pairs : st.key == "stable" ? out.stable : out.assertion;
      if (slot) throw ParseError("duplicate '" + st.key + ":' line", st.line, st.key_column);
      slot = st;
      current.clear();
    } else {
      throw ParseError("unknown key '" + st.key + "'", st.line, st.key_column);
    }
  }
  return out;
}

GroupPresentation section(const Stanzas& s, const std::string& key) {
  auto h = s.headers.find(key);
  if (h == s.headers.end()) throw ParseError("missing section '" + key + ":'", 1, 1);
  return detail::presentation_from_statements(s.sections.at(key), h->second.line, h->second.key_column);
}

std::string_view trim_view(std::string_view v, std::size_t* lead) {
  std::size_t b = 0, e = v.size();
  while (b < e && std::isspace(static_cast<unsigned char>(v[b])))
    ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(v[e - 1])))
    --e;
  *lead = b;
  return v.substr(b, e - b);
}

// `u = v, ...` as word pairs over (lhs, rhs).
void parse_pairs(const detail::Statement& st, const std::vector<std::string>& lhs,
                 const std::vector<std::string>& rhs, std::vector<Word>& left, std::vector<Word>& right) {
  std::string_view v = st.value;
  if (v.empty()) return;
  std::size_t pos = 0;
  while (pos <= v.size()) {
    std::size_t comma = v.find(',', pos);
    if (comma == std::string_view::npos) comma = v.size();
    std::string_view item = v.substr(pos, comma - pos);
    std::size_t eq = item.find('=');
    if (eq == std::string_view::npos) throw ParseError("expected 'u = v'", st.line, st.column + pos);
    std::size_t l1 = 0, l2 = 0;
    auto a = trim_view(item.substr(0, eq), &l1);
    auto b = trim_view(item.substr(eq + 1), &l2);
    left.push_back(detail::parse_word_at(a, lhs, st.line, st.column + pos + l1));
    right.push_back(detail::parse_word_at(b, rhs, st.line, st.column + pos + eq + 1 + l2));
    pos = comma + 1;
  }
}

void parse_assertion(const detail::Statement& st, std::optional<OrderAssertion>& order,
                     std::optional<bool>& amenable) {
  std::string_view v = st.value;
  std::size_t pos = 0;
  while (pos <= v.size()) {
    std::size_t comma = v.find(',', pos);
    if (comma == std::string_view::npos) comma = v.size();
    std::size_t lead = 0;
    auto item = trim_view(v.substr(pos, comma - pos), &lead);
    const std::size_t col = st.column + pos + lead;
    std::size_t eq = item.find('=');
    if (eq == std::string_view::npos) throw ParseError("expected 'key=value'", st.line, col);
    std::size_t l1 = 0, l2 = 0;
    auto key = trim_view(item.substr(0, eq), &l1);
    auto val = trim_view(item.substr(eq + 1), &l2);
    const std::size_t vcol = col + eq + 1 + l2;
    if (key == "|A|") {
      if (val == "inf" || val == "infinite") {
        order = OrderAssertion{true, 0};
      } else {
        std::size_t n = 0;
        if (val.empty() || val.size() > 18 ||
            !std::all_of(val.begin(), val.end(), [](char c) { return c >= '0' && c <= '9'; }))
          throw ParseError("|A| must be a positive integer or 'inf'", st.line, vcol);
        for (char c : val)
          n = n * 10 + static_cast<std::size_t>(c - '0');
        if (n == 0) throw ParseError("|A| must be positive", st.line, vcol);
        order = OrderAssertion{false, n};
      }
    } else if (key == "amenable") {
      if (val == "true")
        amenable = true;
      else if (val == "false")
        amenable = false;
      else
        throw ParseError("amenable must be true or false", st.line, vcol);
    } else {
      throw ParseError("unknown assertion '" + std::string(key) + "'", st.line, col + l1);
    }
    pos = comma + 1;
  }
}

template <class F>
auto rethrow_as_parse_error(const detail::Statement& st, F&& f) {
  try {
    return f();
  } catch (const ParseError&) {
    throw;
  } catch (const DomainError& e) {
    throw ParseError(e.what(), st.line, st.key_column);
  }
}

} // namespace

AmalgamSpec parse_amalgam_spec(std::string_view text) {
  auto s = split_stanzas(text, {"left", "right", "A"}, "amalgam");
  AmalgamSpec spec{section(s, "left"), section(s, "right"), {}, {}, std::nullopt, std::nullopt, std::nullopt};
  if (s.headers.count("A")) spec.a_pres = section(s, "A");
  if (s.stable) throw ParseError("'stable:' only applies to HNN extensions", s.stable->line, s.stable->key_column);
  if (s.pairs)
    parse_pairs(*s.pairs, spec.left.generator_names(), spec.right.generator_names(), spec.a_words_left,
                spec.a_words_right);
  if (s.assertion) parse_assertion(*s.assertion, spec.a_order, spec.a_amenable);
  if (spec.a_trivial() && !spec.a_order) spec.a_order = OrderAssertion{false, 1};
  const auto& where = s.pairs ? *s.pairs : s.headers.at("left");
  rethrow_as_parse_error(where, [&] {
    spec.validate();
    return 0;
  });
  return spec;
}

HnnSpec parse_hnn_spec(std::string_view text) {
  auto s = split_stanzas(text, {"base", "A"}, "hnn");
  HnnSpec spec{section(s, "base"), {}, {}, std::nullopt, std::nullopt, std::nullopt, "t"};
  if (s.headers.count("A")) spec.a_pres = section(s, "A");
  if (s.stable) spec.stable_letter = s.stable->value;
  if (s.pairs)
    parse_pairs(*s.pairs, spec.base.generator_names(), spec.base.generator_names(), spec.a_words,
                spec.phi_words);
  if (s.assertion) parse_assertion(*s.assertion, spec.a_order, spec.a_amenable);
  if (spec.a_trivial() && !spec.a_order) spec.a_order = OrderAssertion{false, 1};
  const auto& where = s.stable ? *s.stable : s.pairs ? *s.pairs : s.headers.at("base");
  rethrow_as_parse_error(where, [&] {
    spec.validate();
    return 0;
  });
  return spec;
}

} // namespace gradientlab
