#include "gradientlab/chains.hpp"

#include <future>
#include <map>

namespace gradientlab {

const char* to_string(ChainKind k) {
  switch (k) {
  case ChainKind::mod_p_frattini: return "mod_p_frattini";
  case ChainKind::intersected: return "intersected";
  case ChainKind::restricted: return "restricted";
  case ChainKind::custom: return "custom";
  }
  return "?";
}

namespace {

// Exponent m with n = p^m, if any.
std::optional<std::size_t> log_p(std::size_t n, std::uint64_t p) {
  std::size_t m = 0;
  while (n > 1 && n % p == 0) {
    n /= p;
    ++m;
  }
  if (n != 1) return std::nullopt;
  return m;
}

} // namespace

Outcome<SubgroupRecord> mod_p_frattini_step(const GroupPresentation& ambient, SubgroupRecord& h,
                                            std::uint64_t p, const EnumerationLimits& limits,
                                            const ChainCaps& caps) {
  if (!is_prime(p)) throw DomainError(std::to_string(p) + " is not prime");
  if (!same_presentation(ambient, h.table.ambient())) throw DomainError("subgroup is over a different presentation");
  if (!h.normal) throw DomainError("Frattini step needs a normal subgroup");
  if (!log_p(h.index(), p)) throw DomainError("Frattini step needs p-power index");

  const std::size_t d = derived_abelian(h, {p}).d_p(p);
  if (d > caps.max_d_p)
    return Failure{FailureKind::cap_exceeded,
                   "d_p(H) = " + std::to_string(d) + " exceeds cap " + std::to_string(caps.max_d_p)};
  std::size_t target = h.index();
  for (std::size_t i = 0; i < d; ++i) {
    if (target > caps.max_index / p)
      return Failure{FailureKind::cap_exceeded,
                     "[Γ:K] = " + std::to_string(h.index()) + "·" + std::to_string(p) + "^" +
                         std::to_string(d) + " exceeds index cap " + std::to_string(caps.max_index)};
    target *= p;
  }
  const std::size_t rank = ambient.rank();
  if (rank >= 2 && target > (max_generators - 1) / (rank - 1))
    return Failure{FailureKind::cap_exceeded,
                   "a subgroup of index " + std::to_string(target) + " has more than " +
                       std::to_string(max_generators) + " Schreier generators"};

  const auto& gens = h.rs_presentation->generator_words;
  std::vector<Word> relators = ambient.relators();
  for (std::size_t i = 0; i < gens.size(); ++i) {
    relators.push_back(power(gens[i], static_cast<long>(p)));
    for (std::size_t j = i + 1; j < gens.size(); ++j)
      relators.push_back(commutator(gens[i], gens[j]));
  }
  GroupPresentation quotient(ambient.generator_names(), std::move(relators), "quotient");
  auto enumerated = todd_coxeter(quotient, SubgroupSpec{}, limits);
  if (!enumerated) return enumerated.failure();

  auto rows = enumerated.value().rows();
  auto rec = make_record(CosetTable::from_rows(h.table.ambient_ptr(),
                                               std::vector<std::uint32_t>(rows.begin(), rows.end())),
                         "mod-" + std::to_string(p) + " Frattini step");
  if (rec.index() != target)
    throw std::logic_error("Frattini step index " + std::to_string(rec.index()) + " != [Γ:H]·p^d_p = " +
                           std::to_string(target));
  if (!rec.normal || !rec.table.verify()) throw std::logic_error("Frattini step produced a bad table");
  return rec;
}

ChainRecord p_chain(std::shared_ptr<const GroupPresentation> ambient, std::uint64_t p,
                    std::size_t depth, const EnumerationLimits& limits, const ChainCaps& caps) {
  if (!is_prime(p)) throw DomainError(std::to_string(p) + " is not prime");
  if (depth > caps.max_depth)
    throw DomainError("chain depth " + std::to_string(depth) + " exceeds cap " +
                      std::to_string(caps.max_depth));
  ChainRecord chain{ambient, {}, ChainKind::mod_p_frattini, p, std::nullopt, false};
  auto top = todd_coxeter(ambient, SubgroupSpec::whole(*ambient), limits);
  chain.levels.push_back(make_record(std::move(top).value(), "whole group"));
  for (std::size_t k = 0; k < depth; ++k) {
    if (derived_abelian(chain.levels.back(), {p}).d_p(p) == 0) {
      chain.stabilized = true;
      break;
    }
    auto next = mod_p_frattini_step(*ambient, chain.levels.back(), p, limits, caps);
    if (!next) {
      chain.truncated = next.failure();
      break;
    }
    chain.levels.push_back(std::move(next).value());
  }
  derive_levels(chain, {p});
  return chain;
}

ChainRecord p_chain(const GroupPresentation& ambient, std::uint64_t p, std::size_t depth,
                    const EnumerationLimits& limits, const ChainCaps& caps) {
  return p_chain(std::make_shared<const GroupPresentation>(ambient), p, depth, limits, caps);
}

SubgroupRecord intersect(const SubgroupRecord& a, const SubgroupRecord& b) {
  if (!(a.table.ambient() == b.table.ambient()))
    throw DomainError("intersect needs subgroups of the same group");
  const std::size_t cols = a.table.columns();
  const std::size_t nb = b.index();
  std::map<std::uint64_t, std::uint32_t> number;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> order{{0, 0}};
  number[0] = 0;
  std::vector<std::uint32_t> rows;
  for (std::size_t k = 0; k < order.size(); ++k)
    for (std::uint32_t x = 0; x < cols; ++x) {
      Letter l = Letter::from_code(x);
      std::uint32_t i = a.table.image(order[k].first, l), j = b.table.image(order[k].second, l);
      std::uint64_t key = static_cast<std::uint64_t>(i) * nb + j;
      auto [it, fresh] = number.emplace(key, static_cast<std::uint32_t>(order.size()));
      if (fresh) order.emplace_back(i, j);
      rows.push_back(it->second);
    }
  return make_record(CosetTable::from_rows(a.table.ambient_ptr(), std::move(rows)), "intersection");
}

Outcome<CosetTable> restrict_table(const CosetTable& t, const SubgroupSpec& l,
                                   std::shared_ptr<const GroupPresentation> l_pres) {
  if (l.generators.size() != l_pres->rank())
    throw DomainError("subgroup words and subgroup presentation disagree on generator count");
  for (const auto& w : l.generators)
    t.ambient().check_word(w);
  if (l_pres->rank() == 0) return CosetTable(l_pres, {}, {});
  const auto act = to_action(t);
  std::vector<Word> inverses;
  for (const auto& w : l.generators)
    inverses.push_back(invert(w));
  const std::size_t cols = 2 * l_pres->rank();
  std::vector<std::int64_t> number(act.degree, -1);
  std::vector<std::uint32_t> order{0};
  number[0] = 0;
  std::vector<std::uint32_t> rows;
  for (std::size_t k = 0; k < order.size(); ++k)
    for (std::uint32_t x = 0; x < cols; ++x) {
      std::uint32_t g = x >> 1;
      std::uint32_t y = act.apply(order[k], (x & 1u) ? inverses[g] : l.generators[g]);
      if (number[y] < 0) {
        number[y] = static_cast<std::int64_t>(order.size());
        order.push_back(y);
      }
      rows.push_back(static_cast<std::uint32_t>(number[y]));
    }
  auto table = CosetTable::from_rows(l_pres, std::move(rows));
  for (const auto& r : l_pres->relators())
    for (std::uint32_t c = 0; c < table.index(); ++c)
      if (table.trace(c, r) != c)
        return Failure{FailureKind::embedding_violation,
                       "relator " + l_pres->format(r) + " of the subgroup presentation acts "
                       "nontrivially on the orbit of coset 0 (index " + std::to_string(t.index()) + ")"};
  return table;
}

Outcome<ChainRecord> restrict_chain(const ChainRecord& chain, const SubgroupSpec& l,
                                    std::shared_ptr<const GroupPresentation> l_pres) {
  ChainRecord out{l_pres, {}, ChainKind::restricted, chain.prime, chain.truncated, chain.stabilized};
  for (const auto& level : chain.levels) {
    if (!level.normal) throw DomainError("restrict_chain needs normal levels");
    auto t = restrict_table(level.table, l, l_pres);
    if (!t) return t.failure();
    out.levels.push_back(make_record(std::move(t).value(), "restriction of " + level.provenance));
  }
  return out;
}

std::optional<std::string> check_chain(ChainRecord& chain) {
  for (std::size_t k = 0; k < chain.levels.size(); ++k) {
    auto& level = chain.levels[k];
    const std::string at = "level " + std::to_string(k) + ": ";
    if (!level.normal || !is_normal(level.table)) return at + "not normal";
    if (!level.table.verify()) return at + "table fails its closure certificate";
    if (chain.kind == ChainKind::mod_p_frattini && !log_p(level.index(), chain.prime))
      return at + "index " + std::to_string(level.index()) + " is not a power of " +
             std::to_string(chain.prime);
    if (k == 0) continue;
    auto& prev = chain.levels[k - 1];
    for (const auto& w : level.table.subgroup().generators)
      if (prev.table.trace(0, w) != 0) return at + "not contained in the previous level";
    if (level.index() % prev.index() != 0) return at + "index does not divide";
    if (chain.kind != ChainKind::restricted && level.index() <= prev.index())
      return at + "index does not increase";
    if (chain.kind == ChainKind::mod_p_frattini) {
      std::size_t expect = prev.index();
      for (std::size_t i = 0, d = derived_abelian(prev, {chain.prime}).d_p(chain.prime); i < d; ++i)
        expect *= chain.prime;
      if (level.index() != expect) return at + "index is not [Γ:H_k]·p^{d_p(H_k)}";
    }
  }
  return std::nullopt;
}

void derive_levels(ChainRecord& chain, const std::set<std::uint64_t>& primes) {
  std::vector<std::future<void>> jobs;
  for (auto& level : chain.levels)
    jobs.push_back(std::async(std::launch::async, [&level, &primes] { ensure_derived(level, primes); }));
  for (auto& j : jobs)
    j.get();
}

nlohmann::json to_json(const ChainRecord& c, std::uint64_t prime) {
  nlohmann::json levels = nlohmann::json::array();
  for (const auto& level : c.levels) {
    nlohmann::json j = {{"index", level.index()}, {"provenance", level.provenance}};
    nlohmann::json words = nlohmann::json::array();
    const auto& source = level.rs_presentation ? level.rs_presentation->generator_words
                                               : level.table.subgroup().generators;
    for (const auto& w : source)
      words.push_back(c.ambient->format(w));
    j["subgroup_words"] = words;
    if (level.abelian) {
      const std::uint64_t q = prime ? prime : c.prime;
      if (q) j["d_p"] = level.abelian->d_p(q);
      j["d_lower"] = level.abelian->d_lower;
      j["d_upper"] = level.abelian->d_upper;
    }
    levels.push_back(std::move(j));
  }
  nlohmann::json out = {{"ambient", print_presentation(*c.ambient)},
                        {"kind", to_string(c.kind)},
                        {"levels", levels}};
  if (c.prime) out["prime"] = c.prime;
  if (c.stabilized) out["stabilized"] = true;
  if (c.truncated)
    out["truncated"] = {{"kind", to_string(c.truncated->kind)}, {"detail", c.truncated->detail}};
  return out;
}

} // namespace gradientlab
