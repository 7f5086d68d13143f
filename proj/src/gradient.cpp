#include "gradientlab/gradient.hpp"

#include <sstream>

namespace gradientlab {

std::string to_string(const Rational& q) { return q.get_str(); }

std::string to_string(const RationalInterval& i) {
  if (i.exact()) return to_string(i.lo);
  return "[" + to_string(i.lo) + ", " + to_string(i.hi) + "]";
}

Mode Mode::rg_p(std::uint64_t p) {
  if (!is_prime(p)) throw DomainError(std::to_string(p) + " is not prime");
  return {GradientMode::rg_p, p};
}

std::string Mode::name() const {
  return kind == GradientMode::rg ? "RG" : "RG_p(" + std::to_string(prime) + ")";
}

RationalInterval gradient_value(std::size_t d_lo, std::size_t d_hi, std::size_t index) {
  if (index == 0) throw DomainError("index must be positive");
  if (d_lo > d_hi) throw DomainError("d interval is empty");
  const Integer idx(std::to_string(index));
  Rational lo(Integer(std::to_string(d_lo)) - 1, idx), hi(Integer(std::to_string(d_hi)) - 1, idx);
  lo.canonicalize();
  hi.canonicalize();
  return {lo, hi};
}

const char* to_string(VerdictStatus s) {
  switch (s) {
  case VerdictStatus::consistent: return "consistent";
  case VerdictStatus::violated: return "violated";
  case VerdictStatus::inconclusive: return "inconclusive";
  }
  return "?";
}

FormulaVerdict compare(std::string formula, const RationalInterval& lhs, const RationalInterval& rhs) {
  FormulaVerdict v{std::move(formula), lhs, rhs, VerdictStatus::consistent, ""};
  if (lhs.hi < rhs.lo) {
    v.status = VerdictStatus::violated;
    v.message = "LHS upper bound " + to_string(lhs.hi) + " is below RHS lower bound " + to_string(rhs.lo);
  } else if (lhs.exact() && rhs.exact() && lhs.lo == rhs.lo) {
    v.message = "exact agreement at " + to_string(lhs.lo);
  } else if (lhs.lo > rhs.hi) {
    v.message = "LHS estimate exceeds RHS by at least " + to_string(Rational(lhs.lo - rhs.hi)) +
                "; finite data approaches the infimum from above";
  } else {
    v.message = "intervals overlap";
  }
  return v;
}

namespace {

bool is_p_power(std::size_t n, std::uint64_t p) {
  while (n > 1 && n % p == 0)
    n /= p;
  return n == 1;
}

const std::string infimum_label = "chain infimum (an upper bound for the true infimum)";

RationalInterval min_interval(const RationalInterval& a, const RationalInterval& b) {
  return {std::min(a.lo, b.lo), std::min(a.hi, b.hi)};
}

Rational reciprocal_order(const OrderAssertion& o) {
  if (o.infinite) return 0;
  return Rational(1, Integer(std::to_string(o.order)));
}

std::string amenability_note() {
  return "A is not asserted amenable; the amalgam identity can fail without it "
         "(`gradientlab example45` shows a naive value below any possible gradient)";
}

} // namespace

bool GradientReport::non_increasing() const {
  for (std::size_t k = 1; k < levels.size(); ++k)
    if (levels[k].value.hi > levels[k - 1].value.hi || levels[k].value.lo > levels[k - 1].value.lo)
      return false;
  return true;
}

GradientReport rg_sequence(ChainRecord& chain, Mode mode) {
  GradientReport r;
  r.group = print_presentation(*chain.ambient);
  r.chain_kind = chain.kind;
  r.chain_prime = chain.prime;
  r.truncated = chain.truncated;
  r.stabilized = chain.stabilized;
  r.mode = mode;
  std::set<std::uint64_t> primes;
  if (mode.kind == GradientMode::rg_p) {
    if (!is_prime(mode.prime)) throw DomainError(std::to_string(mode.prime) + " is not prime");
    primes.insert(mode.prime);
    for (const auto& level : chain.levels)
      if (!level.normal || !is_p_power(level.index(), mode.prime))
        throw DomainError("p-gradient needs normal levels of " + std::to_string(mode.prime) +
                          "-power index; got index " + std::to_string(level.index()));
  }
  derive_levels(chain, primes);
  for (auto& level : chain.levels) {
    const auto& ab = derived_abelian(level, primes);
    LevelValue v;
    v.index = level.index();
    if (mode.kind == GradientMode::rg_p) {
      v.d_lo = v.d_hi = ab.d_p(mode.prime);
    } else {
      v.d_lo = ab.d_lower;
      v.d_hi = ab.d_upper;
    }
    v.value = gradient_value(v.d_lo, v.d_hi, v.index);
    if (v.value.lo < -1) throw std::logic_error("gradient value below -1");
    v.running_inf = r.running_inf ? min_interval(*r.running_inf, v.value) : v.value;
    r.running_inf = v.running_inf;
    v.provenance = level.provenance;
    r.levels.push_back(std::move(v));
  }
  return r;
}

Outcome<AbsoluteUpper> rg_absolute_upper(const GroupPresentation& p, std::size_t max_index, Mode mode,
                                         const EnumerationLimits& limits) {
  auto subs = low_index_normal_subgroups(p, max_index, limits);
  if (!subs) return subs.failure();
  AbsoluteUpper out;
  out.mode = mode;
  out.max_index = max_index;
  std::set<std::uint64_t> primes;
  if (mode.kind == GradientMode::rg_p) primes.insert(mode.prime);
  bool first = true;
  for (auto rec : std::move(subs).value()) {
    if (mode.kind == GradientMode::rg_p && !is_p_power(rec.index(), mode.prime)) continue;
    const auto& ab = derived_abelian(rec, primes);
    const std::size_t lo = mode.kind == GradientMode::rg_p ? ab.d_p(mode.prime) : ab.d_lower;
    const std::size_t hi = mode.kind == GradientMode::rg_p ? ab.d_p(mode.prime) : ab.d_upper;
    auto v = gradient_value(lo, hi, rec.index());
    ++out.subgroups;
    if (first || v.hi < out.family_inf.hi) {
      out.witness_index = rec.index();
      out.witness_d_lower = lo;
      out.witness_d_upper = hi;
      out.witness_words.clear();
      for (const auto& w : rec.rs_presentation->generator_words)
        out.witness_words.push_back(p.format(w));
    }
    out.family_inf = first ? v : min_interval(out.family_inf, v);
    first = false;
  }
  if (first) throw std::logic_error("the whole group is always in the family");
  out.upper = out.family_inf.hi;
  return out;
}

Outcome<RationalInterval> gradient_estimate(const GroupPresentation& p, const VerifyOptions& opt) {
  if (opt.mode.kind == GradientMode::rg) {
    auto a = rg_absolute_upper(p, opt.max_index, opt.mode, opt.limits);
    if (!a) return a.failure();
    return a.value().family_inf;
  }
  auto chain = p_chain(p, opt.mode.prime, opt.depth, opt.limits, opt.caps);
  return *rg_sequence(chain, opt.mode).running_inf;
}

Outcome<FormulaVerdict> verify_free_product(const GroupPresentation& p1, const GroupPresentation& p2,
                                            const VerifyOptions& opt) {
  auto lhs = gradient_estimate(free_product(p1, p2), opt);
  if (!lhs) return lhs.failure();
  auto r1 = gradient_estimate(p1, opt);
  if (!r1) return r1.failure();
  auto r2 = gradient_estimate(p2, opt);
  if (!r2) return r2.failure();
  const std::string g = opt.mode.name();
  return compare(g + "(G1 * G2) = " + g + "(G1) + " + g + "(G2) + 1", lhs.value(),
                 r1.value() + r2.value() + RationalInterval::point(1));
}

std::vector<std::string> hypotheses(const AmalgamSpec& spec) {
  std::vector<std::string> out = {"the chain intersects trivially (user-asserted, not verifiable from finitely many levels)"};
  out.push_back(spec.a_order ? "|A| = " + to_string(*spec.a_order) + " (user-asserted)" : "|A| not asserted");
  if (spec.a_amenable) out.push_back(std::string("A amenable = ") + (*spec.a_amenable ? "true" : "false") + " (user-asserted)");
  return out;
}

std::vector<std::string> hypotheses(const HnnSpec& spec) {
  std::vector<std::string> out = {"the chain intersects trivially (user-asserted, not verifiable from finitely many levels)"};
  out.push_back(spec.a_order ? "|A| = " + to_string(*spec.a_order) + " (user-asserted)" : "|A| not asserted");
  if (spec.a_amenable) out.push_back(std::string("A amenable = ") + (*spec.a_amenable ? "true" : "false") + " (user-asserted)");
  return out;
}

namespace {

template <class Spec>
Outcome<FormulaVerdict> verify_graph_of_groups(const Spec& spec, ChainRecord& chain, Mode mode,
                                               const GroupPresentation& constructed,
                                               const std::vector<std::pair<SubgroupSpec, GroupPresentation>>& pieces,
                                               std::string formula) {
  if (!same_presentation(*chain.ambient, constructed)) throw DomainError("chain is not over the constructed presentation");
  auto lhs_report = rg_sequence(chain, mode);
  RationalInterval rhs = RationalInterval::point(spec.a_order ? reciprocal_order(*spec.a_order) : Rational(0));
  for (const auto& [words, pres] : pieces) {
    auto restricted = restrict_chain(chain, words, std::make_shared<const GroupPresentation>(pres));
    if (!restricted) return restricted.failure();
    auto rc = std::move(restricted).value();
    auto part = rg_sequence(rc, mode);
    if (!part.running_inf) return FormulaVerdict{formula, {}, {}, VerdictStatus::inconclusive, "empty chain"};
    rhs = rhs + *part.running_inf;
  }
  if (!lhs_report.running_inf)
    return FormulaVerdict{formula, {}, rhs, VerdictStatus::inconclusive, "empty chain"};
  auto v = compare(std::move(formula), *lhs_report.running_inf, rhs);
  for (const auto& level : chain.levels)
    if (auto why = embedding_suspect(spec, level)) {
      v.status = VerdictStatus::inconclusive;
      v.message = "EmbeddingSuspect: " + *why;
      return v;
    }
  if (!spec.a_order) {
    v.status = VerdictStatus::inconclusive;
    v.message = "|A| was not asserted, so 1/|A| is unknown";
  } else if (!spec.amenable()) {
    v.status = VerdictStatus::inconclusive;
    v.message = amenability_note();
  }
  return v;
}

} // namespace

Outcome<FormulaVerdict> verify_amalgam(const AmalgamSpec& spec, ChainRecord& chain, Mode mode) {
  const std::string g = mode.name();
  return verify_graph_of_groups(spec, chain, mode, amalgam(spec),
                                {{left_factor(spec), spec.left}, {right_factor(spec), spec.right}},
                                g + "(G, {H_n}) = " + g + "(G1, {G1 ∩ H_n}) + " + g +
                                    "(G2, {G2 ∩ H_n}) + 1/|A|");
}

Outcome<FormulaVerdict> verify_hnn(const HnnSpec& spec, ChainRecord& chain, Mode mode) {
  const std::string g = mode.name();
  return verify_graph_of_groups(spec, chain, mode, hnn(spec), {{base_group(spec), spec.base}},
                                g + "(G, {H_n}) = " + g + "(K, {K ∩ H_n}) + 1/|A|");
}

Example45 example_4_5_report(std::uint64_t r) {
  if (r == 0) throw DomainError("r must be at least 1");
  Example45 e;
  e.r = r;
  const Integer rm1 = Integer(std::to_string(r)) - 1;
  e.rg_a = Rational(rm1);
  e.rg_left = Rational(rm1, 2);
  e.rg_left.canonicalize();
  e.rg_right = Rational(rm1, 3);
  e.rg_right.canonicalize();
  e.naive = e.rg_left + e.rg_right - e.rg_a;
  e.below_universal_bound = e.naive < -1;
  e.below_infinite_bound = e.naive < 0;
  std::ostringstream note;
  note << "RG(F_r x Z/2) + RG(F_r x Z/3) - RG(F_r) = " << to_string(e.naive) << " = -(r-1)/6. ";
  if (r == 1) {
    note << "Degenerate case: F_1 is amenable and every term vanishes.";
  } else {
    note << "Every finitely generated group has RG >= -1, with equality only for the trivial group, "
            "and this amalgam is infinite, so its RG is >= 0. ";
    if (e.below_universal_bound)
      note << "The naive value is below -1, so RG(G) != RG(G1) + RG(G2) - RG(A) here.";
    else
      note << "The naive value is negative, so RG(G) != RG(G1) + RG(G2) - RG(A) here.";
  }
  e.note = note.str();
  return e;
}

Rational example_4_5(std::uint64_t r) { return example_4_5_report(r).naive; }

nlohmann::json to_json(const RationalInterval& i) { return {{"lo", to_string(i.lo)}, {"hi", to_string(i.hi)}}; }

nlohmann::json to_json(const FormulaVerdict& v) {
  return {{"formula", v.formula},
          {"lhs", to_json(v.lhs)},
          {"rhs", to_json(v.rhs)},
          {"status", to_string(v.status)},
          {"message", v.message}};
}

nlohmann::json to_json(const GradientReport& r) {
  nlohmann::json levels = nlohmann::json::array();
  for (std::size_t k = 0; k < r.levels.size(); ++k) {
    const auto& l = r.levels[k];
    levels.push_back({{"level", k},
                      {"index", l.index},
                      {"d_lo", l.d_lo},
                      {"d_hi", l.d_hi},
                      {"value", to_json(l.value)},
                      {"running_inf", to_json(l.running_inf)},
                      {"provenance", l.provenance}});
  }
  nlohmann::json chain = {{"kind", to_string(r.chain_kind)}, {"levels", r.levels.size()}};
  if (r.chain_prime) chain["prime"] = r.chain_prime;
  if (r.stabilized) chain["stabilized"] = true;
  if (r.truncated) chain["truncated"] = {{"kind", to_string(r.truncated->kind)}, {"detail", r.truncated->detail}};
  nlohmann::json verdicts = nlohmann::json::array();
  for (const auto& v : r.verdicts)
    verdicts.push_back(to_json(v));
  nlohmann::json j = {{"schema", 1},
                      {"group", r.group},
                      {"chain", chain},
                      {"mode", r.mode.name()},
                      {"levels", levels},
                      {"verdicts", verdicts},
                      {"hypotheses", r.hypotheses}};
  if (r.running_inf) {
    j["running_inf"] = to_json(*r.running_inf);
    j["running_inf_label"] = infimum_label;
  } else {
    j["running_inf"] = nullptr;
  }
  return j;
}

nlohmann::json to_json(const AbsoluteUpper& a) {
  return {{"mode", a.mode.name()},
          {"max_index", a.max_index},
          {"subgroups", a.subgroups},
          {"skipped", a.skipped},
          {"family_inf", to_json(a.family_inf)},
          {"upper_bound", to_string(a.upper)},
          {"label", "minimum over normal subgroups of index <= max_index (an upper bound for the absolute gradient)"},
          {"witness", {{"index", a.witness_index},
                       {"d_lower", a.witness_d_lower},
                       {"d_upper", a.witness_d_upper},
                       {"generators", a.witness_words}}}};
}

nlohmann::json to_json(const Example45& e) {
  return {{"r", e.r},
          {"rg_left", to_string(e.rg_left)},
          {"rg_right", to_string(e.rg_right)},
          {"rg_a", to_string(e.rg_a)},
          {"naive", to_string(e.naive)},
          {"below_universal_bound", e.below_universal_bound},
          {"below_infinite_group_bound", e.below_infinite_bound},
          {"note", e.note}};
}

std::string to_csv(const GradientReport& r) {
  std::ostringstream out;
  out << "level,index,d_lo,d_hi,value_lo,value_hi,running_inf_lo,running_inf_hi\n";
  for (std::size_t k = 0; k < r.levels.size(); ++k) {
    const auto& l = r.levels[k];
    out << k << ',' << l.index << ',' << l.d_lo << ',' << l.d_hi << ',' << to_string(l.value.lo) << ','
        << to_string(l.value.hi) << ',' << to_string(l.running_inf.lo) << ',' << to_string(l.running_inf.hi)
        << '\n';
  }
  return out.str();
}

} // namespace gradientlab
