#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gradientlab/constructions.hpp"

namespace gradientlab {

struct RationalInterval {
  Rational lo;
  Rational hi;

  static RationalInterval point(const Rational& v) { return {v, v}; }
  bool exact() const { return lo == hi; }
  bool contains(const Rational& v) const { return lo <= v && v <= hi; }
  friend RationalInterval operator+(const RationalInterval& a, const RationalInterval& b) {
    return {a.lo + b.lo, a.hi + b.hi};
  }
  friend bool operator==(const RationalInterval& a, const RationalInterval& b) {
    return a.lo == b.lo && a.hi == b.hi;
  }
};

std::string to_string(const Rational& q);
std::string to_string(const RationalInterval& i);

enum class GradientMode { rg, rg_p };

struct Mode {
  GradientMode kind = GradientMode::rg;
  std::uint64_t prime = 0;

  static Mode rg() { return {}; }
  static Mode rg_p(std::uint64_t p);
  std::string name() const;  // "RG" or "RG_p(p)"
};

// (d - 1) / index for a d-interval [d_lo, d_hi].
RationalInterval gradient_value(std::size_t d_lo, std::size_t d_hi, std::size_t index);

struct LevelValue {
  std::size_t index = 1;
  std::size_t d_lo = 0;
  std::size_t d_hi = 0;  // equal to d_lo in RG_p mode
  RationalInterval value;
  RationalInterval running_inf;
  std::string provenance;
};

enum class VerdictStatus { consistent, violated, inconclusive };
const char* to_string(VerdictStatus s);

struct FormulaVerdict {
  std::string formula;
  RationalInterval lhs;
  RationalInterval rhs;
  VerdictStatus status = VerdictStatus::inconclusive;
  std::string message;
};

// LHS and RHS are both estimates from finite data that approach their true
// values from above, so only LHS.hi < RHS.lo contradicts the identity.
// Otherwise the verdict is consistent and the message records any gap.
FormulaVerdict compare(std::string formula, const RationalInterval& lhs, const RationalInterval& rhs);

struct GradientReport {
  std::string group;  // printed presentation of the ambient group
  ChainKind chain_kind = ChainKind::custom;
  std::uint64_t chain_prime = 0;
  std::optional<Failure> truncated;
  bool stabilized = false;
  Mode mode;
  std::vector<LevelValue> levels;
  std::optional<RationalInterval> running_inf;  // empty chain: none
  std::vector<FormulaVerdict> verdicts;
  std::vector<std::string> hypotheses;

  // RG_p values along the chain never increase (exact comparison).
  bool non_increasing() const;
};

// Per-level values and the running chain infimum. The infimum is only that of
// the chain; it is an upper bound for the true gradient.
GradientReport rg_sequence(ChainRecord& chain, Mode mode);

struct AbsoluteUpper {
  Mode mode;
  std::size_t max_index = 0;
  std::size_t subgroups = 0;  // normal subgroups contributing
  std::size_t skipped = 0;    // entries without usable data
  RationalInterval family_inf;  // [min lo, min hi] over the family
  Rational upper;               // family_inf.hi: upper bound on the absolute gradient
  std::size_t witness_index = 0;
  std::size_t witness_d_lower = 0;
  std::size_t witness_d_upper = 0;
  std::vector<std::string> witness_words;
};

// Minimum of (d - 1)/[Γ:H] over the normal subgroups of index <= max_index
// (p-power index only in RG_p mode). Ties pick the first subgroup in
// canonical order.
Outcome<AbsoluteUpper> rg_absolute_upper(const GroupPresentation& p, std::size_t max_index, Mode mode,
                                         const EnumerationLimits& limits = {});

struct VerifyOptions {
  Mode mode;
  std::size_t max_index = 12;  // RG mode: family of normal subgroups
  std::size_t depth = 4;       // RG_p mode: mod-p chain depth
  EnumerationLimits limits;
  ChainCaps caps;
};

// Estimate of a gradient from finite data: the family bound in RG mode, the
// chain infimum in RG_p mode.
Outcome<RationalInterval> gradient_estimate(const GroupPresentation& p, const VerifyOptions& opt);

// RG(Γ₁ ∗ Γ₂) against RG(Γ₁) + RG(Γ₂) + 1.
Outcome<FormulaVerdict> verify_free_product(const GroupPresentation& p1, const GroupPresentation& p2,
                                            const VerifyOptions& opt);

// Chain over the constructed group against the restricted chains plus 1/|A|
// (0 when A is infinite).
Outcome<FormulaVerdict> verify_amalgam(const AmalgamSpec& spec, ChainRecord& chain, Mode mode);
Outcome<FormulaVerdict> verify_hnn(const HnnSpec& spec, ChainRecord& chain, Mode mode);

std::vector<std::string> hypotheses(const AmalgamSpec& spec);
std::vector<std::string> hypotheses(const HnnSpec& spec);

struct Example45 {
  std::uint64_t r = 0;
  Rational rg_left;   // RG(F_r × Z/2) = (r-1)/2
  Rational rg_right;  // RG(F_r × Z/3) = (r-1)/3
  Rational rg_a;      // RG(F_r) = r-1
  Rational naive;     // rg_left + rg_right - rg_a
  bool below_universal_bound = false;  // naive < -1
  bool below_infinite_bound = false;   // naive < 0, while the amalgam is infinite
  std::string note;
};

// The naive amalgam formula RG₁ + RG₂ − RG(A) for Γ₁ = F_r × Z/2,
// Γ₂ = F_r × Z/3, A = F_r. Requires r >= 1.
Example45 example_4_5_report(std::uint64_t r);
Rational example_4_5(std::uint64_t r);

nlohmann::json to_json(const RationalInterval& i);
nlohmann::json to_json(const FormulaVerdict& v);
nlohmann::json to_json(const GradientReport& r);
nlohmann::json to_json(const AbsoluteUpper& a);
nlohmann::json to_json(const Example45& e);
std::string to_csv(const GradientReport& r);

} // namespace gradientlab
