#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gradientlab/chains.hpp"

namespace gradientlab {

// A user assertion about |A|. Finite groups are amenable.
struct OrderAssertion {
  bool infinite = false;
  std::size_t order = 1;

  friend bool operator==(const OrderAssertion&, const OrderAssertion&) = default;
};

std::string to_string(const OrderAssertion& o);

// Γ₁ ∗_A Γ₂ where A is generated by a_words_left in Γ₁ and, identified
// letter by letter, a_words_right in Γ₂.
struct AmalgamSpec {
  GroupPresentation left;
  GroupPresentation right;
  std::vector<Word> a_words_left;
  std::vector<Word> a_words_right;
  std::optional<GroupPresentation> a_pres;
  std::optional<OrderAssertion> a_order;  // nullopt: not asserted
  std::optional<bool> a_amenable;

  void validate() const;
  bool a_trivial() const { return a_words_left.empty(); }
  bool amenable() const;
};

// ⟨K, t | t⁻¹ a_i t = φ(a_i)⟩.
struct HnnSpec {
  GroupPresentation base;
  std::vector<Word> a_words;
  std::vector<Word> phi_words;
  std::optional<GroupPresentation> a_pres;
  std::optional<OrderAssertion> a_order;
  std::optional<bool> a_amenable;
  std::string stable_letter = "t";

  void validate() const;
  bool a_trivial() const { return a_words.empty(); }
  bool amenable() const;
};

// Γ₁ ∗ Γ₂. Generators of p2 that clash with p1 are renamed name_2, name_3, ...
GroupPresentation free_product(const GroupPresentation& p1, const GroupPresentation& p2);
GroupPresentation amalgam(const AmalgamSpec& spec);
GroupPresentation hnn(const HnnSpec& spec);

// Words of the constructed group for the pieces. Left generators keep their
// ids; right generators follow them; the stable letter is last.
SubgroupSpec left_factor(const AmalgamSpec& spec);
SubgroupSpec right_factor(const AmalgamSpec& spec);
SubgroupSpec amalgamated_subgroup(const AmalgamSpec& spec);
SubgroupSpec base_group(const HnnSpec& spec);
SubgroupSpec associated_subgroup(const HnnSpec& spec);
SubgroupSpec associated_image(const HnnSpec& spec);

// Double-coset counts |H\Γ/X| for a finite-index normal H, read off as
// X-orbit counts on Γ/H.
struct KuroshData {
  std::size_t double_cosets_A = 0;
  std::vector<std::size_t> double_cosets_factors;  // (Γ₁, Γ₂) or (K)
  long free_generator_count = 0;                   // n
  std::vector<std::size_t> base_piece_counts;
  std::size_t amalgamation_bound = 0;  // only this bound is known, not the exact count
};

KuroshData kurosh_stats(const AmalgamSpec& spec, const SubgroupRecord& h);
KuroshData kurosh_stats(const HnnSpec& spec, const SubgroupRecord& h);
nlohmann::json to_json(const KuroshData& k);

// Finite-quotient sanity check that A sits in both sides the same way. The
// embedding itself is undecidable; a mismatch only proves it fails.
std::optional<std::string> embedding_suspect(const AmalgamSpec& spec, const SubgroupRecord& h);
std::optional<std::string> embedding_suspect(const HnnSpec& spec, const SubgroupRecord& h);

struct BoundCheck {
  std::string scope;  // "group" or "subgroup"
  long lower = 0;
  long value = 0;
  long upper = 0;
  bool holds() const { return lower <= value && value <= upper; }
};

struct DpBoundsReport {
  std::uint64_t prime = 0;
  std::size_t index = 1;
  std::vector<BoundCheck> checks;
  std::vector<std::string> notes;  // checks that could not be evaluated, and why
  std::optional<std::string> embedding_suspect;
  std::optional<KuroshData> kurosh;
  bool holds() const;
};

// Evaluates the d_p sandwich for the whole group and for H through its
// graph-of-groups decomposition. H must be normal of finite index in the
// constructed group.
DpBoundsReport dp_bounds_check(const AmalgamSpec& spec, SubgroupRecord& h, std::uint64_t p,
                               const EnumerationLimits& limits = {});
DpBoundsReport dp_bounds_check(const HnnSpec& spec, SubgroupRecord& h, std::uint64_t p,
                               const EnumerationLimits& limits = {});
nlohmann::json to_json(const DpBoundsReport& r);

// .amal / .hnn files: stanzas `left:`/`right:` (or `base:`) and optional
// `A:`, each followed by gens/rels lines, then `amalgam: u = v, ...` or
// `hnn: a = phi(a), ...`, optional `stable: t` and
// `assert: |A|=k|inf, amenable=true|false`.
AmalgamSpec parse_amalgam_spec(std::string_view text);
HnnSpec parse_hnn_spec(std::string_view text);

} // namespace gradientlab
