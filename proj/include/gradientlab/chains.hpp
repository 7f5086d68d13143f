#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gradientlab/low_index.hpp"
#include "gradientlab/subgroup_record.hpp"

namespace gradientlab {

enum class ChainKind { mod_p_frattini, intersected, restricted, custom };
const char* to_string(ChainKind k);

struct ChainCaps {
  std::size_t max_depth = 8;
  std::size_t max_d_p = 14;
  std::size_t max_index = 65'536;  // largest [Γ:K] a Frattini step may produce
};

// Descending chain of finite-index normal subgroups of `ambient`.
struct ChainRecord {
  std::shared_ptr<const GroupPresentation> ambient;
  std::vector<SubgroupRecord> levels;
  ChainKind kind = ChainKind::custom;
  std::uint64_t prime = 0;  // for mod_p_frattini chains
  std::optional<Failure> truncated;  // why construction stopped early, if it did
  bool stabilized = false;  // d_p(H_k) = 0, so every further step repeats H_k
};

// K = [H,H]H^p for H normal of p-power index, as a subgroup of Γ.
// Γ/K is enumerated as the quotient of Γ by the normal closure of the p-th
// powers and pairwise commutators of a generating set of H.
Outcome<SubgroupRecord> mod_p_frattini_step(const GroupPresentation& ambient, SubgroupRecord& h,
                                            std::uint64_t p, const EnumerationLimits& limits = {},
                                            const ChainCaps& caps = {});

// H_1 = Γ, H_{k+1} = [H_k,H_k]H_k^p; `depth` steps, so depth + 1 levels.
// Step failures truncate the chain; earlier levels are kept. The chain also
// stops once d_p of the last level is 0.
ChainRecord p_chain(std::shared_ptr<const GroupPresentation> ambient, std::uint64_t p,
                    std::size_t depth, const EnumerationLimits& limits = {},
                    const ChainCaps& caps = {});
ChainRecord p_chain(const GroupPresentation& ambient, std::uint64_t p, std::size_t depth,
                    const EnumerationLimits& limits = {}, const ChainCaps& caps = {});

// A ∩ B via the diagonal action on the orbit of (0,0).
SubgroupRecord intersect(const SubgroupRecord& a, const SubgroupRecord& b);

// Transitive action of L on the <l>-orbit of coset 0, written as a coset
// table over l_pres (generator i of l_pres acts as the word l[i]). Fails with
// EmbeddingViolation when a relator of l_pres acts nontrivially.
Outcome<CosetTable> restrict_table(const CosetTable& t, const SubgroupSpec& l,
                                   std::shared_ptr<const GroupPresentation> l_pres);

// {L ∩ H_k} as a chain of subgroups of L.
Outcome<ChainRecord> restrict_chain(const ChainRecord& chain, const SubgroupSpec& l,
                                    std::shared_ptr<const GroupPresentation> l_pres);

// Checks the structural invariants: normal levels, containment of each level
// in the previous one, non-decreasing indices (strict except for restricted
// chains) and, for mod-p chains, p-power indices with [Γ:H_{k+1}] =
// [Γ:H_k]·p^{d_p(H_k)}. Returns a description of the first failure.
std::optional<std::string> check_chain(ChainRecord& chain);

// Derived data for every level; levels are independent so this may fan out.
void derive_levels(ChainRecord& chain, const std::set<std::uint64_t>& primes);

nlohmann::json to_json(const ChainRecord& c, std::uint64_t prime = 0);

} // namespace gradientlab
