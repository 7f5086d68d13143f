#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gradientlab/coset_table.hpp"

namespace gradientlab {

// Spanning tree of the coset graph plus the surviving (non-tree) edges.
struct SchreierData {
  struct Edge {
    std::uint32_t coset = 0;
    std::uint32_t gen = 0;
    friend bool operator==(const Edge&, const Edge&) = default;
  };

  std::vector<Word> transversal;          // transversal[0] is the empty word
  std::vector<Edge> schreier_generators;  // non-tree edges (c, g), c·g
  // Schreier generator id per (coset, gen), -1 for tree edges.
  std::vector<std::int32_t> generator_of;
  std::size_t rank = 0;

  std::int32_t generator_at(std::uint32_t coset, std::uint32_t gen) const {
    return generator_of[coset * rank + gen];
  }
};

SchreierData schreier_transversal(const CosetTable& t);
SchreierData schreier_transversal(std::span<const std::uint32_t> rows, std::size_t rank);
// Same construction with the column order shuffled per coset, giving a
// different (still prefix-closed) transversal.
SchreierData schreier_transversal_randomized(const CosetTable& t, std::uint64_t seed);

// Words t_c · g · t_{c·g}^-1 in the ambient generators, one per Schreier generator.
std::vector<Word> schreier_generator_words(const SchreierData& sd, std::span<const std::uint32_t> rows);

// Presentation of a subgroup together with, for each of its generators, the
// word in the ambient generators that it stands for.
struct SubgroupPresentation {
  GroupPresentation presentation;
  std::vector<Word> generator_words;

  // Restricts to the generators present in `simplified` (matched by name).
  SubgroupPresentation restricted_to(GroupPresentation simplified) const;
};

inline constexpr std::size_t max_rewritten_relator_length = std::size_t{1} << 16;

SubgroupPresentation reidemeister_schreier(const GroupPresentation& p, const CosetTable& t);
SubgroupPresentation reidemeister_schreier(const GroupPresentation& p, const CosetTable& t,
                                           const SchreierData& sd);

inline constexpr std::size_t default_tietze_effort = 1'000'000;

// Isomorphism-preserving simplification: drops trivial and duplicate
// relators, deletes generators equal to the identity, and eliminates a
// generator occurring exactly once in some relator when the substitution
// keeps total relator length bounded. At most `effort` eliminations.
GroupPresentation tietze_simplify(const GroupPresentation& p,
                                  std::size_t effort = default_tietze_effort);

// reidemeister_schreier followed by tietze_simplify.
SubgroupPresentation subgroup_presentation(const CosetTable& t,
                                           std::size_t effort = default_tietze_effort);

} // namespace gradientlab
