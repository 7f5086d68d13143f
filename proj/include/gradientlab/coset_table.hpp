#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "json.hpp"

#include "gradientlab/outcome.hpp"
#include "gradientlab/presentation.hpp"

namespace gradientlab {

struct EnumerationLimits {
  std::size_t max_cosets = 2'000'000;
  std::uint64_t max_steps = 100'000'000;
};

// Complete right action of the generators on the cosets {0..index-1} of a
// subgroup. Rows are laid out per coset with one column per letter code
// (g,+1) -> 2g, (g,-1) -> 2g+1.
class CosetTable {
public:
  CosetTable(std::shared_ptr<const GroupPresentation> ambient, SubgroupSpec subgroup,
             std::vector<std::uint32_t> rows);

  // Builds a table from a complete action; the subgroup is described by the
  // Schreier generators of the stabilizer of coset 0.
  static CosetTable from_rows(std::shared_ptr<const GroupPresentation> ambient,
                              std::vector<std::uint32_t> rows);

  std::size_t index() const { return index_; }
  std::size_t columns() const { return 2 * ambient_->rank(); }
  const GroupPresentation& ambient() const { return *ambient_; }
  const std::shared_ptr<const GroupPresentation>& ambient_ptr() const { return ambient_; }
  const SubgroupSpec& subgroup() const { return subgroup_; }
  std::span<const std::uint32_t> rows() const { return rows_; }

  std::uint32_t image(std::uint32_t coset, Letter l) const {
    return rows_[coset * columns() + l.code()];
  }
  std::uint32_t trace(std::uint32_t coset, const Word& w) const;

  // Machine-checkable closure certificate: columns are mutually inverse
  // permutations, every relator returns every coset to itself and every
  // subgroup generator fixes coset 0.
  bool verify() const;
  // True when the numbering is the first-occurrence BFS order from coset 0.
  bool is_standard() const;

  friend bool operator==(const CosetTable& a, const CosetTable& b) {
    return a.rows_ == b.rows_ && *a.ambient_ == *b.ambient_;
  }

private:
  std::shared_ptr<const GroupPresentation> ambient_;
  SubgroupSpec subgroup_;
  std::vector<std::uint32_t> rows_;
  std::size_t index_ = 0;
};

// Permutation image of the ambient group on a finite set.
struct FiniteAction {
  std::size_t degree = 0;
  std::vector<std::vector<std::uint32_t>> permutations;  // one per generator
  std::vector<std::vector<std::uint32_t>> inverses;

  std::uint32_t apply(std::uint32_t point, Letter l) const {
    return l.sign() > 0 ? permutations[l.gen()][point] : inverses[l.gen()][point];
  }
  std::uint32_t apply(std::uint32_t point, const Word& w) const;
};

Outcome<CosetTable> todd_coxeter(const GroupPresentation& p, const SubgroupSpec& s,
                                 const EnumerationLimits& limits = {});
Outcome<CosetTable> todd_coxeter(std::shared_ptr<const GroupPresentation> p, const SubgroupSpec& s,
                                 const EnumerationLimits& limits = {});

FiniteAction to_action(const CosetTable& t);
bool is_normal(const CosetTable& t);

// Orbit id per point of the action of <l>, numbered by smallest member.
std::vector<std::uint32_t> orbits(const FiniteAction& act, const SubgroupSpec& l);
std::size_t orbit_count(const FiniteAction& act, const SubgroupSpec& l);
// Points of the <l>-orbit of `start` in BFS order.
std::vector<std::uint32_t> orbit_of(const FiniteAction& act, const SubgroupSpec& l,
                                    std::uint32_t start = 0);
// [L : L ∩ H] for H the stabilizer of point 0: the size of the <l>-orbit of 0.
std::size_t index_in_quotient(const FiniteAction& act, const SubgroupSpec& l);

// Renumbers a complete table (`cols` columns per row) in first-occurrence BFS
// order starting from `base`, keeping only the cosets reachable from it.
std::vector<std::uint32_t> standardize(std::span<const std::uint32_t> rows, std::size_t cols,
                                       std::uint32_t base = 0);

nlohmann::json to_json(const CosetTable& t);
CosetTable coset_table_from_json(const nlohmann::json& j,
                                 std::shared_ptr<const GroupPresentation> ambient);

} // namespace gradientlab
