#pragma once

#include <optional>
#include <set>
#include <string>

#include "gradientlab/abelian.hpp"
#include "gradientlab/coset_table.hpp"
#include "gradientlab/rewriting.hpp"

namespace gradientlab {

// A finite-index subgroup with its derived data. The presentation and
// abelian data are filled on demand by ensure_derived.
struct SubgroupRecord {
  CosetTable table;
  bool normal = false;
  std::optional<SubgroupPresentation> rs_presentation;  // simplified
  std::optional<AbelianData> abelian;
  std::string provenance;

  std::size_t index() const { return table.index(); }
};

SubgroupRecord make_record(CosetTable table, std::string provenance);

// Computes the simplified Reidemeister–Schreier presentation and abelian data
// (with d_p cached for `primes`) if not present yet.
void ensure_derived(SubgroupRecord& r, const std::set<std::uint64_t>& primes = {});
const AbelianData& derived_abelian(SubgroupRecord& r, const std::set<std::uint64_t>& primes = {});

nlohmann::json to_json(const SubgroupRecord& r);

} // namespace gradientlab
