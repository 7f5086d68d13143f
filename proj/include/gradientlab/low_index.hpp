#pragma once

#include <vector>

#include "gradientlab/subgroup_record.hpp"

namespace gradientlab {

inline constexpr std::size_t default_max_index = 64;

// All normal subgroups of index <= max_index, each once, ordered by index and
// then by canonical table. Backtrack search over standardized coset tables
// with relator deductions and a normality prune (a normal subgroup's table
// renumbered from any coset is the same table). `limits.max_steps` bounds
// the number of search nodes.
Outcome<std::vector<SubgroupRecord>> low_index_normal_subgroups(
    const GroupPresentation& p, std::size_t max_index, const EnumerationLimits& limits = {});
Outcome<std::vector<SubgroupRecord>> low_index_normal_subgroups(
    std::shared_ptr<const GroupPresentation> p, std::size_t max_index,
    const EnumerationLimits& limits = {});

} // namespace gradientlab
