#pragma once

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "gradientlab/abelian.hpp"
#include "gradientlab/coset_table.hpp"

namespace gradientlab {

// Edges on the points of a finite action, each point carrying measure
// 1/degree, so e(S) = |edges| / degree.
struct FiniteGraphing {
  std::size_t degree = 0;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;

  Rational edge_measure() const;
};

// One tree per <l>-orbit, grown by BFS from the smallest point.
FiniteGraphing spanning_forest(const FiniteAction& act, const SubgroupSpec& l);

// Edges stay inside <l>-orbits and connect each orbit.
bool graphs_orbit_relation(const FiniteGraphing& g, const FiniteAction& act, const SubgroupSpec& l);

struct CostReport {
  std::size_t degree = 0;
  std::size_t orbit_count = 0;
  Rational min_cost;   // (degree - orbit_count) / degree
  Rational predicted;  // 1 - 1/[L : L ∩ H]
  bool match = false;
  // Cost - 1 of the transitive relation on the same points: -1/degree. A
  // sanity value only; finite costs are not gradient estimates.
  Rational transitive_cost_minus_one;
};

// H is the stabilizer of point 0; the identity with `predicted` needs H normal.
CostReport orbit_relation_cost(const FiniteAction& act, const SubgroupSpec& l);

struct GraphingAudit {
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  Rational min_cost;
  std::size_t forest_only = 0;
  std::size_t below_min_cost = 0;
  std::size_t not_spanning = 0;
  Rational min_observed;
  Rational max_observed;
  std::map<std::size_t, std::size_t> extra_edges;  // extra edge count -> samples

  bool passed() const { return below_min_cost == 0 && not_spanning == 0; }
};

// Random spanning forests (random roots and BFS letter order) plus 0-3 random
// extra edges inside orbits. Reproducible for a given seed.
GraphingAudit greedy_graphing_audit(const FiniteAction& act, const SubgroupSpec& l, std::size_t trials,
                                    std::uint64_t seed);

nlohmann::json to_json(const CostReport& r);
nlohmann::json to_json(const GraphingAudit& a);

} // namespace gradientlab
