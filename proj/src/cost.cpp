#include "gradientlab/cost.hpp"

#include <numeric>
#include <random>

namespace gradientlab {

namespace {

Rational ratio(std::size_t n, std::size_t d) {
  Rational q(Integer(std::to_string(n)), Integer(std::to_string(d)));
  q.canonicalize();
  return q;
}

// Modulo reduction keeps samples identical across standard libraries, unlike
// std::uniform_int_distribution.
std::size_t draw(std::mt19937_64& rng, std::size_t n) { return static_cast<std::size_t>(rng() % n); }

std::vector<Word> step_words(const SubgroupSpec& l) {
  std::vector<Word> out;
  for (const auto& w : l.generators) {
    out.push_back(w);
    out.push_back(invert(w));
  }
  return out;
}

// Points grouped by orbit, orbits ordered by smallest member.
std::vector<std::vector<std::uint32_t>> orbit_members(const FiniteAction& act, const SubgroupSpec& l) {
  auto id = orbits(act, l);
  std::map<std::uint32_t, std::vector<std::uint32_t>> by_id;
  for (std::uint32_t x = 0; x < act.degree; ++x)
    by_id[id[x]].push_back(x);
  std::vector<std::vector<std::uint32_t>> out;
  for (auto& [_, pts] : by_id)
    out.push_back(std::move(pts));
  return out;
}

template <class Order>
void grow_tree(const FiniteAction& act, const std::vector<Word>& steps, std::uint32_t root,
               std::vector<char>& seen, FiniteGraphing& g, Order&& order) {
  std::vector<std::uint32_t> queue{root};
  seen[root] = 1;
  for (std::size_t k = 0; k < queue.size(); ++k)
    for (std::size_t s : order()) {
      std::uint32_t y = act.apply(queue[k], steps[s]);
      if (seen[y]) continue;
      seen[y] = 1;
      g.edges.emplace_back(queue[k], y);
      queue.push_back(y);
    }
}

} // namespace

Rational FiniteGraphing::edge_measure() const {
  if (degree == 0) throw DomainError("graphing on an empty set");
  return ratio(edges.size(), degree);
}

FiniteGraphing spanning_forest(const FiniteAction& act, const SubgroupSpec& l) {
  FiniteGraphing g{act.degree, {}};
  const auto steps = step_words(l);
  std::vector<std::size_t> fixed(steps.size());
  std::iota(fixed.begin(), fixed.end(), std::size_t{0});
  std::vector<char> seen(act.degree, 0);
  for (std::uint32_t x = 0; x < act.degree; ++x)
    if (!seen[x]) grow_tree(act, steps, x, seen, g, [&]() -> const auto& { return fixed; });
  return g;
}

bool graphs_orbit_relation(const FiniteGraphing& g, const FiniteAction& act, const SubgroupSpec& l) {
  if (g.degree != act.degree) return false;
  const auto id = orbits(act, l);
  std::vector<std::uint32_t> parent(g.degree);
  std::iota(parent.begin(), parent.end(), 0u);
  auto find = [&](std::uint32_t x) {
    while (parent[x] != x)
      x = parent[x] = parent[parent[x]];
    return x;
  };
  std::size_t components = g.degree;
  for (auto [x, y] : g.edges) {
    if (x >= g.degree || y >= g.degree || id[x] != id[y]) return false;
    std::uint32_t a = find(x), b = find(y);
    if (a != b) {
      parent[a] = b;
      --components;
    }
  }
  std::size_t orbit_total = 0;
  for (std::uint32_t x = 0; x < g.degree; ++x)
    orbit_total += id[x] == x;
  return components == orbit_total;
}

CostReport orbit_relation_cost(const FiniteAction& act, const SubgroupSpec& l) {
  if (act.degree == 0) throw DomainError("action on an empty set");
  CostReport r;
  r.degree = act.degree;
  r.orbit_count = orbit_count(act, l);
  r.min_cost = spanning_forest(act, l).edge_measure();
  if (r.min_cost != ratio(r.degree - r.orbit_count, r.degree))
    throw std::logic_error("spanning forest size disagrees with the orbit count");
  r.predicted = 1 - ratio(1, index_in_quotient(act, l));
  r.match = r.min_cost == r.predicted;
  r.transitive_cost_minus_one = -ratio(1, r.degree);
  return r;
}

GraphingAudit greedy_graphing_audit(const FiniteAction& act, const SubgroupSpec& l, std::size_t trials,
                                    std::uint64_t seed) {
  if (trials == 0) throw DomainError("trials must be at least 1");
  if (act.degree == 0) throw DomainError("action on an empty set");
  GraphingAudit a;
  a.trials = trials;
  a.seed = seed;
  a.min_cost = ratio(act.degree - orbit_count(act, l), act.degree);

  const auto steps = step_words(l);
  const auto members = orbit_members(act, l);
  const auto id = orbits(act, l);
  std::map<std::uint32_t, std::size_t> orbit_pos;
  for (std::size_t k = 0; k < members.size(); ++k)
    orbit_pos[members[k].front()] = k;

  std::mt19937_64 rng(seed);
  std::vector<std::size_t> order(steps.size());
  auto shuffled = [&]() -> const std::vector<std::size_t>& {
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (std::size_t i = order.size(); i > 1; --i)
      std::swap(order[i - 1], order[draw(rng, i)]);
    return order;
  };

  for (std::size_t t = 0; t < trials; ++t) {
    FiniteGraphing g{act.degree, {}};
    std::vector<char> seen(act.degree, 0);
    for (const auto& orbit : members)
      grow_tree(act, steps, orbit[draw(rng, orbit.size())], seen, g, shuffled);
    const std::size_t extra = draw(rng, 4);
    for (std::size_t e = 0; e < extra; ++e) {
      std::uint32_t x = static_cast<std::uint32_t>(draw(rng, act.degree));
      const auto& orbit = members[orbit_pos[id[x]]];
      g.edges.emplace_back(x, orbit[draw(rng, orbit.size())]);
    }
    const Rational e = g.edge_measure();
    if (t == 0 || e < a.min_observed) a.min_observed = e;
    if (t == 0 || e > a.max_observed) a.max_observed = e;
    a.forest_only += extra == 0;
    a.below_min_cost += e < a.min_cost;
    a.not_spanning += !graphs_orbit_relation(g, act, l);
    ++a.extra_edges[extra];
  }
  return a;
}

nlohmann::json to_json(const CostReport& r) {
  return {{"degree", r.degree},
          {"orbit_count", r.orbit_count},
          {"min_cost", r.min_cost.get_str()},
          {"predicted", r.predicted.get_str()},
          {"match", r.match},
          {"transitive_cost_minus_one", r.transitive_cost_minus_one.get_str()}};
}

nlohmann::json to_json(const GraphingAudit& a) {
  nlohmann::json hist = nlohmann::json::object();
  for (auto [k, n] : a.extra_edges)
    hist[std::to_string(k)] = n;
  return {{"trials", a.trials},
          {"seed", a.seed},
          {"min_cost", a.min_cost.get_str()},
          {"forest_only", a.forest_only},
          {"below_min_cost", a.below_min_cost},
          {"not_spanning", a.not_spanning},
          {"min_observed", a.min_observed.get_str()},
          {"max_observed", a.max_observed.get_str()},
          {"extra_edges", hist},
          {"passed", a.passed()}};
}

} // namespace gradientlab
