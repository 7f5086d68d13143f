#include "gradientlab/low_index.hpp"

#include <algorithm>

namespace gradientlab {

namespace {

class NormalSubgroupSearch {
public:
  NormalSubgroupSearch(const GroupPresentation& p, std::size_t max_index,
                       const EnumerationLimits& limits)
      : cols_(2 * p.rank()), max_index_(max_index), limits_(limits) {
    for (const auto& r : p.relators()) {
      std::vector<std::uint32_t> codes;
      for (Letter l : r)
        codes.push_back(l.code());
      relators_.push_back(std::move(codes));
    }
  }

  bool run() {
    State root{std::vector<std::int32_t>(max_index_ * cols_, -1), 1};
    if (!deduce(root)) return true;
    search(root);
    return !exhausted_;
  }

  std::vector<std::vector<std::uint32_t>> take_results() { return std::move(results_); }

private:
  struct State {
    std::vector<std::int32_t> tab;
    std::size_t n;
  };

  std::int32_t& at(State& s, std::size_t c, std::uint32_t x) const { return s.tab[c * cols_ + x]; }
  std::int32_t at(const State& s, std::size_t c, std::uint32_t x) const {
    return s.tab[c * cols_ + x];
  }

  // Scans relator w at coset c without defining cosets. Returns false on a
  // contradiction; sets `changed` when a deduction was made.
  bool scan(State& s, std::size_t c, const std::vector<std::uint32_t>& w, bool& changed) const {
    std::int32_t f = static_cast<std::int32_t>(c), b = f;
    std::size_t i = 0, j = w.size();
    while (i < j && at(s, f, w[i]) >= 0)
      f = at(s, f, w[i++]);
    if (i == j) return f == b;
    while (j > i && at(s, b, w[j - 1] ^ 1u) >= 0)
      b = at(s, b, w[--j] ^ 1u);
    if (j == i) return f == b;
    if (j == i + 1) {
      at(s, f, w[i]) = b;
      at(s, b, w[i] ^ 1u) = f;
      changed = true;
    }
    return true;
  }

  bool deduce(State& s) const {
    bool changed = true;
    while (changed) {
      changed = false;
      for (std::size_t c = 0; c < s.n; ++c)
        for (const auto& r : relators_)
          if (!scan(s, c, r, changed)) return false;
    }
    return true;
  }

  // A normal subgroup's table renumbered from any base coset is the table
  // itself; compare as far as the partial table determines the renumbering.
  bool normal_consistent(const State& s) const {
    std::vector<std::int32_t> fresh(max_index_);
    std::vector<std::uint32_t> order;
    for (std::size_t base = 1; base < s.n; ++base) {
      std::fill(fresh.begin(), fresh.end(), -1);
      order.assign(1, static_cast<std::uint32_t>(base));
      fresh[base] = 0;
      bool stop = false;
      for (std::size_t k = 0; k < order.size() && k < s.n && !stop; ++k)
        for (std::uint32_t x = 0; x < cols_; ++x) {
          std::int32_t e = at(s, order[k], x);
          if (e < 0) {
            stop = true;
            break;
          }
          if (fresh[e] < 0) {
            fresh[e] = static_cast<std::int32_t>(order.size());
            order.push_back(static_cast<std::uint32_t>(e));
          }
          std::int32_t here = at(s, k, x);
          if (here >= 0 && here != fresh[e]) return false;
        }
    }
    return true;
  }

  void search(const State& s) {
    if (exhausted_) return;
    if (++nodes_ > limits_.max_steps) {
      exhausted_ = true;
      return;
    }
    std::size_t c = 0;
    std::uint32_t x = 0;
    bool found = false;
    for (c = 0; c < s.n && !found; ++c)
      for (x = 0; x < cols_; ++x)
        if (at(s, c, x) < 0) {
          found = true;
          break;
        }
    if (!found) {
      std::vector<std::uint32_t> rows(s.tab.begin(), s.tab.begin() + s.n * cols_);
      results_.push_back(std::move(rows));
      return;
    }
    --c;
    for (std::size_t d = 0; d <= s.n && d < max_index_; ++d) {
      if (d < s.n && at(s, d, x ^ 1u) >= 0) continue;
      State t = s;
      if (d == s.n) ++t.n;
      at(t, c, x) = static_cast<std::int32_t>(d);
      at(t, d, x ^ 1u) = static_cast<std::int32_t>(c);
      if (!deduce(t) || !normal_consistent(t)) continue;
      search(t);
    }
  }

  std::size_t cols_;
  std::size_t max_index_;
  EnumerationLimits limits_;
  std::vector<std::vector<std::uint32_t>> relators_;
  std::vector<std::vector<std::uint32_t>> results_;
  std::uint64_t nodes_ = 0;
  bool exhausted_ = false;
};

} // namespace

Outcome<std::vector<SubgroupRecord>> low_index_normal_subgroups(const GroupPresentation& p,
                                                                std::size_t max_index,
                                                                const EnumerationLimits& limits) {
  return low_index_normal_subgroups(std::make_shared<const GroupPresentation>(p), max_index, limits);
}

Outcome<std::vector<SubgroupRecord>> low_index_normal_subgroups(
    std::shared_ptr<const GroupPresentation> p, std::size_t max_index,
    const EnumerationLimits& limits) {
  if (max_index == 0) throw DomainError("max_index must be positive");
  std::vector<SubgroupRecord> out;
  if (p->rank() == 0) {
    out.push_back(make_record(CosetTable(p, {}, {}), "low-index"));
    return out;
  }
  NormalSubgroupSearch search(*p, max_index, limits);
  if (!search.run())
    return Failure{FailureKind::indeterminate,
                   "low-index search exceeded " + std::to_string(limits.max_steps) + " nodes"};
  auto tables = search.take_results();
  std::sort(tables.begin(), tables.end(), [](const auto& a, const auto& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
  });
  for (auto& rows : tables) {
    auto rec = make_record(CosetTable::from_rows(p, std::move(rows)), "low-index");
    if (!rec.normal || !rec.table.verify())
      throw std::logic_error("low-index search produced a non-normal or invalid table");
    out.push_back(std::move(rec));
  }
  return out;
}

} // namespace gradientlab
