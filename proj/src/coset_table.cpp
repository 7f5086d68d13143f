#include "gradientlab/coset_table.hpp"

#include <algorithm>
#include <cassert>
#include <numeric>

#include "gradientlab/rewriting.hpp"

namespace gradientlab {

const char* to_string(FailureKind k) {
  switch (k) {
  case FailureKind::indeterminate: return "Indeterminate";
  case FailureKind::cap_exceeded: return "CapExceeded";
  case FailureKind::embedding_violation: return "EmbeddingViolation";
  }
  return "?";
}

CosetTable::CosetTable(std::shared_ptr<const GroupPresentation> ambient, SubgroupSpec subgroup,
                       std::vector<std::uint32_t> rows)
    : ambient_(std::move(ambient)), subgroup_(std::move(subgroup)), rows_(std::move(rows)) {
  const std::size_t cols = columns();
  if (cols == 0) {
    if (!rows_.empty()) throw DomainError("coset table for rank 0 must have no entries");
    index_ = 1;
  } else {
    if (rows_.empty() || rows_.size() % cols != 0) throw DomainError("coset table has ragged rows");
    index_ = rows_.size() / cols;
  }
  for (auto v : rows_)
    if (v >= index_) throw DomainError("coset table entry out of range");
}

CosetTable CosetTable::from_rows(std::shared_ptr<const GroupPresentation> ambient,
                                 std::vector<std::uint32_t> rows) {
  const std::size_t rank = ambient->rank();
  SubgroupSpec sub;
  if (rank > 0) sub.generators = schreier_generator_words(schreier_transversal(rows, rank), rows);
  return CosetTable(std::move(ambient), std::move(sub), std::move(rows));
}

std::uint32_t CosetTable::trace(std::uint32_t coset, const Word& w) const {
  for (Letter l : w)
    coset = image(coset, l);
  return coset;
}

bool CosetTable::verify() const {
  const std::size_t cols = columns();
  for (std::uint32_t c = 0; c < index_; ++c)
    for (std::uint32_t x = 0; x < cols; ++x)
      if (rows_[rows_[c * cols + x] * cols + (x ^ 1u)] != c) return false;
  for (const auto& r : ambient_->relators())
    for (std::uint32_t c = 0; c < index_; ++c)
      if (trace(c, r) != c) return false;
  for (const auto& w : subgroup_.generators)
    if (trace(0, w) != 0) return false;
  return true;
}

bool CosetTable::is_standard() const {
  return columns() == 0 || standardize(rows_, columns(), 0) == rows_;
}

std::uint32_t FiniteAction::apply(std::uint32_t point, const Word& w) const {
  for (Letter l : w)
    point = apply(point, l);
  return point;
}

namespace {

// Hasselgrove–Leech–Trotter enumeration with lookahead. Cosets are numbered
// in definition order; lookahead compacts the table, preserving that order.
class Enumerator {
public:
  Enumerator(const GroupPresentation& p, const EnumerationLimits& limits)
      : pres_(p), cols_(2 * p.rank()), limits_(limits) {
    for (const auto& r : p.relators())
      relators_.push_back(codes(r));
    add_coset();
  }

  std::vector<std::vector<std::uint32_t>> codes_of(const SubgroupSpec& s) const {
    std::vector<std::vector<std::uint32_t>> out;
    for (const auto& w : s.generators)
      out.push_back(codes(w));
    return out;
  }

  // Returns false on exhaustion of limits.
  bool run(const SubgroupSpec& s) {
    for (const auto& w : codes_of(s)) {
      for (;;) {
        auto r = scan(0, w, true);
        if (r == Scan::need_space) {
          if (!make_room(nullptr)) return false;
          continue;
        }
        if (r == Scan::out_of_steps) return false;
        break;
      }
    }
    std::size_t c = 0;
    while (c < count_) {
      bool restart = false;
      if (live(c)) {
        for (const auto& r : relators_) {
          auto res = scan(c, r, true);
          if (res == Scan::out_of_steps) return false;
          if (res == Scan::need_space) {
            if (!make_room(&c)) return false;
            restart = true;
            break;
          }
          if (!live(c)) break;
        }
        if (!restart && live(c)) {
          for (std::uint32_t x = 0; x < cols_ && live(c); ++x) {
            if (at(c, x) >= 0) continue;
            if (count_ >= limits_.max_cosets) {
              if (!make_room(&c)) return false;
              restart = true;
              break;
            }
            if (++steps_ > limits_.max_steps) return false;
            define(c, x);
          }
        }
      }
      if (!restart) ++c;
    }
    compact(nullptr);
    return true;
  }

  std::vector<std::uint32_t> rows() const {
    std::vector<std::uint32_t> out;
    out.reserve(count_ * cols_);
    for (std::size_t i = 0; i < count_ * cols_; ++i) {
      if (table_[i] < 0) throw std::logic_error("coset enumeration left an incomplete row");
      out.push_back(static_cast<std::uint32_t>(table_[i]));
    }
    return out;
  }
  std::size_t count() const { return count_; }

private:
  enum class Scan { done, need_space, out_of_steps };

  std::vector<std::uint32_t> codes(const Word& w) const {
    std::vector<std::uint32_t> out;
    out.reserve(w.size());
    for (Letter l : w)
      out.push_back(l.code());
    return out;
  }

  std::int32_t& at(std::size_t c, std::uint32_t x) { return table_[c * cols_ + x]; }
  std::int32_t at(std::size_t c, std::uint32_t x) const { return table_[c * cols_ + x]; }
  bool live(std::size_t c) const { return parent_[c] == static_cast<std::int32_t>(c); }

  std::size_t add_coset() {
    std::size_t c = count_++;
    table_.resize(count_ * cols_, -1);
    parent_.push_back(static_cast<std::int32_t>(c));
    return c;
  }

  void define(std::size_t c, std::uint32_t x) {
    std::size_t d = add_coset();
    at(c, x) = static_cast<std::int32_t>(d);
    at(d, x ^ 1u) = static_cast<std::int32_t>(c);
  }

  std::int32_t rep(std::int32_t c) {
    std::int32_t r = c;
    while (parent_[r] != r)
      r = parent_[r];
    while (parent_[c] != r) {
      std::int32_t n = parent_[c];
      parent_[c] = r;
      c = n;
    }
    return r;
  }

  void merge(std::int32_t a, std::int32_t b) {
    a = rep(a);
    b = rep(b);
    if (a == b) return;
    if (a > b) std::swap(a, b);
    parent_[b] = a;
    queue_.push_back(b);
  }

  void coincidence(std::int32_t a, std::int32_t b) {
    queue_.clear();
    merge(a, b);
    for (std::size_t qi = 0; qi < queue_.size(); ++qi) {
      std::int32_t g = queue_[qi];
      for (std::uint32_t x = 0; x < cols_; ++x) {
        std::int32_t d = at(g, x);
        if (d < 0) continue;
        at(d, x ^ 1u) = -1;
        std::int32_t mu = rep(g), nu = rep(d);
        if (at(mu, x) >= 0)
          merge(nu, at(mu, x));
        else if (at(nu, x ^ 1u) >= 0)
          merge(mu, at(nu, x ^ 1u));
        else {
          at(mu, x) = nu;
          at(nu, x ^ 1u) = mu;
        }
      }
    }
  }

  Scan scan(std::size_t c, const std::vector<std::uint32_t>& w, bool fill) {
    if (++steps_ > limits_.max_steps) return Scan::out_of_steps;
    if (w.empty()) return Scan::done;
    std::int32_t f = static_cast<std::int32_t>(c), b = f;
    std::size_t i = 0, j = w.size();  // unscanned letters are w[i..j)
    for (;;) {
      while (i < j && at(f, w[i]) >= 0)
        f = at(f, w[i++]);
      if (i == j) {
        if (f != b) coincidence(f, b);
        return Scan::done;
      }
      while (j > i && at(b, w[j - 1] ^ 1u) >= 0)
        b = at(b, w[--j] ^ 1u);
      if (j == i) {
        coincidence(f, b);
        return Scan::done;
      }
      if (j == i + 1) {
        at(f, w[i]) = b;
        at(b, w[i] ^ 1u) = f;
        return Scan::done;
      }
      if (!fill) return Scan::done;
      if (count_ >= limits_.max_cosets) return Scan::need_space;
      if (++steps_ > limits_.max_steps) return Scan::out_of_steps;
      define(static_cast<std::size_t>(f), w[i]);
    }
  }

  // Lookahead: scan every relator at every live coset without defining,
  // then compact. `cursor` (if any) is remapped to the first live coset at or
  // after its old position.
  bool make_room(std::size_t* cursor) {
    for (std::size_t e = 0; e < count_; ++e) {
      if (!live(e)) continue;
      for (const auto& r : relators_) {
        if (scan(e, r, false) == Scan::out_of_steps) return false;
        if (!live(e)) break;
      }
    }
    std::size_t before = count_;
    compact(cursor);
    return count_ < before && count_ < limits_.max_cosets;
  }

  void compact(std::size_t* cursor) {
    std::vector<std::int32_t> remap(count_, -1);
    std::size_t n = 0;
    for (std::size_t c = 0; c < count_; ++c)
      if (live(c)) remap[c] = static_cast<std::int32_t>(n++);
    if (cursor) {
      std::size_t c = *cursor;
      while (c < count_ && !live(c))
        ++c;
      *cursor = c < count_ ? static_cast<std::size_t>(remap[c]) : n;
    }
    std::vector<std::int32_t> table(n * cols_, -1);
    for (std::size_t c = 0; c < count_; ++c) {
      if (!live(c)) continue;
      for (std::uint32_t x = 0; x < cols_; ++x) {
        std::int32_t d = at(c, x);
        if (d >= 0) {
          assert(live(d));
          table[remap[c] * cols_ + x] = remap[rep(d)];
        }
      }
    }
    table_ = std::move(table);
    count_ = n;
    parent_.resize(n);
    std::iota(parent_.begin(), parent_.end(), 0);
  }

  const GroupPresentation& pres_;
  std::vector<std::vector<std::uint32_t>> relators_;
  std::size_t cols_;
  EnumerationLimits limits_;
  std::vector<std::int32_t> table_;
  std::vector<std::int32_t> parent_;
  std::vector<std::int32_t> queue_;
  std::size_t count_ = 0;
  std::uint64_t steps_ = 0;
};

} // namespace

std::vector<std::uint32_t> standardize(std::span<const std::uint32_t> rows, std::size_t cols,
                                       std::uint32_t base) {
  if (cols == 0) return {};
  const std::size_t n = rows.size() / cols;
  std::vector<std::int64_t> fresh(n, -1);
  std::vector<std::uint32_t> order;
  order.reserve(n);
  fresh[base] = 0;
  order.push_back(base);
  for (std::size_t k = 0; k < order.size(); ++k)
    for (std::size_t x = 0; x < cols; ++x) {
      std::uint32_t d = rows[order[k] * cols + x];
      if (fresh[d] < 0) {
        fresh[d] = static_cast<std::int64_t>(order.size());
        order.push_back(d);
      }
    }
  std::vector<std::uint32_t> out(order.size() * cols);
  for (std::size_t k = 0; k < order.size(); ++k)
    for (std::size_t x = 0; x < cols; ++x)
      out[k * cols + x] = static_cast<std::uint32_t>(fresh[rows[order[k] * cols + x]]);
  return out;
}

Outcome<CosetTable> todd_coxeter(const GroupPresentation& p, const SubgroupSpec& s,
                                 const EnumerationLimits& limits) {
  return todd_coxeter(std::make_shared<const GroupPresentation>(p), s, limits);
}

Outcome<CosetTable> todd_coxeter(std::shared_ptr<const GroupPresentation> p, const SubgroupSpec& s,
                                 const EnumerationLimits& limits) {
  if (limits.max_cosets == 0 || limits.max_steps == 0)
    throw DomainError("enumeration limits must be positive");
  for (const auto& w : s.generators)
    p->check_word(w);
  if (p->rank() == 0) return CosetTable(p, s, {});
  Enumerator e(*p, limits);
  if (!e.run(s))
    return Failure{FailureKind::indeterminate,
                   "coset enumeration did not close within " + std::to_string(limits.max_cosets) +
                       " cosets / " + std::to_string(limits.max_steps) + " steps"};
  CosetTable t(p, s, standardize(e.rows(), 2 * p->rank(), 0));
  if (!t.verify()) throw std::logic_error("coset enumeration produced an invalid table");
  return t;
}

FiniteAction to_action(const CosetTable& t) {
  FiniteAction act;
  act.degree = t.index();
  const std::size_t rank = t.ambient().rank();
  act.permutations.assign(rank, std::vector<std::uint32_t>(act.degree));
  act.inverses.assign(rank, std::vector<std::uint32_t>(act.degree));
  for (std::uint32_t g = 0; g < rank; ++g)
    for (std::uint32_t c = 0; c < act.degree; ++c) {
      act.permutations[g][c] = t.image(c, Letter(g, 1));
      act.inverses[g][c] = t.image(c, Letter(g, -1));
    }
  return act;
}

bool is_normal(const CosetTable& t) {
  for (const auto& w : t.subgroup().generators)
    for (std::uint32_t c = 0; c < t.index(); ++c)
      if (t.trace(c, w) != c) return false;
  return true;
}

std::vector<std::uint32_t> orbits(const FiniteAction& act, const SubgroupSpec& l) {
  std::vector<std::uint32_t> parent(act.degree);
  std::iota(parent.begin(), parent.end(), 0u);
  auto find = [&](std::uint32_t x) {
    while (parent[x] != x)
      x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& w : l.generators)
    for (std::uint32_t x = 0; x < act.degree; ++x) {
      std::uint32_t a = find(x), b = find(act.apply(x, w));
      if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
  std::vector<std::uint32_t> id(act.degree);
  for (std::uint32_t x = 0; x < act.degree; ++x)
    id[x] = find(x);
  return id;
}

std::size_t orbit_count(const FiniteAction& act, const SubgroupSpec& l) {
  auto id = orbits(act, l);
  std::size_t n = 0;
  for (std::uint32_t x = 0; x < act.degree; ++x)
    n += id[x] == x;
  return n;
}

std::vector<std::uint32_t> orbit_of(const FiniteAction& act, const SubgroupSpec& l,
                                    std::uint32_t start) {
  std::vector<char> seen(act.degree, 0);
  std::vector<std::uint32_t> out{start};
  seen[start] = 1;
  for (std::size_t k = 0; k < out.size(); ++k)
    for (const auto& w : l.generators)
      for (int sign : {1, -1}) {
        std::uint32_t y = act.apply(out[k], sign > 0 ? w : invert(w));
        if (!seen[y]) {
          seen[y] = 1;
          out.push_back(y);
        }
      }
  return out;
}

std::size_t index_in_quotient(const FiniteAction& act, const SubgroupSpec& l) {
  return orbit_of(act, l, 0).size();
}

nlohmann::json to_json(const CosetTable& t) {
  nlohmann::json rows = nlohmann::json::array();
  const std::size_t cols = t.columns();
  for (std::size_t c = 0; c < t.index(); ++c) {
    auto r = t.rows().subspan(c * cols, cols);
    rows.push_back(std::vector<std::uint32_t>(r.begin(), r.end()));
  }
  nlohmann::json words = nlohmann::json::array();
  for (const auto& w : t.subgroup().generators)
    words.push_back(t.ambient().format(w));
  return {{"index", t.index()}, {"subgroup_words", words}, {"rows", rows}};
}

CosetTable coset_table_from_json(const nlohmann::json& j,
                                 std::shared_ptr<const GroupPresentation> ambient) {
  SubgroupSpec sub;
  for (const auto& w : j.at("subgroup_words"))
    sub.generators.push_back(parse_word(w.get<std::string>(), *ambient));
  std::vector<std::uint32_t> rows;
  for (const auto& r : j.at("rows"))
    for (const auto& v : r)
      rows.push_back(v.get<std::uint32_t>());
  CosetTable t(ambient, std::move(sub), std::move(rows));
  if (t.index() != j.at("index").get<std::size_t>()) throw DomainError("coset table index mismatch");
  return t;
}

} // namespace gradientlab
