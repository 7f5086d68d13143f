#include "gradientlab/rewriting.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <random>
#include <optional>
#include <set>
#include <tuple>

namespace gradientlab {

namespace {

SchreierData build_transversal(std::span<const std::uint32_t> rows, std::size_t rank,
                               std::mt19937_64* rng) {
  SchreierData sd;
  sd.rank = rank;
  const std::size_t cols = 2 * rank;
  const std::size_t n = cols ? rows.size() / cols : 1;
  sd.transversal.assign(n, Word());
  std::vector<std::int64_t> parent_col(n, -1);
  std::vector<char> seen(n, 0);
  std::vector<std::uint32_t> order{0};
  std::vector<std::uint32_t> col_order(cols);
  std::iota(col_order.begin(), col_order.end(), 0u);
  seen[0] = 1;
  for (std::size_t k = 0; k < order.size(); ++k) {
    std::uint32_t c = order[k];
    if (rng) std::shuffle(col_order.begin(), col_order.end(), *rng);
    for (std::uint32_t x : col_order) {
      std::uint32_t d = rows[c * cols + x];
      if (seen[d]) continue;
      seen[d] = 1;
      parent_col[d] = x;
      sd.transversal[d] = multiply(sd.transversal[c], Word({Letter::from_code(x)}));
      order.push_back(d);
    }
  }
  sd.generator_of.assign(n * rank, -2);
  for (std::uint32_t d = 1; d < n; ++d) {
    auto x = static_cast<std::uint32_t>(parent_col[d]);
    Letter l = Letter::from_code(x);
    // the tree edge into d is (parent, g) for a positive letter, (d, g) otherwise
    std::uint32_t from = l.sign() > 0 ? rows[d * cols + (x ^ 1u)] : d;
    sd.generator_of[from * rank + l.gen()] = -1;
  }
  for (std::uint32_t c = 0; c < n; ++c)
    for (std::uint32_t g = 0; g < rank; ++g)
      if (sd.generator_of[c * rank + g] == -2) {
        sd.generator_of[c * rank + g] = static_cast<std::int32_t>(sd.schreier_generators.size());
        sd.schreier_generators.push_back({c, g});
      }
  return sd;
}

} // namespace

SchreierData schreier_transversal(const CosetTable& t) {
  return build_transversal(t.rows(), t.ambient().rank(), nullptr);
}

SchreierData schreier_transversal(std::span<const std::uint32_t> rows, std::size_t rank) {
  return build_transversal(rows, rank, nullptr);
}

SchreierData schreier_transversal_randomized(const CosetTable& t, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return build_transversal(t.rows(), t.ambient().rank(), &rng);
}

std::vector<Word> schreier_generator_words(const SchreierData& sd,
                                           std::span<const std::uint32_t> rows) {
  std::vector<Word> out;
  const std::size_t cols = 2 * sd.rank;
  for (const auto& e : sd.schreier_generators) {
    std::uint32_t target = rows[e.coset * cols + 2 * e.gen];
    out.push_back(multiply(multiply(sd.transversal[e.coset], Word::generator(e.gen)),
                           invert(sd.transversal[target])));
  }
  return out;
}

SubgroupPresentation SubgroupPresentation::restricted_to(GroupPresentation simplified) const {
  SubgroupPresentation out;
  for (const auto& name : simplified.generator_names()) {
    auto id = presentation.find(name);
    if (!id) throw DomainError("simplified presentation introduced generator " + name);
    out.generator_words.push_back(generator_words[*id]);
  }
  out.presentation = std::move(simplified);
  return out;
}

SubgroupPresentation reidemeister_schreier(const GroupPresentation& p, const CosetTable& t) {
  return reidemeister_schreier(p, t, schreier_transversal(t));
}

SubgroupPresentation reidemeister_schreier(const GroupPresentation& p, const CosetTable& t,
                                           const SchreierData& sd) {
  if (!(p == t.ambient())) throw DomainError("coset table is over a different presentation");
  std::vector<std::string> names;
  for (const auto& e : sd.schreier_generators)
    names.push_back("y" + std::to_string(e.coset) + "_" + p.generator_names()[e.gen]);
  std::vector<Word> relators;
  std::vector<Letter> buf;
  for (std::uint32_t c = 0; c < t.index(); ++c)
    for (const auto& r : p.relators()) {
      buf.clear();
      std::uint32_t cur = c;
      for (Letter l : r) {
        if (l.sign() > 0) {
          if (auto id = sd.generator_at(cur, l.gen()); id >= 0)
            buf.emplace_back(static_cast<std::uint32_t>(id), 1);
          cur = t.image(cur, l);
        } else {
          std::uint32_t prev = t.image(cur, l);
          if (auto id = sd.generator_at(prev, l.gen()); id >= 0)
            buf.emplace_back(static_cast<std::uint32_t>(id), -1);
          cur = prev;
        }
      }
      relators.emplace_back(buf);
    }
  SubgroupPresentation out;
  out.presentation = GroupPresentation(std::move(names), std::move(relators), "subgroup");
  out.generator_words = schreier_generator_words(sd, t.rows());
  return out;
}

namespace {

using Letters = std::vector<Letter>;

void reduce_cyclic(Letters& w) {
  Word r = Word(w).cyclically_reduced();
  w.assign(r.begin(), r.end());
}

class Tietze {
public:
  explicit Tietze(const GroupPresentation& p)
      : rank_(p.rank()), names_(p.generator_names()), alive_(p.rank(), 1) {
    for (const auto& r : p.relators())
      rels_.emplace_back(r.begin(), r.end());
    initial_total_ = total();
  }

  GroupPresentation run(std::size_t effort) {
    std::size_t eliminations = 0;
    for (;;) {
      normalize();
      if (remove_trivial_generators()) continue;
      if (eliminations >= effort) break;
      if (!eliminate_one()) break;
      ++eliminations;
    }
    return build();
  }

private:
  std::size_t total() const {
    std::size_t n = 0;
    for (const auto& r : rels_)
      n += r.size();
    return n;
  }

  void normalize() {
    std::set<Word> seen;
    std::vector<Letters> kept;
    for (auto& r : rels_) {
      reduce_cyclic(r);
      if (r.empty()) continue;
      if (!seen.insert(cyclic_canonical(Word(r))).second) continue;
      kept.push_back(std::move(r));
    }
    rels_ = std::move(kept);
  }

  // A relator x^±1 makes x trivial.
  bool remove_trivial_generators() {
    for (const auto& r : rels_)
      if (r.size() == 1) {
        substitute(r[0].gen(), {});
        return true;
      }
    return false;
  }

  // Replaces generator x by `value` in every relator and retires x.
  void substitute(std::uint32_t x, const Letters& value) {
    Letters inv(value.rbegin(), value.rend());
    for (auto& l : inv)
      l = l.inverse();
    for (auto& r : rels_) {
      if (std::none_of(r.begin(), r.end(), [x](Letter l) { return l.gen() == x; })) continue;
      Letters out;
      out.reserve(r.size());
      for (Letter l : r) {
        if (l.gen() != x)
          out.push_back(l);
        else {
          const auto& rep = l.sign() > 0 ? value : inv;
          out.insert(out.end(), rep.begin(), rep.end());
        }
      }
      Word reduced(out);
      r.assign(reduced.begin(), reduced.end());
    }
    alive_[x] = 0;
  }

  bool eliminate_one() {
    std::vector<std::size_t> occ(rank_, 0);
    for (const auto& r : rels_)
      for (Letter l : r)
        ++occ[l.gen()];
    const std::size_t total_len = total();
    const std::size_t budget = std::max<std::size_t>(2 * initial_total_, 64);

    struct Candidate {
      long growth;
      std::size_t length;
      std::size_t rel;
      std::uint32_t gen;
    };
    std::optional<Candidate> best;
    std::vector<std::size_t> count(rank_, 0);
    for (std::size_t ri = 0; ri < rels_.size(); ++ri) {
      const auto& r = rels_[ri];
      for (Letter l : r)
        ++count[l.gen()];
      for (Letter l : r) {
        std::uint32_t x = l.gen();
        if (count[x] != 1) continue;
        const std::size_t others = occ[x] - 1;
        const std::size_t longest = r.size() - 1;
        long growth = static_cast<long>(others) * (static_cast<long>(r.size()) - 2) -
                      static_cast<long>(r.size());
        if (growth > 0 && total_len + static_cast<std::size_t>(growth) > budget) continue;
        if (others > 0 && longest > max_rewritten_relator_length) continue;
        Candidate c{growth, r.size(), ri, x};
        if (!best || std::tie(c.growth, c.length, c.rel, c.gen) <
                         std::tie(best->growth, best->length, best->rel, best->gen))
          best = c;
      }
      for (Letter l : r)
        count[l.gen()] = 0;
    }
    if (!best) return false;
    if (!fits(best->gen, best->rel)) return false;

    Letters r = rels_[best->rel];
    auto pos = std::find_if(r.begin(), r.end(), [&](Letter l) { return l.gen() == best->gen; });
    std::rotate(r.begin(), pos, r.end());
    Letter head = r[0];
    Letters rest(r.begin() + 1, r.end());  // head = rest^-1
    Letters value;
    if (head.sign() > 0) {
      value.assign(rest.rbegin(), rest.rend());
      for (auto& l : value)
        l = l.inverse();
    } else {
      value = rest;
    }
    rels_.erase(rels_.begin() + static_cast<long>(best->rel));
    substitute(best->gen, value);
    return true;
  }

  // Substituting must not push any relator past the rewritten-length guard.
  bool fits(std::uint32_t x, std::size_t rel) const {
    const std::size_t repl = rels_[rel].size() - 1;
    for (std::size_t ri = 0; ri < rels_.size(); ++ri) {
      if (ri == rel) continue;
      std::size_t len = 0;
      for (Letter l : rels_[ri])
        len += l.gen() == x ? repl : 1;
      if (len > max_rewritten_relator_length) return false;
    }
    return true;
  }

  GroupPresentation build() const {
    std::vector<std::int64_t> remap(rank_, -1);
    std::vector<std::string> names;
    for (std::uint32_t g = 0; g < rank_; ++g)
      if (alive_[g]) {
        remap[g] = static_cast<std::int64_t>(names.size());
        names.push_back(names_[g]);
      }
    std::vector<Word> relators;
    for (const auto& r : rels_) {
      Letters out;
      for (Letter l : r)
        out.emplace_back(static_cast<std::uint32_t>(remap[l.gen()]), l.sign());
      relators.emplace_back(out);
    }
    return GroupPresentation(std::move(names), std::move(relators), "simplified");
  }

  std::size_t rank_;
  std::vector<std::string> names_;
  std::vector<char> alive_;
  std::vector<Letters> rels_;
  std::size_t initial_total_ = 0;
};

} // namespace

GroupPresentation tietze_simplify(const GroupPresentation& p, std::size_t effort) {
  GroupPresentation out = Tietze(p).run(effort);
  return out.with_label(p.label());
}

SubgroupPresentation subgroup_presentation(const CosetTable& t, std::size_t effort) {
  auto rs = reidemeister_schreier(t.ambient(), t);
  return rs.restricted_to(tietze_simplify(rs.presentation, effort));
}

} // namespace gradientlab
