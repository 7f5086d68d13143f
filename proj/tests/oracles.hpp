#pragma once

// Independent reference computations used only by the tests.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <numeric>
#include <set>
#include <vector>

#include <gmpxx.h>

#include "gradientlab/word.hpp"

namespace oracle {

using gradientlab::Letter;

// Repeatedly deletes the first adjacent inverse pair until none remain.
inline std::vector<Letter> naive_reduce(std::vector<Letter> w) {
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i + 1 < w.size(); ++i)
      if (w[i] == w[i + 1].inverse()) {
        w.erase(w.begin() + static_cast<long>(i), w.begin() + static_cast<long>(i) + 2);
        changed = true;
        break;
      }
  }
  return w;
}

inline mpz_class determinant(std::vector<std::vector<mpz_class>> m) {
  const std::size_t n = m.size();
  if (n == 0) return 1;
  if (n == 1) return m[0][0];
  mpz_class det = 0;
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<std::vector<mpz_class>> minor;
    for (std::size_t i = 1; i < n; ++i) {
      std::vector<mpz_class> row;
      for (std::size_t k = 0; k < n; ++k)
        if (k != j) row.push_back(m[i][k]);
      minor.push_back(row);
    }
    mpz_class term = m[0][j] * determinant(minor);
    det += (j % 2 == 0) ? term : mpz_class(-term);
  }
  return det;
}

inline void combinations(std::size_t n, std::size_t k, std::vector<std::size_t>& cur, std::size_t start,
                         const std::function<void(const std::vector<std::size_t>&)>& f) {
  if (cur.size() == k) {
    f(cur);
    return;
  }
  for (std::size_t i = start; i < n; ++i) {
    cur.push_back(i);
    combinations(n, k, cur, i + 1, f);
    cur.pop_back();
  }
}

// Invariant factors via gcds of k×k minors: d_k = g_k / g_{k-1}.
inline std::vector<mpz_class> invariant_factors_by_minors(const std::vector<std::vector<long>>& a) {
  const std::size_t r = a.size(), c = r ? a[0].size() : 0;
  std::vector<mpz_class> out;
  mpz_class prev = 1;
  for (std::size_t k = 1; k <= std::min(r, c); ++k) {
    mpz_class g = 0;
    std::vector<std::size_t> rows, cols;
    combinations(r, k, rows, 0, [&](const std::vector<std::size_t>& rs) {
      combinations(c, k, cols, 0, [&](const std::vector<std::size_t>& cs) {
        std::vector<std::vector<mpz_class>> m;
        for (auto i : rs) {
          std::vector<mpz_class> row;
          for (auto j : cs)
            row.emplace_back(a[i][j]);
          m.push_back(row);
        }
        mpz_class d = determinant(m);
        mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), d.get_mpz_t());
      });
    });
    if (g == 0) {
      for (; k <= std::min(r, c); ++k)
        out.emplace_back(0);
      break;
    }
    out.push_back(g / prev);
    prev = g;
  }
  return out;
}

using Perm = std::vector<std::uint32_t>;

inline Perm compose(const Perm& p, const Perm& q) {  // apply p then q
  Perm r(p.size());
  for (std::size_t i = 0; i < p.size(); ++i)
    r[i] = q[p[i]];
  return r;
}

inline Perm inverse(const Perm& p) {
  Perm r(p.size());
  for (std::size_t i = 0; i < p.size(); ++i)
    r[p[i]] = static_cast<std::uint32_t>(i);
  return r;
}

// Closure of the group generated by `gens` (as permutations of a finite set).
inline std::set<Perm> generated_group(const std::vector<Perm>& gens, std::size_t degree) {
  Perm id(degree);
  std::iota(id.begin(), id.end(), 0u);
  std::set<Perm> seen{id};
  std::vector<Perm> frontier{id};
  while (!frontier.empty()) {
    std::vector<Perm> next;
    for (const auto& p : frontier)
      for (const auto& g : gens) {
        Perm q = compose(p, g);
        if (seen.insert(q).second) next.push_back(q);
      }
    frontier = std::move(next);
  }
  return seen;
}

// Image of a word under generator permutations.
inline Perm evaluate(const gradientlab::Word& w, const std::vector<Perm>& gens, std::size_t degree) {
  Perm r(degree);
  std::iota(r.begin(), r.end(), 0u);
  for (Letter l : w)
    r = compose(r, l.sign() > 0 ? gens[l.gen()] : inverse(gens[l.gen()]));
  return r;
}

// Number of orbits of the group generated by `gens` on {0..degree-1}, by
// explicit closure.
inline std::size_t orbit_count(const std::vector<Perm>& gens, std::size_t degree) {
  auto group = generated_group(gens, degree);
  std::set<std::set<std::uint32_t>> orbs;
  for (std::uint32_t x = 0; x < degree; ++x) {
    std::set<std::uint32_t> o;
    for (const auto& g : group)
      o.insert(g[x]);
    orbs.insert(o);
  }
  return orbs.size();
}

} // namespace oracle

namespace oracle {

// Elements of a finite group given by generating permutations.
struct FiniteGroup {
  std::vector<Perm> elements;
  std::size_t degree = 0;

  std::size_t order() const { return elements.size(); }
};

inline FiniteGroup make_group(const std::vector<Perm>& gens) {
  const std::size_t degree = gens.at(0).size();
  auto s = generated_group(gens, degree);
  return {std::vector<Perm>(s.begin(), s.end()), degree};
}

inline Perm cycle(std::size_t degree, std::vector<std::uint32_t> points) {
  Perm p(degree);
  std::iota(p.begin(), p.end(), 0u);
  for (std::size_t i = 0; i < points.size(); ++i)
    p[points[i]] = points[(i + 1) % points.size()];
  return p;
}

// Number of automorphisms by checking every bijection of the element set.
inline std::size_t automorphism_count(const FiniteGroup& g) {
  const std::size_t n = g.order();
  std::vector<std::vector<std::size_t>> mul(n, std::vector<std::size_t>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      Perm prod = compose(g.elements[i], g.elements[j]);
      mul[i][j] = static_cast<std::size_t>(
          std::find(g.elements.begin(), g.elements.end(), prod) - g.elements.begin());
    }
  std::vector<std::size_t> f(n);
  std::iota(f.begin(), f.end(), std::size_t{0});
  std::size_t count = 0;
  do {
    bool hom = true;
    for (std::size_t i = 0; i < n && hom; ++i)
      for (std::size_t j = 0; j < n && hom; ++j)
        hom = f[mul[i][j]] == mul[f[i]][f[j]];
    count += hom;
  } while (std::next_permutation(f.begin(), f.end()));
  return count;
}

// Number of r-tuples of elements that generate the whole group, i.e. the
// number of surjections from the free group of rank r.
inline std::size_t generating_tuples(const FiniteGroup& g, std::size_t r) {
  std::size_t count = 0;
  std::vector<std::size_t> idx(r, 0);
  while (true) {
    std::vector<Perm> gens;
    for (auto i : idx)
      gens.push_back(g.elements[i]);
    if (generated_group(gens, g.degree).size() == g.order()) ++count;
    std::size_t k = 0;
    while (k < r && ++idx[k] == g.order())
      idx[k++] = 0;
    if (k == r) break;
  }
  return count;
}

// All groups of order at most 6, as permutation groups.
inline std::vector<FiniteGroup> groups_up_to_order_6() {
  std::vector<FiniteGroup> out;
  out.push_back(make_group({Perm{0}}));
  for (std::uint32_t n = 2; n <= 6; ++n) {
    std::vector<std::uint32_t> pts(n);
    std::iota(pts.begin(), pts.end(), 0u);
    out.push_back(make_group({cycle(n, pts)}));
  }
  out.push_back(make_group({cycle(4, {0, 1}), cycle(4, {2, 3})}));  // Klein four
  out.push_back(make_group({cycle(3, {0, 1}), cycle(3, {0, 1, 2})}));  // S3
  return out;
}

// Normal subgroups of index k in the free group of rank r: surjections onto a
// group of order k modulo automorphisms, summed over isomorphism types.
inline std::size_t free_group_normal_subgroups(std::size_t r, std::size_t k) {
  std::size_t total = 0;
  for (const auto& g : groups_up_to_order_6())
    if (g.order() == k) total += generating_tuples(g, r) / automorphism_count(g);
  return total;
}

} // namespace oracle
