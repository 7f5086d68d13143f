#include "gradientlab/abelian.hpp"

#include <optional>
#include <utility>

namespace gradientlab {

IntegerMatrix::IntegerMatrix(std::initializer_list<std::initializer_list<long>> rows)
    : rows_(rows.size()), cols_(rows.size() ? rows.begin()->size() : 0) {
  for (const auto& r : rows) {
    if (r.size() != cols_) throw DomainError("ragged matrix literal");
    for (long v : r)
      data_.emplace_back(v);
  }
}

IntegerMatrix relation_matrix(const GroupPresentation& p) {
  IntegerMatrix m(p.relators().size(), p.rank());
  for (std::size_t i = 0; i < p.relators().size(); ++i)
    for (Letter l : p.relators()[i])
      m.at(i, l.gen()) += l.sign();
  return m;
}

namespace {

struct Pivot {
  std::size_t row, col;
};

// Smallest nonzero |entry| in the trailing block from (k,k), ties row-major.
std::optional<Pivot> find_pivot(const IntegerMatrix& m, std::size_t k) {
  std::optional<Pivot> best;
  for (std::size_t i = k; i < m.rows(); ++i)
    for (std::size_t j = k; j < m.cols(); ++j) {
      const Integer& v = m.at(i, j);
      if (sgn(v) == 0) continue;
      if (!best || mpz_cmpabs(v.get_mpz_t(), m.at(best->row, best->col).get_mpz_t()) < 0) best = Pivot{i, j};
    }
  return best;
}

void swap_rows(IntegerMatrix& m, std::size_t a, std::size_t b) {
  if (a == b) return;
  for (std::size_t j = 0; j < m.cols(); ++j)
    std::swap(m.at(a, j), m.at(b, j));
}

void swap_cols(IntegerMatrix& m, std::size_t a, std::size_t b) {
  if (a == b) return;
  for (std::size_t i = 0; i < m.rows(); ++i)
    std::swap(m.at(i, a), m.at(i, b));
}

} // namespace

std::vector<Integer> smith_normal_form(IntegerMatrix m) {
  const std::size_t n = std::min(m.rows(), m.cols());
  std::vector<Integer> diag(n, 0);
  Integer q;
  for (std::size_t k = 0; k < n; ++k) {
    for (;;) {
      auto piv = find_pivot(m, k);
      if (!piv) return diag;
      swap_rows(m, k, piv->row);
      swap_cols(m, k, piv->col);
      const Integer pivot = m.at(k, k);
      bool cleared = true;
      for (std::size_t i = k + 1; i < m.rows(); ++i) {
        if (sgn(m.at(i, k)) == 0) continue;
        mpz_tdiv_q(q.get_mpz_t(), m.at(i, k).get_mpz_t(), pivot.get_mpz_t());
        for (std::size_t j = k; j < m.cols(); ++j)
          m.at(i, j) -= q * m.at(k, j);
        cleared = cleared && sgn(m.at(i, k)) == 0;
      }
      for (std::size_t j = k + 1; j < m.cols(); ++j) {
        if (sgn(m.at(k, j)) == 0) continue;
        mpz_tdiv_q(q.get_mpz_t(), m.at(k, j).get_mpz_t(), pivot.get_mpz_t());
        for (std::size_t i = k; i < m.rows(); ++i)
          m.at(i, j) -= q * m.at(i, k);
        cleared = cleared && sgn(m.at(k, j)) == 0;
      }
      if (!cleared) continue;
      // pivot must divide the whole trailing block
      std::optional<std::size_t> bad_row;
      for (std::size_t i = k + 1; i < m.rows() && !bad_row; ++i)
        for (std::size_t j = k + 1; j < m.cols(); ++j)
          if (!mpz_divisible_p(m.at(i, j).get_mpz_t(), pivot.get_mpz_t())) {
            bad_row = i;
            break;
          }
      if (!bad_row) break;
      for (std::size_t j = k; j < m.cols(); ++j)
        m.at(k, j) += m.at(*bad_row, j);
    }
    diag[k] = abs(m.at(k, k));
  }
  return diag;
}

std::size_t rank_mod_p(const IntegerMatrix& m, std::uint64_t p) {
  if (p < 2) throw DomainError("rank_mod_p needs p >= 2");
  std::vector<std::vector<std::uint64_t>> a(m.rows(), std::vector<std::uint64_t>(m.cols()));
  Integer r;
  const Integer mod(std::to_string(p));
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) {
      mpz_fdiv_r(r.get_mpz_t(), m.at(i, j).get_mpz_t(), mod.get_mpz_t());
      a[i][j] = std::stoull(r.get_str());
    }
  auto mulmod = [p](std::uint64_t x, std::uint64_t y) {
    return static_cast<std::uint64_t>(static_cast<unsigned __int128>(x) * y % p);
  };
  auto powmod = [&](std::uint64_t b, std::uint64_t e) {
    std::uint64_t out = 1;
    for (; e; e >>= 1, b = mulmod(b, b))
      if (e & 1) out = mulmod(out, b);
    return out;
  };
  std::size_t rank = 0;
  for (std::size_t col = 0; col < m.cols() && rank < m.rows(); ++col) {
    std::size_t piv = rank;
    while (piv < m.rows() && a[piv][col] == 0)
      ++piv;
    if (piv == m.rows()) continue;
    std::swap(a[piv], a[rank]);
    const std::uint64_t inv = powmod(a[rank][col], p - 2);
    for (std::size_t i = 0; i < m.rows(); ++i) {
      if (i == rank || a[i][col] == 0) continue;
      const std::uint64_t f = mulmod(a[i][col], inv);
      for (std::size_t j = col; j < m.cols(); ++j)
        a[i][j] = (a[i][j] + p - mulmod(f, a[rank][j])) % p;
    }
    ++rank;
  }
  return rank;
}

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

std::size_t AbelianData::d_p_from_factors(std::uint64_t p) const {
  if (!is_prime(p)) throw DomainError(std::to_string(p) + " is not prime");
  const Integer mod(std::to_string(p));
  std::size_t n = 0;
  for (const auto& f : invariant_factors)
    n += mpz_divisible_p(f.get_mpz_t(), mod.get_mpz_t()) != 0;
  return n;
}

std::size_t AbelianData::d_p(std::uint64_t p) const {
  if (auto it = d_p_by_prime.find(p); it != d_p_by_prime.end()) return it->second;
  return d_p_from_factors(p);
}

AbelianData abelian_data(const GroupPresentation& p, const std::set<std::uint64_t>& primes) {
  AbelianData a;
  const IntegerMatrix m = relation_matrix(p);
  a.invariant_factors = smith_normal_form(m);
  a.invariant_factors.resize(p.rank(), 0);
  for (const auto& f : a.invariant_factors) {
    if (sgn(f) == 0) ++a.torsion_free_rank;
    if (f != 1) ++a.d_lower;
  }
  for (auto q : primes) {
    if (!is_prime(q)) throw DomainError(std::to_string(q) + " is not prime");
    a.d_p_by_prime[q] = p.rank() - rank_mod_p(m, q);
  }
  a.d_upper = p.rank();
  return a;
}

nlohmann::json to_json(const IntegerMatrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t j = 0; j < m.cols(); ++j)
      row.push_back(m.at(i, j).get_str());
    rows.push_back(std::move(row));
  }
  return rows;
}

IntegerMatrix integer_matrix_from_json(const nlohmann::json& j) {
  const std::size_t rows = j.size();
  const std::size_t cols = rows ? j.at(0).size() : 0;
  IntegerMatrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    if (j.at(i).size() != cols) throw DomainError("ragged matrix");
    for (std::size_t k = 0; k < cols; ++k)
      m.at(i, k) = Integer(j.at(i).at(k).get<std::string>());
  }
  return m;
}

nlohmann::json to_json(const AbelianData& a) {
  nlohmann::json factors = nlohmann::json::array();
  for (const auto& f : a.invariant_factors)
    factors.push_back(f.get_str());
  nlohmann::json dp = nlohmann::json::object();
  for (const auto& [q, v] : a.d_p_by_prime)
    dp[std::to_string(q)] = v;
  return {{"invariant_factors", factors}, {"torsion_free_rank", a.torsion_free_rank},
          {"d_p", dp}, {"d_lower", a.d_lower}, {"d_upper", a.d_upper}};
}

} // namespace gradientlab
