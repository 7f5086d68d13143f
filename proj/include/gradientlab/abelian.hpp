#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <vector>

#include <gmpxx.h>

#include "json.hpp"

#include "gradientlab/presentation.hpp"

namespace gradientlab {

using Integer = mpz_class;
using Rational = mpq_class;

class IntegerMatrix {
public:
  IntegerMatrix() = default;
  IntegerMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
  IntegerMatrix(std::initializer_list<std::initializer_list<long>> rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  Integer& at(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const Integer& at(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  friend bool operator==(const IntegerMatrix&, const IntegerMatrix&) = default;

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Integer> data_;
};

// Rows are relators, columns generators, entries exponent sums.
IntegerMatrix relation_matrix(const GroupPresentation& p);

// Diagonal d1 | d2 | ... of length min(rows, cols), entries >= 0.
std::vector<Integer> smith_normal_form(IntegerMatrix m);

// Rank of m reduced mod p, by Gaussian elimination over F_p.
std::size_t rank_mod_p(const IntegerMatrix& m, std::uint64_t p);

bool is_prime(std::uint64_t n);

struct AbelianData {
  // One entry per generator: SNF diagonal padded with zeros (0 = free factor).
  std::vector<Integer> invariant_factors;
  std::size_t torsion_free_rank = 0;
  std::map<std::uint64_t, std::size_t> d_p_by_prime;
  std::size_t d_lower = 0;  // minimal generator count of the abelianization
  std::size_t d_upper = 0;  // generator count of the presentation

  // Number of invariant factors divisible by p (zeros included).
  std::size_t d_p_from_factors(std::uint64_t p) const;
  // Cached value when available, otherwise from the invariant factors.
  std::size_t d_p(std::uint64_t p) const;
};

AbelianData abelian_data(const GroupPresentation& p, const std::set<std::uint64_t>& primes = {});

nlohmann::json to_json(const IntegerMatrix& m);
IntegerMatrix integer_matrix_from_json(const nlohmann::json& j);
nlohmann::json to_json(const AbelianData& a);

} // namespace gradientlab
