#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace gradientlab {

// Letters are encoded so that the code doubles as a coset-table column:
// (g, +1) -> 2g, (g, -1) -> 2g + 1. Inversion flips the low bit.
class Letter {
public:
  constexpr Letter() = default;
  constexpr Letter(std::uint32_t gen, int sign) : code_(2 * gen + (sign < 0 ? 1u : 0u)) {}

  static constexpr Letter from_code(std::uint32_t code) {
    Letter l;
    l.code_ = code;
    return l;
  }

  constexpr std::uint32_t gen() const { return code_ >> 1; }
  constexpr int sign() const { return (code_ & 1u) ? -1 : 1; }
  constexpr std::uint32_t code() const { return code_; }
  constexpr Letter inverse() const { return from_code(code_ ^ 1u); }

  friend constexpr bool operator==(Letter, Letter) = default;
  friend constexpr auto operator<=>(Letter a, Letter b) { return a.code_ <=> b.code_; }

private:
  std::uint32_t code_ = 0;
};

class DomainError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Freely reduced word in a free group. Every constructor reduces.
class Word {
public:
  Word() = default;
  explicit Word(std::span<const Letter> letters);
  Word(std::initializer_list<Letter> letters)
      : Word(std::span<const Letter>(letters.begin(), letters.size())) {}

  static Word generator(std::uint32_t gen, int sign = 1) { return Word({Letter(gen, sign)}); }

  std::span<const Letter> letters() const { return letters_; }
  std::size_t size() const { return letters_.size(); }
  bool empty() const { return letters_.empty(); }
  Letter operator[](std::size_t i) const { return letters_[i]; }
  auto begin() const { return letters_.begin(); }
  auto end() const { return letters_.end(); }

  // Largest generator id used plus one (0 for the empty word).
  std::uint32_t rank_used() const;
  // Sum of exponents of generator `gen`.
  long exponent_sum(std::uint32_t gen) const;

  // Conjugate to a cyclically reduced word.
  Word cyclically_reduced() const;

  friend bool operator==(const Word&, const Word&) = default;
  friend auto operator<=>(const Word& a, const Word& b) {
    if (a.size() != b.size()) return a.size() <=> b.size();
    return a.letters_ <=> b.letters_;
  }

private:
  std::vector<Letter> letters_;
};

// Reduces `raw`; throws DomainError if a letter references a generator >= rank.
Word free_reduce(std::span<const Letter> raw, std::size_t rank);

Word multiply(const Word& u, const Word& v);
Word invert(const Word& u);
Word power(const Word& u, long k);
Word commutator(const Word& u, const Word& v);  // u^-1 v^-1 u v

// Canonical representative of the cyclic class of w and w^-1 (both
// cyclically reduced); used for duplicate relator detection.
Word cyclic_canonical(const Word& w);

// Start offset of the lexicographically least rotation of s.
std::size_t least_rotation(std::span<const Letter> s);

} // namespace gradientlab
