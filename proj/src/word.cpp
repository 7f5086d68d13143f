#include "gradientlab/word.hpp"

#include <algorithm>

namespace gradientlab {

namespace {

void push_reduced(std::vector<Letter>& out, Letter l) {
  if (!out.empty() && out.back() == l.inverse())
    out.pop_back();
  else
    out.push_back(l);
}

} // namespace

Word::Word(std::span<const Letter> letters) {
  letters_.reserve(letters.size());
  for (Letter l : letters)
    push_reduced(letters_, l);
}

std::uint32_t Word::rank_used() const {
  std::uint32_t r = 0;
  for (Letter l : letters_)
    r = std::max(r, l.gen() + 1);
  return r;
}

long Word::exponent_sum(std::uint32_t gen) const {
  long s = 0;
  for (Letter l : letters_)
    if (l.gen() == gen) s += l.sign();
  return s;
}

Word Word::cyclically_reduced() const {
  std::size_t lo = 0, hi = letters_.size();
  while (hi - lo >= 2 && letters_[lo] == letters_[hi - 1].inverse()) {
    ++lo;
    --hi;
  }
  return Word(std::span<const Letter>(letters_.data() + lo, hi - lo));
}

Word free_reduce(std::span<const Letter> raw, std::size_t rank) {
  for (Letter l : raw)
    if (l.gen() >= rank)
      throw DomainError("letter references undeclared generator " + std::to_string(l.gen()));
  return Word(raw);
}

Word multiply(const Word& u, const Word& v) {
  std::vector<Letter> out(u.begin(), u.end());
  for (Letter l : v)
    push_reduced(out, l);
  return Word(out);
}

Word invert(const Word& u) {
  std::vector<Letter> out;
  out.reserve(u.size());
  for (auto it = u.letters().rbegin(); it != u.letters().rend(); ++it)
    out.push_back(it->inverse());
  return Word(out);
}

Word power(const Word& u, long k) {
  Word base = k < 0 ? invert(u) : u;
  Word out;
  for (long i = 0; i < (k < 0 ? -k : k); ++i)
    out = multiply(out, base);
  return out;
}

Word commutator(const Word& u, const Word& v) {
  return multiply(multiply(invert(u), invert(v)), multiply(u, v));
}

// Booth's least-rotation algorithm.
std::size_t least_rotation(std::span<const Letter> s) {
  const std::size_t n = s.size();
  std::vector<long> fail(2 * n, -1);
  std::size_t k = 0;
  for (std::size_t j = 1; j < 2 * n; ++j) {
    Letter sj = s[j % n];
    long i = fail[j - k - 1];
    while (i != -1 && sj != s[(k + i + 1) % n]) {
      if (sj < s[(k + i + 1) % n]) k = j - i - 1;
      i = fail[i];
    }
    if (sj != s[(k + i + 1) % n]) {  // i == -1
      if (sj < s[k % n]) k = j;
      fail[j - k] = -1;
    } else {
      fail[j - k] = i + 1;
    }
  }
  return k % n;
}

Word cyclic_canonical(const Word& w) {
  Word c = w.cyclically_reduced();
  if (c.empty()) return c;
  auto rotated = [](const Word& x) {
    std::vector<Letter> rot(x.begin(), x.end());
    std::rotate(rot.begin(), rot.begin() + least_rotation(rot), rot.end());
    return rot;
  };
  auto a = rotated(c);
  auto b = rotated(invert(c));
  return Word(std::min(a, b));
}

} // namespace gradientlab
