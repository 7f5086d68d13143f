#include "gradientlab/presentation.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <set>
#include <sstream>
#include <unordered_map>

namespace gradientlab {

ParseError::ParseError(const std::string& what, std::size_t line, std::size_t column)
    : DomainError(std::to_string(line) + ":" + std::to_string(column) + ": " + what),
      line_(line), column_(column) {}

bool is_valid_generator_name(std::string_view name) {
  if (name.empty() || !std::isalpha(static_cast<unsigned char>(name[0]))) return false;
  return std::all_of(name.begin(), name.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  });
}

GroupPresentation::GroupPresentation(std::vector<std::string> names, std::vector<Word> relators,
                                     std::string label)
    : names_(std::move(names)), label_(std::move(label)) {
  if (names_.size() > max_generators)
    throw DomainError("too many generators: " + std::to_string(names_.size()));
  std::set<std::string_view> seen;
  for (const auto& n : names_) {
    if (!is_valid_generator_name(n)) throw DomainError("invalid generator name '" + n + "'");
    if (!seen.insert(n).second) throw DomainError("duplicate generator name '" + n + "'");
  }
  std::set<Word> dedup;
  for (const auto& r : relators) {
    check_word(r);
    Word c = r.cyclically_reduced();
    if (c.size() > max_relator_length) throw DomainError("relator too long");
    if (c.empty() || !dedup.insert(c).second) continue;
    relators_.push_back(std::move(c));
  }
}

GroupPresentation GroupPresentation::free_group(std::size_t rank, std::string prefix) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < rank; ++i)
    names.push_back(prefix + std::to_string(i));
  return GroupPresentation(std::move(names), {}, "F" + std::to_string(rank));
}

std::vector<GeneratorSymbol> GroupPresentation::generators() const {
  std::vector<GeneratorSymbol> out;
  for (std::uint32_t i = 0; i < names_.size(); ++i)
    out.push_back({i, names_[i]});
  return out;
}

std::size_t GroupPresentation::total_relator_length() const {
  std::size_t n = 0;
  for (const auto& r : relators_)
    n += r.size();
  return n;
}

std::optional<std::uint32_t> GroupPresentation::find(std::string_view name) const {
  for (std::uint32_t i = 0; i < names_.size(); ++i)
    if (names_[i] == name) return i;
  return std::nullopt;
}

void GroupPresentation::check_word(const Word& w) const {
  if (w.rank_used() > names_.size())
    throw DomainError("word uses generator outside presentation of rank " +
                      std::to_string(names_.size()));
}

std::string GroupPresentation::format(const Word& w) const {
  if (w.empty()) return "1";
  std::string out;
  std::size_t i = 0;
  while (i < w.size()) {
    std::size_t j = i;
    while (j < w.size() && w[j] == w[i])
      ++j;
    long k = static_cast<long>(j - i) * w[i].sign();
    if (!out.empty()) out += '*';
    out += w[i].gen() < names_.size() ? names_[w[i].gen()] : "?" + std::to_string(w[i].gen());
    if (k != 1) out += "^" + std::to_string(k);
    i = j;
  }
  return out;
}

std::string GroupPresentation::to_text() const { return print_presentation(*this); }

GroupPresentation GroupPresentation::with_label(std::string label) const {
  GroupPresentation p = *this;
  p.label_ = std::move(label);
  return p;
}

SubgroupSpec SubgroupSpec::whole(const GroupPresentation& p) {
  SubgroupSpec s;
  for (std::uint32_t g = 0; g < p.rank(); ++g)
    s.generators.push_back(Word::generator(g));
  return s;
}

namespace detail {

namespace {

std::string_view trim(std::string_view s, std::size_t* lead = nullptr) {
  std::size_t a = 0;
  while (a < s.size() && std::isspace(static_cast<unsigned char>(s[a])))
    ++a;
  std::size_t b = s.size();
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1])))
    --b;
  if (lead) *lead = a;
  return s.substr(a, b - a);
}

class WordParser {
public:
  WordParser(std::string_view text, const std::unordered_map<std::string_view, std::uint32_t>& names,
             std::size_t line, std::size_t column)
      : text_(text), names_(names), line_(line), column_(column) {}

  // Parses one word, stopping at ',' or end of input.
  std::vector<Letter> word(bool nested = false) {
    std::vector<Letter> out;
    bool any = false;
    for (;;) {
      skip_space();
      if (at_end() || peek() == ',') break;
      if (peek() == ')') {
        if (!nested) fail("unbalanced ')'");
        break;
      }
      if (peek() == '*') {
        if (!any) fail("expected generator before '*'");
        ++pos_;
        skip_space();
        if (at_end() || peek() == ',' || peek() == ')') fail("expected generator after '*'");
      }
      append(out, factor());
      any = true;
    }
    if (!any) fail("empty word");
    return out;
  }

  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return text_[pos_]; }
  void expect_comma() {
    skip_space();
    if (!at_end()) {
      if (peek() != ',') fail("expected ','");
      ++pos_;
    }
  }
  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError(what, line_, column_ + pos_);
  }

private:
  void skip_space() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(peek())))
      ++pos_;
  }

  void append(std::vector<Letter>& out, const std::vector<Letter>& w) {
    if (out.size() + w.size() > max_relator_length) fail("word exceeds maximum length");
    out.insert(out.end(), w.begin(), w.end());
  }

  std::vector<Letter> factor() {
    std::vector<Letter> base = atom();
    skip_space();
    if (at_end() || peek() != '^') return base;
    ++pos_;
    skip_space();
    std::size_t start = pos_;
    if (!at_end() && (peek() == '-' || peek() == '+')) ++pos_;
    while (!at_end() && std::isdigit(static_cast<unsigned char>(peek())))
      ++pos_;
    long k = 0;
    auto digits = text_.substr(start, pos_ - start);
    if (!digits.empty() && digits[0] == '+') digits.remove_prefix(1);
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), k);
    if (ec != std::errc() || ptr != digits.data() + digits.size() || digits.empty()) {
      pos_ = start;
      fail("expected integer exponent");
    }
    unsigned long mag = k < 0 ? static_cast<unsigned long>(-k) : static_cast<unsigned long>(k);
    if (!base.empty() && mag > max_relator_length / base.size()) fail("word exceeds maximum length");
    std::vector<Letter> unit = base;
    if (k < 0) {
      std::reverse(unit.begin(), unit.end());
      for (auto& l : unit)
        l = l.inverse();
    }
    std::vector<Letter> out;
    out.reserve(unit.size() * mag);
    for (unsigned long i = 0; i < mag; ++i)
      out.insert(out.end(), unit.begin(), unit.end());
    return out;
  }

  std::vector<Letter> atom() {
    skip_space();
    if (at_end()) fail("expected generator");
    if (peek() == '(') {
      ++pos_;
      auto inner = word(true);
      skip_space();
      if (at_end() || peek() != ')') fail("expected ')'");
      ++pos_;
      return inner;
    }
    if (peek() == '1') {
      ++pos_;
      return {};
    }
    std::size_t start = pos_;
    if (!std::isalpha(static_cast<unsigned char>(peek()))) fail("expected generator name");
    while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_'))
      ++pos_;
    auto name = text_.substr(start, pos_ - start);
    auto it = names_.find(name);
    if (it == names_.end()) {
      pos_ = start;
      fail("undeclared generator '" + std::string(name) + "'");
    }
    return {Letter(it->second, 1)};
  }

  std::string_view text_;
  const std::unordered_map<std::string_view, std::uint32_t>& names_;
  std::size_t line_;
  std::size_t column_;
  std::size_t pos_ = 0;
};

std::unordered_map<std::string_view, std::uint32_t> name_index(const std::vector<std::string>& names) {
  std::unordered_map<std::string_view, std::uint32_t> m;
  for (std::uint32_t i = 0; i < names.size(); ++i)
    m.emplace(names[i], i);
  return m;
}

} // namespace

std::vector<Statement> split_statements(std::string_view text) {
  std::vector<Statement> out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    ++line_no;
    std::string_view line = text.substr(pos, eol - pos);
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    std::size_t seg_start = 0;
    while (seg_start <= line.size()) {
      std::size_t semi = line.find(';', seg_start);
      if (semi == std::string_view::npos) semi = line.size();
      std::string_view seg = line.substr(seg_start, semi - seg_start);
      std::size_t lead = 0;
      std::string_view body = trim(seg, &lead);
      if (!body.empty()) {
        std::size_t colon = body.find(':');
        std::size_t key_col = seg_start + lead + 1;
        if (colon == std::string_view::npos)
          throw ParseError("expected 'key:' statement", line_no, key_col);
        std::string key(trim(body.substr(0, colon)));
        if (key.empty()) throw ParseError("empty key", line_no, key_col);
        std::size_t vlead = 0;
        std::string_view value = trim(body.substr(colon + 1), &vlead);
        out.push_back({key, std::string(value), line_no, key_col + colon + 1 + vlead, key_col});
      }
      seg_start = semi + 1;
    }
    pos = eol + 1;
  }
  return out;
}

std::vector<std::string> parse_name_list(const Statement& st) {
  std::vector<std::string> names;
  if (st.value.empty()) return names;
  std::size_t pos = 0;
  while (pos <= st.value.size()) {
    std::size_t comma = st.value.find(',', pos);
    if (comma == std::string::npos) comma = st.value.size();
    std::size_t lead = 0;
    auto name = trim(std::string_view(st.value).substr(pos, comma - pos), &lead);
    if (!is_valid_generator_name(name))
      throw ParseError("invalid generator name '" + std::string(name) + "'", st.line,
                       st.column + pos + lead);
    names.emplace_back(name);
    pos = comma + 1;
  }
  return names;
}

std::vector<Word> parse_word_list(const Statement& st, const std::vector<std::string>& names) {
  std::vector<Word> out;
  if (st.value.empty()) return out;
  auto index = name_index(names);
  WordParser parser(st.value, index, st.line, st.column);
  while (!parser.at_end()) {
    auto letters = parser.word();
    out.emplace_back(letters);
    parser.expect_comma();
  }
  return out;
}

Word parse_word_at(std::string_view text, const std::vector<std::string>& names, std::size_t line,
                   std::size_t column) {
  auto index = name_index(names);
  WordParser parser(text, index, line, column);
  Word w(parser.word());
  if (!parser.at_end()) parser.fail("unexpected trailing input");
  return w;
}

} // namespace detail

GroupPresentation parse_presentation(std::string_view text) {
  return detail::presentation_from_statements(detail::split_statements(text), 1, 1);
}

namespace detail {

GroupPresentation presentation_from_statements(std::span<const Statement> statements,
                                               std::size_t line, std::size_t column) {
  std::optional<Statement> gens;
  std::vector<Statement> rels;
  std::string label;
  for (const auto& st : statements) {
    if (st.key == "gens") {
      if (gens) throw ParseError("duplicate 'gens:' line", st.line, st.key_column);
      gens = st;
    } else if (st.key == "rels") {
      if (!gens) throw ParseError("'rels:' before 'gens:'", st.line, st.key_column);
      rels.push_back(st);
    } else if (st.key == "name") {
      label = st.value;
    } else if (st.key == "sub") {
      continue;  // subgroup spec lines may share the file
    } else {
      throw ParseError("unknown key '" + st.key + "'", st.line, st.key_column);
    }
  }
  if (!gens) throw ParseError("missing 'gens:' line", line, column);
  auto names = parse_name_list(*gens);
  if (names.size() > max_generators)
    throw ParseError("too many generators (max " + std::to_string(max_generators) + ")", gens->line,
                     gens->column);
  std::set<std::string> seen;
  for (const auto& n : names)
    if (!seen.insert(n).second)
      throw ParseError("duplicate generator name '" + n + "'", gens->line, gens->column);
  std::vector<Word> relators;
  for (const auto& st : rels) {
    auto words = parse_word_list(st, names);
    relators.insert(relators.end(), words.begin(), words.end());
  }
  return GroupPresentation(std::move(names), std::move(relators), std::move(label));
}

} // namespace detail

SubgroupSpec parse_subgroup_spec(std::string_view text, const GroupPresentation& ambient) {
  SubgroupSpec spec;
  for (auto& st : detail::split_statements(text)) {
    if (st.key != "sub") continue;
    auto words = detail::parse_word_list(st, ambient.generator_names());
    spec.generators.insert(spec.generators.end(), words.begin(), words.end());
  }
  return spec;
}

Word parse_word(std::string_view text, const GroupPresentation& ambient) {
  return detail::parse_word_at(text, ambient.generator_names(), 1, 1);
}

bool same_presentation(const GroupPresentation& a, const GroupPresentation& b) {
  return a.generator_names() == b.generator_names() && a.relators() == b.relators();
}

std::string print_presentation(const GroupPresentation& p) {
  std::ostringstream out;
  if (!p.label().empty()) out << "name: " << p.label() << "\n";
  out << "gens: ";
  for (std::size_t i = 0; i < p.rank(); ++i)
    out << (i ? ", " : "") << p.generator_names()[i];
  out << "\nrels:";
  for (std::size_t i = 0; i < p.relators().size(); ++i)
    out << (i ? ", " : " ") << p.format(p.relators()[i]);
  out << "\n";
  return out.str();
}

std::string format_subgroup(const SubgroupSpec& s, const GroupPresentation& ambient) {
  std::string out = "sub:";
  for (std::size_t i = 0; i < s.generators.size(); ++i)
    out += (i ? ", " : " ") + ambient.format(s.generators[i]);
  return out + "\n";
}

} // namespace gradientlab
