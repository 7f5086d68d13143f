#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gradientlab/word.hpp"

namespace gradientlab {

inline constexpr std::size_t max_generators = 4096;
inline constexpr std::size_t max_relator_length = std::size_t{1} << 20;

struct GeneratorSymbol {
  std::uint32_t id = 0;
  std::string name;
};

class ParseError : public DomainError {
public:
  ParseError(const std::string& what, std::size_t line, std::size_t column);
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

private:
  std::size_t line_;
  std::size_t column_;
};

bool is_valid_generator_name(std::string_view name);

// Finitely presented group <X | R>. Relators are stored cyclically reduced,
// with trivial and duplicate relators dropped.
class GroupPresentation {
public:
  GroupPresentation() = default;
  GroupPresentation(std::vector<std::string> names, std::vector<Word> relators,
                    std::string label = {});

  // Free group on `rank` generators named x0, x1, ...
  static GroupPresentation free_group(std::size_t rank, std::string prefix = "x");

  std::size_t rank() const { return names_.size(); }
  const std::vector<std::string>& generator_names() const { return names_; }
  std::vector<GeneratorSymbol> generators() const;
  const std::vector<Word>& relators() const { return relators_; }
  const std::string& label() const { return label_; }
  std::size_t total_relator_length() const;

  std::optional<std::uint32_t> find(std::string_view name) const;
  // Throws DomainError when w uses a generator outside this presentation.
  void check_word(const Word& w) const;

  std::string format(const Word& w) const;
  std::string to_text() const;

  GroupPresentation with_label(std::string label) const;

  friend bool operator==(const GroupPresentation&, const GroupPresentation&) = default;

private:
  std::vector<std::string> names_;
  std::vector<Word> relators_;
  std::string label_;
};

// Finitely generated subgroup given by words in the ambient generators;
// no words means the trivial subgroup.
struct SubgroupSpec {
  std::vector<Word> generators;

  // All generators of the ambient group.
  static SubgroupSpec whole(const GroupPresentation& p);
  friend bool operator==(const SubgroupSpec&, const SubgroupSpec&) = default;
};

// Equal generators and relators; labels are ignored.
bool same_presentation(const GroupPresentation& a, const GroupPresentation& b);

GroupPresentation parse_presentation(std::string_view text);
SubgroupSpec parse_subgroup_spec(std::string_view text, const GroupPresentation& ambient);
Word parse_word(std::string_view text, const GroupPresentation& ambient);
std::string print_presentation(const GroupPresentation& p);
std::string format_subgroup(const SubgroupSpec& s, const GroupPresentation& ambient);

namespace detail {

// One `key: value` statement of a presentation-style file. Statements are
// separated by newlines or ';'. Positions are 1-based.
struct Statement {
  std::string key;
  std::string value;
  std::size_t line = 0;
  std::size_t column = 0;  // column of the first character of value
  std::size_t key_column = 0;
};

std::vector<Statement> split_statements(std::string_view text);
std::vector<std::string> parse_name_list(const Statement& st);
// Comma separated word list over the given generator names.
std::vector<Word> parse_word_list(const Statement& st, const std::vector<std::string>& names);
Word parse_word_at(std::string_view text, const std::vector<std::string>& names, std::size_t line,
                   std::size_t column);
// `gens`/`rels`/`name` statements (and ignored `sub`) to a presentation;
// (line, column) locates a missing `gens:` error.
GroupPresentation presentation_from_statements(std::span<const Statement> statements,
                                               std::size_t line, std::size_t column);

} // namespace detail

} // namespace gradientlab
