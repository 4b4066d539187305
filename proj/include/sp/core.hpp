#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "sp/symbols.hpp"

namespace sp {

enum class Role : std::uint8_t { New, Old };

struct Symbol {
  std::string mark;
  SymbolKind kind = SymbolKind::content;
  MarkId id = 0;

  bool operator==(const Symbol& o) const { return id == o.id && kind == o.kind; }
};

/// An ordered sequence of symbols with a notional frequency. Immutable.
class Pattern {
 public:
  Pattern() = default;
  Pattern(const std::vector<std::string>& marks, std::int64_t frequency = 1, Role role = Role::Old,
          const SymbolClassifier& classifier = SymbolClassifier{});

  /// Splits on spaces/tabs; no frequency prefix handling.
  static Pattern from_text(std::string_view text, std::int64_t frequency = 1, Role role = Role::Old,
                           const SymbolClassifier& classifier = SymbolClassifier{});

  std::span<const Symbol> symbols() const { return symbols_; }
  std::span<const MarkId> ids() const { return ids_; }
  const Symbol& operator[](std::size_t i) const { return symbols_[i]; }
  std::size_t size() const { return symbols_.size(); }
  bool empty() const { return symbols_.empty(); }
  std::int64_t frequency() const { return frequency_; }
  Role role() const { return role_; }

  Pattern with_frequency(std::int64_t f) const;
  Pattern with_role(Role r) const;

  /// Marks joined by single spaces, no frequency prefix.
  std::string text() const;

  bool operator==(const Pattern& o) const {
    return ids_ == o.ids_ && frequency_ == o.frequency_ && role_ == o.role_ && symbols_ == o.symbols_;
  }

 private:
  std::vector<Symbol> symbols_;
  std::vector<MarkId> ids_;
  std::int64_t frequency_ = 1;
  Role role_ = Role::Old;
};

/// Ordered New patterns.
struct Corpus {
  std::vector<Pattern> patterns;
  SymbolClassifier classifier;
};

/// Old patterns. Pattern ids are positional: "P1", "P2", ...
struct Grammar {
  std::vector<Pattern> patterns;
  SymbolClassifier classifier;

  std::size_t size() const { return patterns.size(); }
  bool empty() const { return patterns.empty(); }
  static std::string pattern_id(std::size_t index) { return "P" + std::to_string(index + 1); }
};

struct PatternFile {
  std::vector<Pattern> patterns;
  SymbolClassifier classifier;
};

class FormatError : public std::runtime_error {
 public:
  FormatError(std::size_t line, const std::string& detail, const std::string& source = "");
  std::size_t line() const { return line_; }
  const std::string& detail() const { return detail_; }

 private:
  std::size_t line_;
  std::string detail_;
};

// ============================================================================
// File format
// ============================================================================

/**
 * One pattern per line; marks separated by spaces or tabs. Lines whose first
 * non-blank character is `;` are comments, blank lines are skipped. A leading
 * `@N` token sets the frequency. A comment of the form `;@id m1 m2 ...` adds
 * marks to the identification set used to classify every pattern in the file.
 */
PatternFile parse_pattern_file(std::string_view text, Role role,
                               const SymbolClassifier& base = SymbolClassifier{});

std::string serialize_pattern_file(std::span<const Pattern> patterns,
                                   const SymbolClassifier& classifier = SymbolClassifier{});

Grammar parse_grammar(std::string_view text, const SymbolClassifier& base = SymbolClassifier{});
Corpus parse_corpus(std::string_view text, const SymbolClassifier& base = SymbolClassifier{});

std::string read_text_file(const std::string& path);
Grammar load_grammar(const std::string& path, const SymbolClassifier& base = SymbolClassifier{});
Corpus load_corpus(const std::string& path, const SymbolClassifier& base = SymbolClassifier{});

/// Every invariant violation of `p`; empty means valid.
std::vector<std::string> validate_pattern(const Pattern& p);

}  // namespace sp
