#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sp/alignment.hpp"
#include "sp/coding.hpp"
#include "sp/core.hpp"

namespace sp {

enum class AssimilationCase { exact = 1, wrap = 2, split = 3 };

const char* to_string(AssimilationCase c);

/// Thrown when a grammar does not follow the learnable `< %c d ... >` layout.
class StoreFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/**
 * Structured view of a learnable grammar.
 *
 * Every pattern is `< %c d body >` (class member) or `< d body >` (bare top);
 * body items are content marks or class references `< %x >`.
 */
class LearnStore {
 public:
  struct Item {
    bool ref = false;
    MarkId mark = 0;  // content mark when !ref
    int cls = 0;      // referenced class when ref
    bool operator==(const Item&) const = default;
  };

  struct Element {
    std::uint64_t uid = 0;
    int cls = -1;  // -1: bare top
    std::uint64_t disc = 0;
    std::vector<Item> body;
    std::int64_t freq = 1;
    bool top = false;
    // provenance
    std::size_t new_index = 0;  // 1-based; 0 for patterns given up front
    AssimilationCase origin = AssimilationCase::wrap;
    std::vector<std::uint64_t> sources;
  };

  LearnStore() = default;

  /// Throws StoreFormatError on patterns outside the layout.
  static LearnStore lift(const Grammar& g);

  const std::vector<Element>& elements() const { return elements_; }
  const Element* find(std::uint64_t uid) const;
  bool empty() const { return elements_.empty(); }

  /// Patterns in element order; P<k> is elements()[k-1].
  Grammar render(const SymbolClassifier& base = SymbolClassifier{}) const;
  std::string text_of(const Element& e) const;
  /// Text of any element ever created, including removed ones.
  std::string historic_text(std::uint64_t uid) const;

  std::vector<const Element*> members(int cls) const;
  std::size_t references(int cls) const;

  // mutation, used by assimilation
  Element& add(Element e);
  void remove(std::uint64_t uid);
  Element* find_mut(std::uint64_t uid);
  int fresh_class() { return next_class_++; }
  std::uint64_t fresh_disc() { return next_disc_++; }

 private:
  std::vector<Element> elements_;
  std::map<std::uint64_t, std::string> history_;
  int next_class_ = 1;
  std::uint64_t next_disc_ = 1;
  std::uint64_t next_uid_ = 1;
};

struct ProvenanceRecord {
  std::string pattern_id;
  std::size_t new_index = 0;
  AssimilationCase kind = AssimilationCase::wrap;
  std::vector<std::string> sources;  // pattern ids, or quoted text of patterns since removed
};

std::vector<ProvenanceRecord> provenance_of(const LearnStore& store);
/// One line per record: `P3 2 split P1 "< %1 1 a b >"`.
std::string provenance_to_text(const std::vector<ProvenanceRecord>& records);

struct LearnConfig {
  std::size_t grammar_beam = 20;  // W_g
  std::size_t prune_period = 1;   // New patterns between prunes
  std::size_t min_hits = 2;       // case 3 threshold
  double min_fraction = 0.25;     // of the shorter content span
  std::size_t match_results = 3;  // hit sequences tried per surface
  std::size_t max_surfaces = 64;  // member combinations tried per top pattern
  std::size_t max_branches = 4;   // case 3 alternatives kept per grammar and New
  double wrap_below = 0.5;        // best split covers less of New than this: wrap is kept too
  BuildConfig build = [] { BuildConfig b; b.beam = 16; return b; }();  // scoring runs many builds; narrow beam
  CodeSchemeOptions coding{};
};

struct Assimilation {
  LearnStore store;
  AssimilationCase kind = AssimilationCase::wrap;
  std::size_t hits = 0;
  double log2_p = 0.0;
};

/// Alternatives, preferred first. Exactly one entry for cases 1 and 2.
std::vector<Assimilation> assimilate_new_pattern(const Pattern& new_pattern, const LearnStore& store,
                                                 const LearnConfig& config = {}, std::size_t new_index = 1);

/// Does the store derive exactly this content sequence?
bool store_derives(const LearnStore& store, std::span<const MarkId> content);

struct FrequencyTable {
  std::map<std::string, std::uint64_t> pattern_freq;  // P<k> -> f_i
  std::map<std::string, std::uint64_t> type_freq;     // mark -> F_i
};

/// f_i and F_i over subsets b_1..b_m (one per New pattern).
FrequencyTable compute_grammar_frequencies(const std::vector<std::vector<const Alignment*>>& subsets);

struct GrammarScore {
  double g = 0.0;
  double e = 0.0;
  double t = 0.0;
};

struct NewEncoding {
  std::vector<std::string> code;
  std::vector<std::size_t> residue;  // New positions
  double bits = 0.0;                 // e_i
  bool uncovered = false;
};

struct GrammarReport {
  GrammarScore score;
  FrequencyTable table;
  std::vector<NewEncoding> encodings;
};

/// Empty grammar or corpus throws std::invalid_argument.
GrammarReport score_grammar(const Grammar& g, const Corpus& corpus, const LearnConfig& config = {});

/// Each New wrapped as `< %k k content >`, frequency 1.
Grammar verbatim_grammar(const Corpus& corpus);

struct LearnedGrammar {
  Grammar grammar;  // frequencies set to f_i
  GrammarReport report;
  std::vector<ProvenanceRecord> provenance;
  LearnStore store;
};

/// Ranked by T, best first. `initial` seeds the store (may be empty).
std::vector<LearnedGrammar> learn_grammars(const Corpus& corpus, const LearnConfig& config = {},
                                           const Grammar* initial = nullptr);

/// ID marks renamed by a structural traversal; patterns in canonical order.
Grammar canonicalize_grammar(const Grammar& g);
/// Canonical pattern texts without frequencies; equal iff isomorphic.
std::string canonical_key(const Grammar& g);

}  // namespace sp
