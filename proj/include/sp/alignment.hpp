#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <boost/container/small_vector.hpp>

#include "sp/coding.hpp"
#include "sp/core.hpp"
#include "sp/matcher.hpp"

namespace sp {

/// Pattern index used for row 0.
inline constexpr int kNewRow = -1;

/// Which single-symbol Old columns make up the code pattern.
enum class CodeRule {
  id_symbols,      // identification and boundary symbols only; content is inferred
  all_old_singles  // every single-symbol Old column
};

struct Cell {
  std::uint16_t row = 0;
  std::uint16_t pos = 0;
  bool operator==(const Cell&) const = default;
};

struct Column {
  boost::container::small_vector<Cell, 4> cells;  // sorted by row
  bool single() const { return cells.size() == 1; }
  bool has_new() const { return !cells.empty() && cells.front().row == 0; }
  bool operator==(const Column&) const = default;
};

/// Read-only inputs shared by every alignment of one build.
struct AlignmentContext {
  Pattern new_pattern;
  std::shared_ptr<const Grammar> grammar;
  CodeScheme scheme;
  CodeRule code_rule = CodeRule::id_symbols;

  const Pattern& pattern(int index) const {
    return index == kNewRow ? new_pattern : grammar->patterns[static_cast<std::size_t>(index)];
  }
};

struct AlignmentScore {
  double bn = 0.0;
  double be = 0.0;
  double cd = 0.0;
  std::optional<double> cr;
  std::size_t hit_columns = 0;
  std::size_t unmatched_old = 0;  // Old content left single; tie-break only
};

struct Alignment {
  std::shared_ptr<const AlignmentContext> ctx;
  std::vector<int> rows;  // pattern index per row; rows[0] == kNewRow
  std::vector<Column> columns;
  std::string id;
  std::vector<std::string> parents;
  int stage = 0;
  AlignmentScore score;

  const Pattern& row_pattern(std::size_t r) const { return ctx->pattern(rows[r]); }
  const Symbol& symbol(const Cell& c) const { return row_pattern(c.row)[c.pos]; }
  MarkId mark(const Cell& c) const { return symbol(c).id; }
  /// New positions that share a column with some Old symbol.
  std::vector<std::size_t> hit_new_positions() const;
  /// Canonical structural key; equal keys mean equal alignments.
  std::string signature() const;
  void signature_into(std::string& out) const;
};

/// Operand of a composition: the New pattern, one grammar pattern, or an alignment.
struct Operand {
  enum class Kind { new_pattern, old_pattern, alignment } kind = Kind::new_pattern;
  std::size_t pattern = 0;
  const Alignment* alignment = nullptr;

  static Operand new_pattern_operand() { return {}; }
  static Operand old(std::size_t index) { return {Kind::old_pattern, index, nullptr}; }
  static Operand of(const Alignment& a) { return {Kind::alignment, 0, &a}; }
};

struct ComposeLimits {
  MatchLimits match{};
  std::size_t instance_cap = 3;  // rows per grammar pattern
  std::optional<double> min_cd;  // results below this CD are dropped
};

struct BuildConfig {
  std::size_t beam = 200;     // W
  std::size_t stages = 12;    // S_max
  std::size_t results = 10;   // K
  std::size_t patience = 4;   // stages without a better best CD before stopping
  ComposeLimits compose{};
  CodeSchemeOptions coding{};
  CodeRule code_rule = CodeRule::id_symbols;
  std::optional<CodeScheme> scheme;  // overrides the per-grammar scheme
  unsigned threads = 0;              // 0 = hardware concurrency
};

struct BuildResult {
  std::shared_ptr<const AlignmentContext> ctx;
  std::vector<Alignment> retained;    // every alignment kept at some stage, "A<k>" is retained[k-1]
  std::vector<std::size_t> ranked;    // top K, best first, indices into retained
  std::size_t stages_run = 0;

  bool empty() const { return ranked.empty(); }
  const Alignment& best() const { return retained.at(ranked.at(0)); }
  const Alignment& by_id(const std::string& id) const;
};

std::shared_ptr<const AlignmentContext> make_context(const Pattern& new_pattern,
                                                     std::shared_ptr<const Grammar> grammar,
                                                     const CodeScheme& scheme,
                                                     CodeRule rule = CodeRule::id_symbols);

/// Row 0 only, no hits.
Alignment seed_alignment(std::shared_ptr<const AlignmentContext> ctx);

/// Every invariant violation; empty means valid.
std::vector<std::string> validate_alignment(const Alignment& a);

/// Candidates from matching the two operands; each is canonical and scored.
std::vector<Alignment> compose_pair(const std::shared_ptr<const AlignmentContext>& ctx, const Operand& x,
                                    const Operand& y, const ComposeLimits& limits = {});

/// Marks of the code pattern, in column order.
std::vector<MarkId> derive_code_pattern(const Alignment& a);
/// New positions left in single-symbol columns.
std::vector<std::size_t> residue_positions(const Alignment& a);

AlignmentScore score_alignment(const Alignment& a, const CodeScheme& scheme);
AlignmentScore score_alignment(const Alignment& a);

/// Total order used for ranking: CD, hit columns, row pattern ids, signature.
bool alignment_before(const Alignment& x, const Alignment& y);

BuildResult build_alignments(const Pattern& new_pattern, std::shared_ptr<const Grammar> grammar,
                             const BuildConfig& config = {});
BuildResult build_alignments(const Pattern& new_pattern, const Grammar& grammar, const BuildConfig& config = {});

/// Copy of `a` without row r, re-canonicalized and re-scored.
Alignment remove_row(const Alignment& a, std::size_t r);

// ============================================================================
// Probabilities, inferences, decoding
// ============================================================================

struct ProbabilityMember {
  Alignment alignment;  // after redundant-row editing
  double p_abs = 0.0;
  double p_rel = 0.0;
};

struct ProbabilityReport {
  std::string reference_id;
  std::vector<std::size_t> reference_symbols;  // New positions
  std::vector<ProbabilityMember> members;      // best first
  double p_a_sum = 0.0;
};

ProbabilityReport alignment_probabilities(const std::vector<Alignment>& candidates);
ProbabilityReport alignment_probabilities(const BuildResult& result);

struct Inference {
  std::string mark;
  std::size_t row = 0;
  std::string pattern_id;
};

std::vector<Inference> extract_inferences(const Alignment& a, bool include_id_symbols = false);

class DecodeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Content symbols regenerated from a code pattern.
Pattern decode_code_pattern(std::span<const MarkId> code, std::shared_ptr<const Grammar> grammar,
                            const BuildConfig& config = {});
Pattern decode_code_pattern(std::span<const MarkId> code, const Grammar& grammar, const BuildConfig& config = {});

// ============================================================================
// Audit trail and rendering
// ============================================================================

struct AuditRecord {
  std::string id;
  int stage = 0;
  std::vector<std::string> parents;
  double bn = 0.0, be = 0.0, cd = 0.0;
};

struct AuditTrail {
  std::vector<std::string> roots;
  std::vector<AuditRecord> records;

  std::string to_text() const;
  std::string to_json() const;
};

AuditTrail audit_trail(const BuildResult& result);

/// Rows of marks with `|` connectors between symbols that share a column.
std::string render_alignment(const Alignment& a);

}  // namespace sp
