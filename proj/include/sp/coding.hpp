#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "sp/core.hpp"

namespace sp {

enum class CodeSizeMode { sfe, ideal };

const char* to_string(CodeSizeMode m);
CodeSizeMode parse_code_size_mode(std::string_view s);

/// Non-negative number of bits.
class BitCost {
 public:
  BitCost() = default;
  explicit BitCost(double bits);
  double bits() const { return bits_; }
  BitCost& operator+=(BitCost o) {
    bits_ += o.bits_;
    return *this;
  }
  friend BitCost operator+(BitCost a, BitCost b) { return a += b; }
  auto operator<=>(const BitCost&) const = default;

 private:
  double bits_ = 0.0;
};

class UnknownMarkError : public std::runtime_error {
 public:
  explicit UnknownMarkError(const std::string& mark)
      : std::runtime_error("mark '" + mark + "' has no code"), mark_(mark) {}
  const std::string& mark() const { return mark_; }

 private:
  std::string mark_;
};

struct CodeSchemeOptions {
  CodeSizeMode mode = CodeSizeMode::sfe;
  std::uint32_t alphabet_size = 2;  // |A| for matching and p_ABS
};

/**
 * Symbol types with their frequencies and code sizes.
 *
 * SFE lengths are ceil(log2(1/p)) + 1, computed with integer arithmetic so that
 * exact powers of two never round the wrong way.
 */
class CodeScheme {
 public:
  struct Entry {
    std::uint64_t frequency = 0;
    double code_size = 0.0;
  };

  CodeScheme() = default;
  CodeScheme(const std::vector<std::pair<MarkId, std::uint64_t>>& freqs, CodeSchemeOptions opts);

  bool contains(MarkId m) const { return entries_.count(m) != 0; }
  const Entry& entry(MarkId m) const;
  double code_size(MarkId m) const { return entry(m).code_size; }
  std::uint64_t frequency(MarkId m) const { return entry(m).frequency; }
  /// Cost for marks outside the scheme: the largest code size present.
  double max_code_size() const { return max_size_; }
  std::uint64_t total_frequency() const { return total_; }

  /// Types sorted by mark spelling.
  std::vector<MarkId> types() const;
  std::size_t size() const { return entries_.size(); }

  CodeSizeMode mode() const { return opts_.mode; }
  std::uint32_t alphabet_size() const { return opts_.alphabet_size; }
  double p1() const { return 1.0 / static_cast<double>(opts_.alphabet_size); }
  const CodeSchemeOptions& options() const { return opts_; }

  /// Marks dropped because their frequency was zero.
  const std::vector<std::string>& warnings() const { return warnings_; }
  void add_warning(std::string w) { warnings_.push_back(std::move(w)); }

  /// Copy with every code size multiplied by `k`.
  CodeScheme scaled(double k) const;

 private:
  std::unordered_map<MarkId, Entry> entries_;
  CodeSchemeOptions opts_;
  std::uint64_t total_ = 0;
  double max_size_ = 0.0;
  std::vector<std::string> warnings_;
};

/// ceil(log2(total/f)) + 1, exact for integer frequencies.
int sfe_length(std::uint64_t f, std::uint64_t total);

/// f_st = sum_i f_i * o_i over the patterns.
CodeScheme build_code_scheme(std::span<const Pattern> patterns, CodeSchemeOptions opts = {});

/// Occurrences of marks in one alignment, as a flat list of mark ids.
using MarkBag = std::vector<MarkId>;
/// One subset per New pattern, each a set of alignments.
using AlignmentSubsets = std::vector<std::vector<MarkBag>>;

/// F_i = sum_j max over alignments of b_j of the count of mark i.
std::unordered_map<MarkId, std::uint64_t> type_frequencies(const AlignmentSubsets& subsets,
                                                           std::span<const MarkId> types);

/**
 * Per-alignment-set scheme. Types come from the patterns; types never seen in
 * any subset are dropped with a warning. Throws if every type is zero.
 */
CodeScheme build_code_scheme(std::span<const Pattern> patterns, const AlignmentSubsets& subsets,
                             CodeSchemeOptions opts = {});

BitCost code_size_of_sequence(std::span<const MarkId> seq, const CodeScheme& scheme);

/// H = -sum p log2 p. Throws std::invalid_argument unless normalized.
double entropy(std::span<const double> probabilities);

/// R = sum (f_i - 1) * s_i.
double redundancy(std::span<const std::pair<double, double>> freq_size);

struct SearchSpace {
  boost::multiprecision::cpp_int P;  // 2^N - 1
  boost::multiprecision::cpp_int C;  // P(P-1)/2
};

SearchSpace search_space_stats(unsigned N);

}  // namespace sp
