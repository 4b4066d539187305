#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "sp/coding.hpp"
#include "sp/symbols.hpp"

namespace sp {

struct Hit {
  std::size_t pos_a = 0;
  std::size_t pos_b = 0;
  std::size_t gap = 0;  // symbols skipped in a plus in b since the previous hit

  bool operator==(const Hit&) const = default;
};

struct HitSequence {
  std::vector<Hit> hits;
  double log2_p = 0.0;

  double probability() const;
  std::size_t size() const { return hits.size(); }
  bool operator==(const HitSequence& o) const { return hits == o.hits; }
};

struct MatchLimits {
  std::size_t max_results = 12;                // K
  double min_probability = 1e-30;              // chains below this are not extended
  std::optional<std::size_t> max_gap;          // gamma; unbounded when empty
};

/// Optional veto on individual match points (i in a, j in b).
using MatchFilter = std::function<bool(std::size_t, std::size_t)>;

class OracleBoundError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// log2 of one factor 1 - (1 - p1)^(g + 1).
double hit_factor_log2(std::size_t gap, double p1);

/// Product over the gaps; throws std::invalid_argument unless gaps[0] == 0.
double hit_sequence_probability(std::span<const std::size_t> gaps, double p1);
double hit_sequence_log2_probability(std::span<const std::size_t> gaps, double p1);

/// True when x ranks before y: smaller p_n, then more hits, then smaller positions.
bool hit_sequence_before(const HitSequence& x, const HitSequence& y);

/**
 * Up to K maximal order-preserving hit sequences between a and b, best first.
 *
 * A chain is maximal when no further match point can be inserted before,
 * between or after its hits. Ranking is by p_n ascending: a lower chance
 * probability means a more significant match.
 */
std::vector<HitSequence> find_matches(std::span<const MarkId> a, std::span<const MarkId> b, double p1,
                                      const MatchLimits& limits = {}, const MatchFilter& filter = {});
std::vector<HitSequence> find_matches(std::span<const MarkId> a, std::span<const MarkId> b,
                                      const CodeScheme& scheme, const MatchLimits& limits = {});

/// Every maximal hit sequence, by exhaustive enumeration. Refuses |a| + |b| > bound.
std::vector<HitSequence> brute_force_matches(std::span<const MarkId> a, std::span<const MarkId> b, double p1,
                                             std::size_t bound = 24, const MatchFilter& filter = {},
                                             std::optional<std::size_t> max_gap = std::nullopt);

}  // namespace sp
