#include "sp/matcher.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "sp/kernels.hpp"

namespace sp {

namespace {

struct Point {
  std::uint32_t i, j;
};

std::vector<Point> match_points(std::span<const MarkId> a, std::span<const MarkId> b, const MatchFilter& filter) {
  std::vector<Point> pts;
  std::vector<std::uint32_t> hits;
  for (std::size_t i = 0; i < a.size(); ++i) {
    hits.clear();
    kernels::find_equal(b, a[i], hits);
    for (auto j : hits)
      if (!filter || filter(i, j)) pts.push_back({static_cast<std::uint32_t>(i), j});
  }
  return pts;  // already sorted by (i, j)
}

std::size_t gap_between(const Point& p, const Point& q) { return (q.i - p.i - 1) + (q.j - p.j - 1); }

bool within(std::optional<std::size_t> max_gap, std::size_t g) { return !max_gap || g <= *max_gap; }

// log2 p recomputed from the sorted gap multiset so equal multisets compare equal.
double canonical_log2(std::vector<std::size_t> gaps, double p1) {
  std::sort(gaps.begin(), gaps.end());
  double s = 0.0;
  for (auto g : gaps) s += hit_factor_log2(g, p1);
  return s;
}

HitSequence to_sequence(const std::vector<Point>& pts, const std::vector<std::uint32_t>& path, double p1) {
  HitSequence hs;
  std::vector<std::size_t> gaps;
  for (std::size_t k = 0; k < path.size(); ++k) {
    const auto& p = pts[path[k]];
    const std::size_t g = k == 0 ? 0 : gap_between(pts[path[k - 1]], p);
    hs.hits.push_back({p.i, p.j, g});
    gaps.push_back(g);
  }
  hs.log2_p = canonical_log2(std::move(gaps), p1);
  return hs;
}

bool lex_less(const HitSequence& x, const HitSequence& y) {
  return std::lexicographical_compare(x.hits.begin(), x.hits.end(), y.hits.begin(), y.hits.end(),
                                      [](const Hit& u, const Hit& v) {
                                        return u.pos_a != v.pos_a ? u.pos_a < v.pos_a : u.pos_b < v.pos_b;
                                      });
}

struct Partial {
  double log2_p;
  std::vector<std::uint32_t> path;
};

bool partial_before(const Partial& x, const Partial& y) {
  if (x.log2_p != y.log2_p) return x.log2_p < y.log2_p;
  if (x.path.size() != y.path.size()) return x.path.size() > y.path.size();
  return x.path < y.path;
}

}  // namespace

double HitSequence::probability() const { return std::exp2(log2_p); }

double hit_factor_log2(std::size_t gap, double p1) {
  if (!(p1 > 0.0 && p1 <= 1.0)) throw std::invalid_argument("p1 must lie in (0,1]");
  if (p1 == 1.0) return 0.0;
  // 1 - (1-p1)^(g+1) = -expm1((g+1) log(1-p1))
  const double t = static_cast<double>(gap + 1) * std::log1p(-p1);
  return std::log2(-std::expm1(t));
}

double hit_sequence_log2_probability(std::span<const std::size_t> gaps, double p1) {
  if (gaps.empty() || gaps[0] != 0) throw std::invalid_argument("first gap must be 0");
  double s = 0.0;
  for (auto g : gaps) s += hit_factor_log2(g, p1);
  return s;
}

double hit_sequence_probability(std::span<const std::size_t> gaps, double p1) {
  return std::exp2(hit_sequence_log2_probability(gaps, p1));
}

bool hit_sequence_before(const HitSequence& x, const HitSequence& y) {
  if (x.log2_p != y.log2_p) return x.log2_p < y.log2_p;
  if (x.size() != y.size()) return x.size() > y.size();
  return lex_less(x, y);
}

std::vector<HitSequence> find_matches(std::span<const MarkId> a, std::span<const MarkId> b, double p1,
                                      const MatchLimits& limits, const MatchFilter& filter) {
  if (limits.max_results == 0) throw std::invalid_argument("max_results must be at least 1");
  const auto pts = match_points(a, b, filter);
  const std::size_t M = pts.size();
  if (M == 0) return {};

  const std::size_t beam = limits.max_results * 4;
  const double floor_log2 = limits.min_probability > 0 ? std::log2(limits.min_probability)
                                                       : -std::numeric_limits<double>::infinity();

  // A chain is maximal only if each step has no match point strictly inside
  // its rectangle, nothing insertable in front of the first hit and nothing
  // after the last. Transitions are restricted to such steps.
  std::vector<char> can_start(M, 1), can_end(M, 1);
  for (std::size_t k = 0; k < M; ++k) {
    for (std::size_t q = 0; q < M; ++q) {
      if (pts[q].i < pts[k].i && pts[q].j < pts[k].j && within(limits.max_gap, gap_between(pts[q], pts[k])))
        can_start[k] = 0;
      if (pts[q].i > pts[k].i && pts[q].j > pts[k].j && within(limits.max_gap, gap_between(pts[k], pts[q])))
        can_end[k] = 0;
    }
  }

  std::vector<std::vector<Partial>> at(M);
  std::vector<Partial> finished;
  std::vector<Partial> cand;
  for (std::size_t k = 0; k < M; ++k) {
    cand.clear();
    const Point& cur = pts[k];
    if (can_start[k]) cand.push_back({hit_factor_log2(0, p1), {static_cast<std::uint32_t>(k)}});

    // immediate predecessors, scanning earlier rows from nearest to farthest
    long maxj = -1;
    std::size_t r = k;
    while (r > 0 && pts[r - 1].i == cur.i) --r;
    while (r > 0) {
      const std::uint32_t row = pts[r - 1].i;
      std::size_t lo = r;
      while (lo > 0 && pts[lo - 1].i == row) --lo;
      long row_max = -1;
      for (std::size_t q = lo; q < r; ++q) {
        const Point& p = pts[q];
        if (p.j >= cur.j) continue;
        row_max = std::max(row_max, static_cast<long>(p.j));
        if (static_cast<long>(p.j) < maxj) continue;
        const std::size_t g = gap_between(p, cur);
        if (!within(limits.max_gap, g)) continue;
        const double f = hit_factor_log2(g, p1);
        for (const auto& e : at[q]) {
          if (e.log2_p < floor_log2) continue;
          Partial n{e.log2_p + f, e.path};
          n.path.push_back(static_cast<std::uint32_t>(k));
          cand.push_back(std::move(n));
        }
      }
      maxj = std::max(maxj, row_max);
      r = lo;
    }

    if (cand.size() > beam) {
      std::partial_sort(cand.begin(), cand.begin() + static_cast<long>(beam), cand.end(), partial_before);
      cand.resize(beam);
    } else {
      std::sort(cand.begin(), cand.end(), partial_before);
    }
    at[k] = cand;
    for (const auto& e : at[k])
      if (can_end[k] || e.log2_p < floor_log2) finished.push_back(e);
  }

  std::vector<HitSequence> out;
  out.reserve(finished.size());
  for (const auto& e : finished) out.push_back(to_sequence(pts, e.path, p1));
  std::sort(out.begin(), out.end(), hit_sequence_before);
  out.erase(std::unique(out.begin(), out.end()), out.end());
  if (out.size() > limits.max_results) out.resize(limits.max_results);
  return out;
}

std::vector<HitSequence> find_matches(std::span<const MarkId> a, std::span<const MarkId> b,
                                      const CodeScheme& scheme, const MatchLimits& limits) {
  return find_matches(a, b, scheme.p1(), limits);
}

std::vector<HitSequence> brute_force_matches(std::span<const MarkId> a, std::span<const MarkId> b, double p1,
                                             std::size_t bound, const MatchFilter& filter,
                                             std::optional<std::size_t> max_gap) {
  if (a.size() + b.size() > bound)
    throw OracleBoundError("oracle refuses inputs longer than " + std::to_string(bound) + " symbols");

  // all match points, found without the kernels
  std::vector<Point> pts;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j)
      if (a[i] == b[j] && (!filter || filter(i, j)))
        pts.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j)});

  auto gaps_ok = [&](const std::vector<Point>& c) {
    for (std::size_t k = 1; k < c.size(); ++k)
      if (!within(max_gap, gap_between(c[k - 1], c[k]))) return false;
    return true;
  };
  auto less = [](const Point& p, const Point& q) { return p.i < q.i && p.j < q.j; };

  auto maximal = [&](const std::vector<Point>& c) {
    for (const auto& p : pts) {
      for (std::size_t slot = 0; slot <= c.size(); ++slot) {
        const bool after_prev = slot == 0 || less(c[slot - 1], p);
        const bool before_next = slot == c.size() || less(p, c[slot]);
        if (!after_prev || !before_next) continue;
        std::vector<Point> ext = c;
        ext.insert(ext.begin() + static_cast<long>(slot), p);
        if (gaps_ok(ext)) return false;
      }
    }
    return true;
  };

  std::vector<HitSequence> out;
  std::vector<Point> chain;
  std::function<void(std::size_t)> dfs = [&](std::size_t from) {
    if (!chain.empty() && maximal(chain)) {
      HitSequence hs;
      double prod = 1.0;
      for (std::size_t k = 0; k < chain.size(); ++k) {
        const std::size_t g = k == 0 ? 0 : gap_between(chain[k - 1], chain[k]);
        hs.hits.push_back({chain[k].i, chain[k].j, g});
        prod *= 1.0 - std::pow(1.0 - p1, static_cast<double>(g + 1));
      }
      hs.log2_p = std::log2(prod);
      out.push_back(std::move(hs));
    }
    for (std::size_t q = from; q < pts.size(); ++q) {
      if (!chain.empty() && !less(chain.back(), pts[q])) continue;
      if (!chain.empty() && !within(max_gap, gap_between(chain.back(), pts[q]))) continue;
      chain.push_back(pts[q]);
      dfs(q + 1);
      chain.pop_back();
    }
  };
  dfs(0);

  std::sort(out.begin(), out.end(), [](const HitSequence& x, const HitSequence& y) {
    if (x.size() != y.size()) return x.size() > y.size();
    return lex_less(x, y);
  });
  out.erase(std::unique(out.begin(), out.end()), out.end());
  std::stable_sort(out.begin(), out.end(), [](const HitSequence& x, const HitSequence& y) {
    return x.log2_p < y.log2_p;
  });
  return out;
}

}  // namespace sp
