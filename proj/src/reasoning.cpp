#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <unordered_set>

#include "sp/alignment.hpp"

namespace sp {

namespace {

bool is_subsequence(std::span<const MarkId> small, std::span<const MarkId> big) {
  std::size_t i = 0;
  for (std::size_t j = 0; j < big.size() && i < small.size(); ++j)
    if (small[i] == big[j]) ++i;
  return i == small.size();
}

// Drops rows whose marks occur, in order, inside another row of a different pattern.
Alignment drop_redundant_rows(Alignment a) {
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t r = 1; r < a.rows.size() && !changed; ++r) {
      for (std::size_t q = 1; q < a.rows.size(); ++q) {
        if (q == r || a.rows[q] == a.rows[r]) continue;
        if (is_subsequence(a.row_pattern(r).ids(), a.row_pattern(q).ids())) {
          a = remove_row(a, r);
          changed = true;
          break;
        }
      }
    }
  }
  return a;
}

using Relation = std::pair<std::pair<int, int>, std::pair<int, int>>;

struct Shape {
  std::map<int, int> rows;
  std::set<Relation> links;
};

Shape shape_of(const Alignment& a) {
  Shape s;
  for (std::size_t r = 1; r < a.rows.size(); ++r) ++s.rows[a.rows[r]];
  for (const auto& col : a.columns)
    for (std::size_t i = 0; i < col.cells.size(); ++i)
      for (std::size_t j = i + 1; j < col.cells.size(); ++j) {
        std::pair<int, int> u{a.rows[col.cells[i].row], col.cells[i].pos};
        std::pair<int, int> v{a.rows[col.cells[j].row], col.cells[j].pos};
        s.links.insert(u < v ? Relation{u, v} : Relation{v, u});
      }
  return s;
}

// Old rows joined through Old-Old cells only
bool old_connected(const Alignment& a) {
  const std::size_t n = a.rows.size();
  if (n <= 2) return true;
  std::vector<std::size_t> parent(n);
  for (std::size_t i = 0; i < n; ++i) parent[i] = i;
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& col : a.columns) {
    std::size_t first = n;
    for (const auto& c : col.cells) {
      if (c.row == 0) continue;
      if (first == n) first = c.row;
      else parent[find(c.row)] = find(first);
    }
  }
  for (std::size_t r = 2; r < n; ++r)
    if (find(r) != find(1)) return false;
  return true;
}

// x is part of y: every row and every link of x also occurs in y
bool subsumed(const Shape& x, const Shape& y) {
  for (const auto& [p, n] : x.rows) {
    auto it = y.rows.find(p);
    if (it == y.rows.end() || it->second < n) return false;
  }
  return std::includes(y.links.begin(), y.links.end(), x.links.begin(), x.links.end());
}

}  // namespace

ProbabilityReport alignment_probabilities(const std::vector<Alignment>& candidates) {
  ProbabilityReport rep;
  if (candidates.empty()) return rep;
  const Alignment* ref = &candidates[0];
  for (const auto& a : candidates)
    if (alignment_before(a, *ref)) ref = &a;
  rep.reference_id = ref->id;
  rep.reference_symbols = ref->hit_new_positions();

  std::vector<Alignment> members;
  std::unordered_set<std::string> sigs;
  for (const auto& a : candidates) {
    if (a.hit_new_positions() != rep.reference_symbols) continue;
    Alignment e = drop_redundant_rows(a);
    if (e.hit_new_positions() != rep.reference_symbols) continue;
    if (!old_connected(e)) continue;
    if (!sigs.insert(e.signature()).second) continue;
    members.push_back(std::move(e));
  }

  std::vector<Shape> shapes;
  for (const auto& m : members) shapes.push_back(shape_of(m));
  // nested pairs describe one analysis at two levels of completeness; keep the cheaper
  std::vector<Alignment> kept;
  for (std::size_t i = 0; i < members.size(); ++i) {
    bool beaten = false;
    for (std::size_t j = 0; j < members.size() && !beaten; ++j) {
      if (j == i || members[j].score.be >= members[i].score.be) continue;
      beaten = subsumed(shapes[j], shapes[i]) || subsumed(shapes[i], shapes[j]);
    }
    if (!beaten) kept.push_back(std::move(members[i]));
  }
  std::sort(kept.begin(), kept.end(), [](const Alignment& x, const Alignment& y) {
    if (x.score.be != y.score.be) return x.score.be < y.score.be;
    return alignment_before(x, y);
  });

  if (kept.empty()) return rep;
  const double log2_a = std::log2(static_cast<double>(kept[0].ctx->scheme.alphabet_size()));
  const double min_be = kept[0].score.be;
  double rel_sum = 0.0;
  for (const auto& a : kept) rel_sum += std::exp2(-(a.score.be - min_be) * log2_a);
  for (auto& a : kept) {
    ProbabilityMember m;
    m.p_abs = std::exp2(-a.score.be * log2_a);
    m.p_rel = std::exp2(-(a.score.be - min_be) * log2_a) / rel_sum;
    rep.p_a_sum += m.p_abs;
    m.alignment = std::move(a);
    rep.members.push_back(std::move(m));
  }
  return rep;
}

ProbabilityReport alignment_probabilities(const BuildResult& result) {
  std::vector<Alignment> reported;
  for (std::size_t k : result.ranked) reported.push_back(result.retained[k]);
  return alignment_probabilities(reported);
}

std::vector<Inference> extract_inferences(const Alignment& a, bool include_id_symbols) {
  std::vector<Inference> out;
  for (const auto& col : a.columns) {
    if (col.has_new()) continue;
    const auto& cell = col.cells.front();
    const auto& s = a.symbol(cell);
    if (!include_id_symbols && s.kind != SymbolKind::content) continue;
    out.push_back({s.mark, cell.row, Grammar::pattern_id(static_cast<std::size_t>(a.rows[cell.row]))});
  }
  return out;
}

}  // namespace sp
