#include <algorithm>
#include <map>
#include <queue>
#include <set>
#include <stdexcept>
#include <tuple>

#include "alignment_internal.hpp"
#include "sp/alignment.hpp"

namespace sp {

namespace detail {

namespace {
// per-thread buffers; canonicalize runs for every candidate alignment
struct CanonScratch {
  std::vector<std::size_t> base, topo, stack, order;
  std::vector<std::uint32_t> col_at, indeg;
  std::vector<int> first_new, first_any, cls, lo, hi, new_row;
  std::vector<std::pair<std::uint64_t, std::uint32_t>> key;
};
using Key = std::pair<std::uint64_t, std::uint32_t>;
}  // namespace

void canonicalize(Alignment& a) {
  const std::size_t C = a.columns.size(), R = a.rows.size();
  thread_local CanonScratch w;
  // Every column gets a target position on the New axis. New columns sit at
  // their own position. Old material ahead of a row's first New hit sits just
  // before the next New symbol it must precede; other Old material just after
  // the last New symbol it must follow. Rows without New hits use their first
  // hit instead.
  enum : int { asap = 0, anchored = 1, alap = 2 };
  constexpr int none = 1 << 30;
  auto& base = w.base;  // flat (row, pos) index
  base.assign(R + 1, 0);
  for (std::size_t r = 0; r < R; ++r) base[r + 1] = base[r] + a.row_pattern(r).size();
  auto& col_at = w.col_at;
  col_at.assign(base[R], 0);
  auto &first_new = w.first_new, &first_any = w.first_any;
  first_new.assign(R, none);
  first_any.assign(R, none);
  for (std::size_t c = 0; c < C; ++c) {
    const auto& col = a.columns[c];
    for (const auto& cell : col.cells) {
      col_at[base[cell.row] + cell.pos] = static_cast<std::uint32_t>(c);
      const int p = static_cast<int>(cell.pos);
      if (col.cells.size() > 1) first_any[cell.row] = std::min(first_any[cell.row], p);
      if (col.cells.size() > 1 && col.has_new()) first_new[cell.row] = std::min(first_new[cell.row], p);
    }
  }
  auto& cls = w.cls;
  cls.assign(C, anchored);
  for (std::size_t c = 0; c < C; ++c) {
    const auto& col = a.columns[c];
    if (col.has_new()) continue;
    bool direct = false, lead_direct = false, lead_other = false;
    for (const auto& cell : col.cells) {
      const int p = static_cast<int>(cell.pos);
      if (first_new[cell.row] != none) {
        direct = true;
        lead_direct = lead_direct || p < first_new[cell.row];
      } else {
        lead_other = lead_other || p < first_any[cell.row];
      }
    }
    cls[c] = (direct ? lead_direct : lead_other) ? alap : asap;
  }

  // row neighbours give the column order constraints
  auto each_succ = [&](std::size_t c, auto&& f) {
    for (const auto& cell : a.columns[c].cells) {
      const std::size_t k = base[cell.row] + cell.pos + 1;
      if (k < base[cell.row + 1]) f(col_at[k]);
    }
  };
  auto each_pred = [&](std::size_t c, auto&& f) {
    for (const auto& cell : a.columns[c].cells)
      if (cell.pos > 0) f(col_at[base[cell.row] + cell.pos - 1]);
  };
  auto& indeg = w.indeg;
  auto count_preds = [&] {
    indeg.assign(C, 0);
    for (std::size_t c = 0; c < C; ++c)
      for (const auto& cell : a.columns[c].cells) indeg[c] += cell.pos > 0;
  };
  count_preds();

  auto& topo = w.topo;
  topo.clear();
  {
    auto& stack = w.stack;
    stack.clear();
    for (std::size_t c = 0; c < C; ++c)
      if (indeg[c] == 0) stack.push_back(c);
    while (!stack.empty()) {
      const auto c = stack.back();
      stack.pop_back();
      topo.push_back(c);
      each_succ(c, [&](std::size_t s2) {
        if (--indeg[s2] == 0) stack.push_back(s2);
      });
    }
    if (topo.size() != C) throw std::logic_error("alignment columns contain a cycle");
  }
  const int n_new = static_cast<int>(a.ctx->new_pattern.size());
  auto &lo = w.lo, &hi = w.hi;
  lo.assign(C, -1);
  hi.assign(C, n_new);
  for (auto c : topo) {
    if (a.columns[c].has_new()) lo[c] = a.columns[c].cells[0].pos;
    each_succ(c, [&](std::size_t s2) { lo[s2] = std::max(lo[s2], lo[c]); });
  }
  for (auto it = topo.rbegin(); it != topo.rend(); ++it) {
    const auto c = *it;
    if (a.columns[c].has_new()) hi[c] = a.columns[c].cells[0].pos;
    each_pred(c, [&](std::size_t p) { hi[p] = std::min(hi[p], hi[c]); });
  }

  // (target, class, pattern, pos, row) packed; target in quarter steps
  auto& key = w.key;
  key.resize(C);
  for (std::size_t c = 0; c < C; ++c) {
    std::int64_t t4 = 0;
    if (cls[c] == anchored) t4 = 4 * lo[c];
    else if (cls[c] == alap) t4 = 4 * hi[c] - 1;
    else t4 = 4 * lo[c] + 1;
    const std::uint64_t head = (static_cast<std::uint64_t>(t4 + 8) << 34) | (static_cast<std::uint64_t>(cls[c]) << 32);
    Key best{~std::uint64_t{0}, 0};
    for (const auto& cell : a.columns[c].cells)
      best = std::min(best, Key{head | static_cast<std::uint32_t>(a.rows[cell.row] + 1),
                                (static_cast<std::uint32_t>(cell.pos) << 16) | cell.row});
    key[c] = best;
  }

  auto after = [&](std::size_t x, std::size_t y) { return key[x] > key[y]; };
  auto& ready = w.stack;  // min-heap on key
  ready.clear();
  count_preds();
  for (std::size_t c = 0; c < C; ++c)
    if (indeg[c] == 0) ready.push_back(c);
  std::make_heap(ready.begin(), ready.end(), after);
  auto& order = w.order;
  order.clear();
  while (!ready.empty()) {
    std::pop_heap(ready.begin(), ready.end(), after);
    const auto c = ready.back();
    ready.pop_back();
    order.push_back(c);
    each_succ(c, [&](std::size_t s2) {
      if (--indeg[s2] == 0) {
        ready.push_back(s2);
        std::push_heap(ready.begin(), ready.end(), after);
      }
    });
  }
  if (order.size() != C) throw std::logic_error("alignment columns contain a cycle");

  auto& new_row = w.new_row;
  new_row.assign(R, -1);
  std::vector<int> rows{a.rows[0]};
  new_row[0] = 0;
  std::vector<Column> cols;
  cols.reserve(C);
  for (auto c : order) {
    Column col = std::move(a.columns[c]);
    for (auto& cell : col.cells) {
      if (new_row[cell.row] < 0) {
        new_row[cell.row] = static_cast<int>(rows.size());
        rows.push_back(a.rows[cell.row]);
      }
      cell.row = static_cast<std::uint16_t>(new_row[cell.row]);
    }
    if (col.cells.size() > 1)
      std::sort(col.cells.begin(), col.cells.end(), [](const Cell& x, const Cell& y) { return x.row < y.row; });
    cols.push_back(std::move(col));
  }
  a.rows = std::move(rows);
  a.columns = std::move(cols);
}

std::vector<Column> merge_columns(const std::vector<Column>& left, const std::vector<Column>& right,
                                  const std::vector<std::pair<std::size_t, std::size_t>>& pairs) {
  std::vector<Column> out;
  out.reserve(left.size() + right.size());
  std::size_t li = 0, ri = 0;
  for (const auto& [l, r] : pairs) {
    while (li < l) out.push_back(left[li++]);
    while (ri < r) out.push_back(right[ri++]);
    Column fused = left[li++];
    for (const auto& cell : right[ri++].cells)
      if (std::find(fused.cells.begin(), fused.cells.end(), cell) == fused.cells.end()) fused.cells.push_back(cell);
    std::sort(fused.cells.begin(), fused.cells.end(), [](const Cell& x, const Cell& y) { return x.row < y.row; });
    out.push_back(std::move(fused));
  }
  while (li < left.size()) out.push_back(left[li++]);
  while (ri < right.size()) out.push_back(right[ri++]);
  return out;
}

std::size_t instances_of(const Alignment& a, int pattern) {
  return static_cast<std::size_t>(std::count(a.rows.begin(), a.rows.end(), pattern));
}

}  // namespace detail

namespace {

bool in_code(const Symbol& s, CodeRule rule) {
  return rule == CodeRule::all_old_singles || s.kind != SymbolKind::content;
}

// Scores are independent of column order, so the bound is checked before canonicalizing.
void finish(std::vector<Alignment>& out, const std::shared_ptr<const AlignmentContext>& ctx, std::vector<int> rows,
            std::vector<Column> cols, const std::vector<std::string>& parents, const ComposeLimits& limits) {
  Alignment a;
  a.ctx = ctx;
  a.rows = std::move(rows);
  a.columns = std::move(cols);
  a.score = score_alignment(a);
  if (limits.min_cd && a.score.cd < *limits.min_cd) return;
  a.parents = parents;
  detail::canonicalize(a);
  out.push_back(std::move(a));
}

std::string operand_id(const Operand& o) {
  switch (o.kind) {
    case Operand::Kind::new_pattern: return "N";
    case Operand::Kind::old_pattern: return Grammar::pattern_id(o.pattern);
    case Operand::Kind::alignment: return o.alignment->id;
  }
  return "?";
}

// 1: first symbol of an Old row, 2: last. Two starts (or two ends) never share a column.
unsigned edge_of(const Alignment& a, const Cell& c) {
  if (c.row == 0) return 0;
  return (c.pos == 0 ? 1u : 0u) | (c.pos + 1u == a.row_pattern(c.row).size() ? 2u : 0u);
}

std::vector<Alignment> with_pattern(const std::shared_ptr<const AlignmentContext>& ctx, const Alignment& a,
                                    std::size_t pattern, const ComposeLimits& limits,
                                    std::vector<std::string> parents) {
  const int pid = static_cast<int>(pattern);
  if (detail::instances_of(a, pid) >= limits.instance_cap) return {};
  std::vector<MarkId> keys;
  std::vector<std::size_t> where;
  std::vector<unsigned> edges;
  for (std::size_t c = 0; c < a.columns.size(); ++c) {
    const auto& col = a.columns[c];
    if (!col.single() || a.rows[col.cells[0].row] == pid) continue;
    keys.push_back(a.mark(col.cells[0]));
    where.push_back(c);
    edges.push_back(edge_of(a, col.cells[0]));
  }
  if (keys.empty()) return {};
  const Pattern& p = ctx->pattern(pid);
  auto filter = [&](std::size_t i, std::size_t j) {
    unsigned e = (j == 0 ? 1u : 0u) | (j + 1 == p.size() ? 2u : 0u);
    return (edges[i] & e) == 0;
  };
  auto hits = find_matches(keys, p.ids(), ctx->scheme.p1(), limits.match, filter);

  const auto row = static_cast<std::uint16_t>(a.rows.size());
  std::vector<Column> right(p.size());
  for (std::size_t k = 0; k < p.size(); ++k) right[k].cells = {Cell{row, static_cast<std::uint16_t>(k)}};
  auto rows = a.rows;
  rows.push_back(pid);

  std::vector<Alignment> out;
  for (const auto& hs : hits) {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (const auto& h : hs.hits) pairs.emplace_back(where[h.pos_a], h.pos_b);
    finish(out, ctx, rows, detail::merge_columns(a.columns, right, pairs), parents, limits);
  }
  return out;
}

// Unmatched New symbols against the alignment's own single Old columns. A pair
// is allowed only where the column partial order leaves room for it.
std::vector<Alignment> with_new(const std::shared_ptr<const AlignmentContext>& ctx, const Alignment& a,
                                const ComposeLimits& limits, std::vector<std::string> parents) {
  if (a.rows.size() < 2) return {};
  const std::size_t C = a.columns.size();
  const int n_new = static_cast<int>(ctx->new_pattern.size());
  std::vector<std::vector<std::size_t>> col_of(a.rows.size());
  for (std::size_t r = 0; r < a.rows.size(); ++r) col_of[r].assign(a.row_pattern(r).size(), 0);
  for (std::size_t c = 0; c < C; ++c)
    for (const auto& cell : a.columns[c].cells) col_of[cell.row][cell.pos] = c;
  // columns are stored in a topological order
  std::vector<int> lo(C, -1), hi(C, n_new);
  for (std::size_t c = 0; c < C; ++c) {
    const auto& col = a.columns[c];
    if (col.has_new()) lo[c] = col.cells[0].pos;
    for (const auto& cell : col.cells)
      if (cell.pos + 1u < col_of[cell.row].size()) {
        auto& l = lo[col_of[cell.row][cell.pos + 1]];
        l = std::max(l, lo[c]);
      }
  }
  for (std::size_t c = C; c-- > 0;) {
    const auto& col = a.columns[c];
    if (col.has_new()) hi[c] = col.cells[0].pos;
    for (const auto& cell : col.cells)
      if (cell.pos > 0) {
        auto& h = hi[col_of[cell.row][cell.pos - 1]];
        h = std::min(h, hi[c]);
      }
  }

  std::vector<MarkId> olds, news;
  std::vector<std::size_t> old_col, new_col;
  for (std::size_t c = 0; c < C; ++c) {
    const auto& col = a.columns[c];
    if (!col.single()) continue;
    if (col.has_new()) {
      news.push_back(a.mark(col.cells[0]));
      new_col.push_back(c);
    } else {
      olds.push_back(a.mark(col.cells[0]));
      old_col.push_back(c);
    }
  }
  if (olds.empty() || news.empty()) return {};
  auto filter = [&](std::size_t i, std::size_t j) {
    const int pos = a.columns[new_col[j]].cells[0].pos;
    return lo[old_col[i]] < pos && pos < hi[old_col[i]];
  };
  auto hits = find_matches(olds, news, ctx->scheme.p1(), limits.match, filter);

  std::vector<Alignment> out;
  for (const auto& hs : hits) {
    std::vector<Column> cols = a.columns;
    std::vector<bool> drop(C, false);
    for (const auto& h : hs.hits) {
      auto& target = cols[old_col[h.pos_a]];
      target.cells.insert(target.cells.begin(), a.columns[new_col[h.pos_b]].cells[0]);
      drop[new_col[h.pos_b]] = true;
    }
    std::vector<Column> kept;
    for (std::size_t c = 0; c < C; ++c)
      if (!drop[c]) kept.push_back(std::move(cols[c]));
    try {
      finish(out, ctx, a.rows, std::move(kept), parents, limits);
    } catch (const std::logic_error&) {
      // the pairs closed a cycle
    }
  }
  return out;
}

std::vector<std::uint64_t> new_hit_mask(const Alignment& a) {
  std::vector<std::uint64_t> m((a.ctx->new_pattern.size() + 63) / 64, 0);
  for (const auto& col : a.columns)
    if (col.has_new() && col.cells.size() > 1) m[col.cells[0].pos / 64] |= 1ull << (col.cells[0].pos % 64);
  return m;
}

std::vector<Alignment> with_alignment(const std::shared_ptr<const AlignmentContext>& ctx, const Alignment& x,
                                      const Alignment& y, const ComposeLimits& limits,
                                      std::vector<std::string> parents) {
  if (x.rows.size() < 2 || y.rows.size() < 2) return {};
  {
    auto mx = new_hit_mask(x), my = new_hit_mask(y);
    for (std::size_t k = 0; k < mx.size(); ++k)
      if (mx[k] & my[k]) return {};
  }
  std::map<int, std::size_t> count;
  for (std::size_t r = 1; r < x.rows.size(); ++r) ++count[x.rows[r]];
  for (std::size_t r = 1; r < y.rows.size(); ++r)
    if (++count[y.rows[r]] > limits.instance_cap) return {};

  // y's rows follow x's; row 0 is shared
  const auto offset = static_cast<std::uint16_t>(x.rows.size() - 1);
  std::vector<Column> right = y.columns;
  for (auto& col : right)
    for (auto& cell : col.cells)
      if (cell.row != 0) cell.row = static_cast<std::uint16_t>(cell.row + offset);
  auto rows = x.rows;
  rows.insert(rows.end(), y.rows.begin() + 1, y.rows.end());

  struct Key {
    MarkId mark;
    int pattern;  // kNewRow for New columns
    std::size_t column;
    std::size_t new_pos;
    unsigned edge = 0;
  };
  auto keyed = [](const Alignment& a) {
    std::vector<Key> v;
    for (std::size_t c = 0; c < a.columns.size(); ++c) {
      const auto& col = a.columns[c];
      if (col.has_new())
        v.push_back({a.mark(col.cells[0]), kNewRow, c, col.cells[0].pos});
      else if (col.single())
        v.push_back({a.mark(col.cells[0]), a.rows[col.cells[0].row], c, 0, edge_of(a, col.cells[0])});
    }
    return v;
  };
  const auto kx = keyed(x), ky = keyed(y);
  const std::size_t n_new = ctx->new_pattern.size();

  auto compatible = [&](std::size_t i, std::size_t j) {
    const auto &u = kx[i], &v = ky[j];
    if (u.pattern == kNewRow || v.pattern == kNewRow)
      return u.pattern == kNewRow && v.pattern == kNewRow && u.new_pos == v.new_pos;
    return u.pattern != v.pattern && (u.edge & v.edge) == 0;
  };

  bool shared = false;
  {
    std::set<std::pair<MarkId, int>> xs;
    for (const auto& k : kx)
      if (k.pattern != kNewRow) xs.insert({k.mark, k.pattern});
    for (const auto& k : ky) {
      if (k.pattern == kNewRow) continue;
      auto it = xs.lower_bound({k.mark, -2});
      for (; it != xs.end() && it->first == k.mark && !shared; ++it) shared = it->second != k.pattern;
      if (shared) break;
    }
  }

  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> variants;
  auto anchors_only = [&] {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    std::size_t j = 0;
    for (const auto& u : kx) {
      if (u.pattern != kNewRow) continue;
      while (ky[j].pattern != kNewRow) ++j;
      pairs.emplace_back(u.column, ky[j++].column);
    }
    return pairs;
  };
  if (!shared) {
    variants.push_back(anchors_only());
  } else {
    std::vector<MarkId> ax, ay;
    for (const auto& k : kx) ax.push_back(k.mark);
    for (const auto& k : ky) ay.push_back(k.mark);
    auto hits = find_matches(ax, ay, ctx->scheme.p1(), limits.match, compatible);
    for (const auto& hs : hits) {
      std::size_t anchors = 0;
      for (const auto& h : hs.hits) anchors += kx[h.pos_a].pattern == kNewRow;
      if (anchors != n_new) continue;
      std::vector<std::pair<std::size_t, std::size_t>> pairs;
      for (const auto& h : hs.hits) pairs.emplace_back(kx[h.pos_a].column, ky[h.pos_b].column);
      variants.push_back(std::move(pairs));
    }
    if (variants.empty()) variants.push_back(anchors_only());
  }

  std::vector<Alignment> out;
  for (const auto& pairs : variants)
    finish(out, ctx, rows, detail::merge_columns(x.columns, right, pairs), parents, limits);
  return out;
}

}  // namespace

std::vector<std::size_t> Alignment::hit_new_positions() const {
  std::vector<std::size_t> v;
  for (const auto& col : columns)
    if (col.has_new() && col.cells.size() > 1) v.push_back(col.cells[0].pos);
  return v;
}

std::string Alignment::signature() const {
  std::string s;
  signature_into(s);
  return s;
}

void Alignment::signature_into(std::string& s) const {
  s.clear();
  s.reserve(8 + rows.size() * 4 + columns.size() * 6);
  auto put = [&s](std::uint32_t v) {
    for (int k = 0; k < 4; ++k) s.push_back(static_cast<char>((v >> (8 * k)) & 0xff));
  };
  put(static_cast<std::uint32_t>(rows.size()));
  for (int r : rows) put(static_cast<std::uint32_t>(r));
  for (const auto& col : columns) {
    s.push_back(static_cast<char>(col.cells.size()));
    for (const auto& cell : col.cells) put((static_cast<std::uint32_t>(cell.row) << 16) | cell.pos);
  }
}

std::shared_ptr<const AlignmentContext> make_context(const Pattern& new_pattern,
                                                     std::shared_ptr<const Grammar> grammar,
                                                     const CodeScheme& scheme, CodeRule rule) {
  auto ctx = std::make_shared<AlignmentContext>();
  ctx->new_pattern = new_pattern.with_role(Role::New);
  ctx->grammar = std::move(grammar);
  ctx->scheme = scheme;
  ctx->code_rule = rule;
  return ctx;
}

Alignment seed_alignment(std::shared_ptr<const AlignmentContext> ctx) {
  Alignment a;
  a.rows = {kNewRow};
  for (std::size_t k = 0; k < ctx->new_pattern.size(); ++k)
    a.columns.push_back(Column{{Cell{0, static_cast<std::uint16_t>(k)}}});
  a.id = "N";
  a.ctx = std::move(ctx);
  a.score = score_alignment(a);
  return a;
}

std::vector<std::string> validate_alignment(const Alignment& a) {
  std::vector<std::string> v;
  if (a.rows.empty() || a.rows[0] != kNewRow) {
    v.emplace_back("row 0 is not the New pattern");
    return v;
  }
  std::vector<std::vector<int>> seen(a.rows.size());
  for (std::size_t r = 0; r < a.rows.size(); ++r) seen[r].assign(a.row_pattern(r).size(), 0);
  std::vector<int> last(a.rows.size(), -1);
  for (std::size_t c = 0; c < a.columns.size(); ++c) {
    const auto& col = a.columns[c];
    if (col.cells.empty()) v.push_back("column " + std::to_string(c) + " is empty");
    std::set<std::uint16_t> rows_here;
    for (const auto& cell : col.cells) {
      if (cell.row >= a.rows.size() || cell.pos >= seen[cell.row].size()) {
        v.push_back("column " + std::to_string(c) + " refers to a missing symbol");
        continue;
      }
      if (!rows_here.insert(cell.row).second) v.push_back("column " + std::to_string(c) + " repeats a row");
      ++seen[cell.row][cell.pos];
      if (static_cast<int>(cell.pos) <= last[cell.row])
        v.push_back("row " + std::to_string(cell.row) + " is out of order at column " + std::to_string(c));
      last[cell.row] = cell.pos;
      if (a.mark(cell) != a.mark(col.cells.front()))
        v.push_back("column " + std::to_string(c) + " mixes marks");
    }
  }
  for (std::size_t r = 0; r < seen.size(); ++r)
    for (std::size_t p = 0; p < seen[r].size(); ++p)
      if (seen[r][p] != 1)
        v.push_back("row " + std::to_string(r) + " symbol " + std::to_string(p) + " appears " +
                    std::to_string(seen[r][p]) + " times");
  return v;
}

std::vector<Alignment> compose_pair(const std::shared_ptr<const AlignmentContext>& ctx, const Operand& x,
                                    const Operand& y, const ComposeLimits& limits) {
  using K = Operand::Kind;
  std::vector<std::string> parents{operand_id(x), operand_id(y)};
  if (x.kind == K::old_pattern && y.kind == K::old_pattern) return {};  // New must take part
  if (x.kind == K::old_pattern) return compose_pair(ctx, y, x, limits);
  if (x.kind == K::new_pattern && y.kind == K::alignment) return compose_pair(ctx, y, x, limits);
  std::optional<Alignment> seed;
  auto as_alignment = [&](const Operand& o) -> const Alignment* {
    if (o.kind == K::alignment) return o.alignment;
    if (!seed) seed = seed_alignment(ctx);
    return &*seed;
  };
  const Alignment* ax = as_alignment(x);
  if (y.kind == K::old_pattern) return with_pattern(ctx, *ax, y.pattern, limits, parents);
  if (y.kind == K::new_pattern) return x.kind == K::alignment ? with_new(ctx, *ax, limits, parents) : std::vector<Alignment>{};
  const Alignment* ay = as_alignment(y);
  return with_alignment(ctx, *ax, *ay, limits, parents);
}

std::vector<MarkId> derive_code_pattern(const Alignment& a) {
  std::vector<MarkId> code;
  for (const auto& col : a.columns) {
    if (!col.single() || col.has_new()) continue;
    const auto& s = a.symbol(col.cells[0]);
    if (in_code(s, a.ctx->code_rule)) code.push_back(s.id);
  }
  return code;
}

std::vector<std::size_t> residue_positions(const Alignment& a) {
  std::vector<std::size_t> v;
  for (const auto& col : a.columns)
    if (col.single() && col.has_new()) v.push_back(col.cells[0].pos);
  return v;
}

AlignmentScore score_alignment(const Alignment& a, const CodeScheme& scheme) {
  AlignmentScore s;
  for (const auto& col : a.columns) {
    if (col.cells.size() > 1) {
      ++s.hit_columns;
      if (col.has_new()) s.bn += scheme.code_size(a.mark(col.cells[0]));
    } else if (!col.has_new()) {
      const auto& sym = a.symbol(col.cells[0]);
      if (in_code(sym, a.ctx->code_rule)) s.be += scheme.code_size(sym.id);
      else if (sym.kind == SymbolKind::content) ++s.unmatched_old;
    }
  }
  s.cd = s.bn - s.be;
  if (s.be > 0) s.cr = s.bn / s.be;
  return s;
}

AlignmentScore score_alignment(const Alignment& a) { return score_alignment(a, a.ctx->scheme); }

bool alignment_before(const Alignment& x, const Alignment& y) {
  if (x.score.cd != y.score.cd) return x.score.cd > y.score.cd;
  if (x.score.hit_columns != y.score.hit_columns) return x.score.hit_columns > y.score.hit_columns;
  if (x.score.unmatched_old != y.score.unmatched_old) return x.score.unmatched_old < y.score.unmatched_old;
  if (x.rows != y.rows) return x.rows < y.rows;
  // rows are equal here; compare the column part of the signatures byte by byte
  struct Bytes {
    const std::vector<Column>& cols;
    std::size_t c = 0, cell = 0;
    int k = -1;  // -1: the cell count byte
    bool done() const { return c == cols.size(); }
    unsigned char next() {
      const auto& col = cols[c];
      if (k < 0) {
        k = 0;
        if (col.cells.empty()) k = -1, ++c;
        return static_cast<unsigned char>(col.cells.size());
      }
      const auto v = (static_cast<std::uint32_t>(col.cells[cell].row) << 16) | col.cells[cell].pos;
      const auto b = static_cast<unsigned char>((v >> (8 * k)) & 0xff);
      if (++k == 4) {
        k = 0;
        if (++cell == col.cells.size()) cell = 0, k = -1, ++c;
      }
      return b;
    }
  } bx{x.columns}, by{y.columns};
  while (!bx.done() && !by.done()) {
    const auto u = bx.next(), v = by.next();
    if (u != v) return u < v;
  }
  return bx.done() && !by.done();
}

Alignment remove_row(const Alignment& a, std::size_t r) {
  if (r == 0 || r >= a.rows.size()) throw std::out_of_range("remove_row: bad row");
  Alignment b = a;
  b.rows.erase(b.rows.begin() + static_cast<long>(r));
  std::vector<Column> cols;
  for (auto col : a.columns) {
    col.cells.erase(std::remove_if(col.cells.begin(), col.cells.end(), [r](const Cell& c) { return c.row == r; }),
                    col.cells.end());
    if (col.cells.empty()) continue;
    for (auto& c : col.cells)
      if (c.row > r) --c.row;
    cols.push_back(std::move(col));
  }
  b.columns = std::move(cols);
  detail::canonicalize(b);
  b.score = score_alignment(b);
  return b;
}

}  // namespace sp
