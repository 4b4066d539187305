#include <algorithm>
#include <numeric>

#include "sp/alignment.hpp"

namespace sp {

namespace {

void rstrip(std::string& s) {
  while (!s.empty() && s.back() == ' ') s.pop_back();
}

}  // namespace

std::string render_alignment(const Alignment& a) {
  const std::size_t R = a.rows.size(), C = a.columns.size();

  // New first, then Old rows in grammar order
  std::vector<std::size_t> first_col(R, C);
  for (std::size_t c = 0; c < C; ++c)
    for (const auto& cell : a.columns[c].cells) first_col[cell.row] = std::min(first_col[cell.row], c);
  std::vector<std::size_t> order(R);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin() + 1, order.end(), [&](std::size_t x, std::size_t y) {
    if (a.rows[x] != a.rows[y]) return a.rows[x] < a.rows[y];
    return first_col[x] < first_col[y];
  });
  std::vector<std::size_t> rank(R);
  for (std::size_t k = 0; k < R; ++k) rank[order[k]] = k;

  std::vector<std::size_t> width(C, 1), start(C, 0);
  std::vector<std::size_t> lo(C, R), hi(C, 0);
  std::vector<std::vector<const Symbol*>> grid(R, std::vector<const Symbol*>(C, nullptr));
  std::size_t x = 0;
  for (std::size_t c = 0; c < C; ++c) {
    for (const auto& cell : a.columns[c].cells) {
      const auto& s = a.symbol(cell);
      width[c] = std::max(width[c], s.mark.size());
      grid[rank[cell.row]][c] = &s;
      lo[c] = std::min(lo[c], rank[cell.row]);
      hi[c] = std::max(hi[c], rank[cell.row]);
    }
    start[c] = x;
    x += width[c] + 1;
  }
  const std::size_t body = x;
  const std::size_t label_w = std::to_string(R - 1).size() + 3;

  std::string out;
  for (std::size_t k = 0; k < R; ++k) {
    if (k > 0) {
      std::string conn(label_w + body, ' ');
      for (std::size_t c = 0; c < C; ++c)
        if (lo[c] < k && hi[c] >= k) conn[label_w + start[c]] = '|';
      rstrip(conn);
      out += conn + "\n";
    }
    std::string line = std::to_string(k);
    line.resize(label_w, ' ');
    std::string row(body, ' ');
    for (std::size_t c = 0; c < C; ++c)
      if (grid[k][c]) row.replace(start[c], grid[k][c]->mark.size(), grid[k][c]->mark);
    line += row + "  " + std::to_string(k);
    out += line + "\n";
  }
  return out;
}

}  // namespace sp
