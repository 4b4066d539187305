#include <algorithm>
#include <cstdio>
#include <functional>
#include <future>
#include <thread>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"
#include "sp/alignment.hpp"

namespace sp {

namespace {

struct Task {
  std::size_t x;                 // index into retained
  std::optional<std::size_t> y;  // alignment partner, else pattern
  std::size_t pattern = 0;
  bool refine = false;           // x against its own unmatched New symbols
};

template <class Fn>
std::vector<std::vector<Alignment>> run_tasks(const std::vector<Task>& tasks, unsigned threads, Fn&& fn) {
  std::vector<std::vector<Alignment>> out(tasks.size());
  if (threads <= 1 || tasks.size() < 16) {
    for (std::size_t k = 0; k < tasks.size(); ++k) out[k] = fn(tasks[k]);
    return out;
  }
  std::vector<std::future<void>> workers;
  const std::size_t chunk = (tasks.size() + threads - 1) / threads;
  for (std::size_t lo = 0; lo < tasks.size(); lo += chunk) {
    const std::size_t hi = std::min(tasks.size(), lo + chunk);
    workers.push_back(std::async(std::launch::async, [&, lo, hi] {
      for (std::size_t k = lo; k < hi; ++k) out[k] = fn(tasks[k]);
    }));
  }
  for (auto& w : workers) w.get();
  return out;
}

}  // namespace

const Alignment& BuildResult::by_id(const std::string& id) const {
  if (id.size() > 1 && id[0] == 'A') {
    const auto k = std::stoul(id.substr(1));
    if (k >= 1 && k <= retained.size()) return retained[k - 1];
  }
  throw std::out_of_range("no alignment " + id);
}

BuildResult build_alignments(const Pattern& new_pattern, std::shared_ptr<const Grammar> grammar,
                             const BuildConfig& config) {
  if (!grammar || grammar->empty()) throw std::invalid_argument("empty grammar");
  if (new_pattern.empty()) throw std::invalid_argument("empty New pattern");
  const CodeScheme scheme = config.scheme ? *config.scheme : build_code_scheme(grammar->patterns, config.coding);

  BuildResult res;
  res.ctx = make_context(new_pattern, grammar, scheme, config.code_rule);
  const auto& ctx = res.ctx;
  const Alignment seed = seed_alignment(ctx);
  const unsigned threads =
      config.threads ? config.threads : std::max(1u, std::min(8u, std::thread::hardware_concurrency()));

  std::unordered_set<std::string> seen;
  std::vector<std::size_t> beam;      // current top-W, indices into retained
  std::vector<std::size_t> frontier;  // admitted in the previous stage
  double best_cd = 0.0;
  bool have_best = false;
  std::size_t stale = 0;

  auto by_rank = [&](std::size_t x, std::size_t y) { return alignment_before(res.retained[x], res.retained[y]); };

  for (std::size_t stage = 1; stage <= config.stages; ++stage) {
    std::vector<Task> tasks;
    if (stage == 1) {
      for (std::size_t p = 0; p < grammar->size(); ++p) tasks.push_back({0, std::nullopt, p});
    } else {
      std::unordered_set<std::size_t> in_frontier(frontier.begin(), frontier.end());
      for (auto x : frontier) {
        tasks.push_back({x, std::nullopt, 0, true});
        for (std::size_t p = 0; p < grammar->size(); ++p) tasks.push_back({x, std::nullopt, p});
        for (auto y : beam) {
          if (y == x) continue;
          if (in_frontier.count(y) && y < x) continue;  // unordered pair, once
          tasks.push_back({x, y, 0});
        }
      }
    }

    // a full beam only admits candidates at or above its worst CD, and that bound never falls
    ComposeLimits limits = config.compose;
    if (beam.size() >= config.beam) {
      const double floor = res.retained[beam.back()].score.cd;
      limits.min_cd = limits.min_cd ? std::max(*limits.min_cd, floor) : floor;
    }
    auto produced = run_tasks(tasks, threads, [&](const Task& t) {
      if (stage == 1) return compose_pair(ctx, Operand::new_pattern_operand(), Operand::old(t.pattern), limits);
      const Alignment& x = res.retained[t.x];
      if (t.refine) return compose_pair(ctx, Operand::of(x), Operand::new_pattern_operand(), limits);
      if (!t.y) return compose_pair(ctx, Operand::of(x), Operand::old(t.pattern), limits);
      return compose_pair(ctx, Operand::of(x), Operand::of(res.retained[*t.y]), limits);
    });

    std::vector<Alignment> fresh;
    for (auto& list : produced)
      for (auto& a : list) {
        if (a.score.hit_columns == 0) continue;
        if (!seen.insert(a.signature()).second) continue;
        a.stage = static_cast<int>(stage);
        fresh.push_back(std::move(a));
      }
    {
      std::vector<std::size_t> idx(fresh.size());
      for (std::size_t k = 0; k < idx.size(); ++k) idx[k] = k;
      std::stable_sort(idx.begin(), idx.end(), [&](std::size_t u, std::size_t v) { return alignment_before(fresh[u], fresh[v]); });
      std::vector<Alignment> sorted;
      sorted.reserve(fresh.size());
      for (auto k : idx) sorted.push_back(std::move(fresh[k]));
      fresh = std::move(sorted);
    }

    // merge into the beam
    std::vector<std::size_t> next = beam;
    std::vector<std::size_t> admitted;
    std::size_t fi = 0;
    std::vector<std::size_t> merged;
    {
      std::size_t bi = 0;
      std::sort(next.begin(), next.end(), by_rank);
      while (merged.size() < config.beam && (bi < next.size() || fi < fresh.size())) {
        const bool take_fresh =
            bi == next.size() || (fi < fresh.size() && alignment_before(fresh[fi], res.retained[next[bi]]));
        if (take_fresh) {
          Alignment a = std::move(fresh[fi++]);
          a.id = "A" + std::to_string(res.retained.size() + 1);
          res.retained.push_back(std::move(a));
          merged.push_back(res.retained.size() - 1);
          admitted.push_back(res.retained.size() - 1);
        } else {
          merged.push_back(next[bi++]);
        }
      }
    }
    beam = std::move(merged);
    frontier = std::move(admitted);
    res.stages_run = stage;
    if (beam.empty()) break;

    const double top = res.retained[beam.front()].score.cd;
    if (!have_best || top > best_cd) {
      best_cd = top;
      have_best = true;
      stale = 0;
    } else if (++stale >= config.patience) {
      break;
    }
    if (frontier.empty()) break;
  }

  for (std::size_t k = 0; k < beam.size() && k < config.results; ++k) res.ranked.push_back(beam[k]);
  (void)seed;
  return res;
}

BuildResult build_alignments(const Pattern& new_pattern, const Grammar& grammar, const BuildConfig& config) {
  return build_alignments(new_pattern, std::make_shared<const Grammar>(grammar), config);
}

Pattern decode_code_pattern(std::span<const MarkId> code, std::shared_ptr<const Grammar> grammar,
                            const BuildConfig& config) {
  if (code.empty()) throw DecodeError("empty code pattern");
  std::vector<std::string> marks;
  for (auto m : code) marks.push_back(mark_name(m));
  Pattern as_new(marks, 1, Role::New, grammar->classifier);
  auto res = build_alignments(as_new, grammar, config);

  // content linked between Old rows would regenerate one symbol for two
  auto content_link = [](const Alignment& a) {
    for (const auto& col : a.columns)
      if (!col.single() && !col.has_new() && a.symbol(col.cells[0]).kind == SymbolKind::content) return true;
    return false;
  };
  const Alignment* pick = nullptr;
  for (const auto& a : res.retained) {
    if (!residue_positions(a).empty() || content_link(a)) continue;
    if (!pick || alignment_before(a, *pick)) pick = &a;
  }
  if (!pick) throw DecodeError("no alignment accounts for every code symbol");

  std::vector<std::string> out;
  for (const auto& col : pick->columns) {
    if (!col.single() || col.has_new()) continue;
    const auto& s = pick->symbol(col.cells[0]);
    if (s.kind == SymbolKind::content) out.push_back(s.mark);
  }
  if (out.empty()) throw DecodeError("code pattern regenerates no content");
  return Pattern(out, 1, Role::New, grammar->classifier);
}

Pattern decode_code_pattern(std::span<const MarkId> code, const Grammar& grammar, const BuildConfig& config) {
  return decode_code_pattern(code, std::make_shared<const Grammar>(grammar), config);
}

AuditTrail audit_trail(const BuildResult& result) {
  AuditTrail t;
  for (auto k : result.ranked) t.roots.push_back(result.retained[k].id);
  for (const auto& a : result.retained)
    t.records.push_back({a.id, a.stage, a.parents, a.score.bn, a.score.be, a.score.cd});
  return t;
}

namespace {

std::string fmt_bits(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

std::string AuditTrail::to_text() const {
  std::string s = "; id stage parent parent B_N B_E CD\n";
  s += "; roots";
  for (const auto& r : roots) s += " " + r;
  s += "\n";
  for (const auto& r : records) {
    s += r.id + " " + std::to_string(r.stage);
    for (const auto& p : r.parents) s += " " + p;
    s += " " + fmt_bits(r.bn) + " " + fmt_bits(r.be) + " " + fmt_bits(r.cd) + "\n";
  }
  return s;
}

std::string AuditTrail::to_json() const {
  using nlohmann::json;
  std::unordered_map<std::string, const AuditRecord*> index;
  for (const auto& r : records) index[r.id] = &r;
  std::unordered_set<std::string> emitted;
  std::function<json(const std::string&)> node = [&](const std::string& id) -> json {
    auto it = index.find(id);
    if (it == index.end()) return json{{"leaf", id}};
    if (!emitted.insert(id).second) return json{{"ref", id}};
    const auto& r = *it->second;
    json parents = json::array();
    for (const auto& p : r.parents) parents.push_back(node(p));
    return json{{"id", r.id}, {"stage", r.stage}, {"B_N", r.bn}, {"B_E", r.be}, {"CD", r.cd}, {"parents", parents}};
  };
  json doc = json::array();
  for (const auto& root : roots) doc.push_back(node(root));
  return doc.dump(2) + "\n";
}

}  // namespace sp
