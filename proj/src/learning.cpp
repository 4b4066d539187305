#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <unordered_map>

#include "sp/learning.hpp"

namespace sp {

using Element = LearnStore::Element;
using Item = LearnStore::Item;

// ---------------------------------------------------------------------------
// derivation (case 1)

namespace {

class Deriver {
 public:
  Deriver(const LearnStore& st, std::span<const MarkId> s) : st_(st), s_(s) {}

  // end positions reachable from `start` by expanding element e
  const std::set<std::size_t>& ends(const Element& e, std::size_t start) {
    auto key = std::make_pair(e.uid, start);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    if (!busy_.insert(key).second) return empty_;
    std::set<std::size_t> cur{start};
    for (const auto& it : e.body) cur = step(it, cur);
    busy_.erase(key);
    return memo_[key] = std::move(cur);
  }

  // uids used by one derivation of s from e; false when none
  bool trace(const Element& e, std::size_t start, std::size_t end, std::vector<std::uint64_t>& used) {
    used.push_back(e.uid);
    if (trace_body(e.body, 0, start, end, used)) return true;
    used.pop_back();
    return false;
  }

 private:
  std::set<std::size_t> step(const Item& it, const std::set<std::size_t>& from) {
    std::set<std::size_t> out;
    for (auto p : from) {
      if (!it.ref) {
        if (p < s_.size() && s_[p] == it.mark) out.insert(p + 1);
      } else {
        for (const auto* m : st_.members(it.cls)) {
          const auto& e = ends(*m, p);
          out.insert(e.begin(), e.end());
        }
      }
    }
    return out;
  }

  bool trace_body(const std::vector<Item>& body, std::size_t k, std::size_t p, std::size_t end,
                  std::vector<std::uint64_t>& used) {
    if (k == body.size()) return p == end;
    const auto& it = body[k];
    if (!it.ref) return p < s_.size() && s_[p] == it.mark && trace_body(body, k + 1, p + 1, end, used);
    for (const auto* m : st_.members(it.cls))
      for (auto q : ends(*m, p)) {
        std::size_t mark = used.size();
        if (trace(*m, p, q, used) && trace_body(body, k + 1, q, end, used)) return true;
        used.resize(mark);
      }
    return false;
  }

  const LearnStore& st_;
  std::span<const MarkId> s_;
  std::map<std::pair<std::uint64_t, std::size_t>, std::set<std::size_t>> memo_;
  std::set<std::pair<std::uint64_t, std::size_t>> busy_;
  std::set<std::size_t> empty_;
};

std::optional<std::vector<std::uint64_t>> derivation(const LearnStore& st, std::span<const MarkId> s) {
  Deriver d(st, s);
  for (const auto& e : st.elements()) {
    if (!e.top || !d.ends(e, 0).count(s.size())) continue;
    std::vector<std::uint64_t> used;
    if (d.trace(e, 0, s.size(), used)) return used;
  }
  return std::nullopt;
}

}  // namespace

bool store_derives(const LearnStore& store, std::span<const MarkId> content) {
  return derivation(store, content).has_value();
}

// ---------------------------------------------------------------------------
// partial matches (case 3)

namespace {

struct Slot {
  enum class Kind { literal, self, ref } kind = Kind::ref;
  int cls = -1;
  std::uint64_t member = 0;  // element whose content fills the slot
  std::size_t begin = 0, end = 0;
};

struct Surface {
  std::uint64_t top = 0;
  std::vector<MarkId> marks;
  std::vector<Slot> slots;
  std::vector<std::size_t> slot_of;  // per surface position
};

std::vector<Surface> surfaces_of(const LearnStore& st, const Element& top, std::size_t cap) {
  std::vector<Surface> out;
  bool has_ref = std::any_of(top.body.begin(), top.body.end(), [](const Item& i) { return i.ref; });
  if (!has_ref) {
    Surface s;
    s.top = top.uid;
    for (const auto& it : top.body) s.marks.push_back(it.mark);
    s.slots.push_back({Slot::Kind::self, top.cls, top.uid, 0, s.marks.size()});
    s.slot_of.assign(s.marks.size(), 0);
    out.push_back(std::move(s));
    return out;
  }
  // leaf members per referenced slot
  std::vector<std::vector<const Element*>> choices;
  for (const auto& it : top.body) {
    if (!it.ref) {
      choices.push_back({nullptr});
      continue;
    }
    std::vector<const Element*> leaves;
    for (const auto* m : st.members(it.cls))
      if (std::none_of(m->body.begin(), m->body.end(), [](const Item& i) { return i.ref; })) leaves.push_back(m);
    if (leaves.empty()) return out;
    choices.push_back(std::move(leaves));
  }
  std::vector<std::size_t> pick(choices.size(), 0);
  while (out.size() < cap) {
    Surface s;
    s.top = top.uid;
    for (std::size_t k = 0; k < top.body.size(); ++k) {
      const auto& it = top.body[k];
      Slot sl;
      sl.begin = s.marks.size();
      if (!it.ref) {
        sl.kind = Slot::Kind::literal;
        s.marks.push_back(it.mark);
      } else {
        const auto* m = choices[k][pick[k]];
        sl.kind = Slot::Kind::ref;
        sl.cls = it.cls;
        sl.member = m->uid;
        for (const auto& x : m->body) s.marks.push_back(x.mark);
      }
      sl.end = s.marks.size();
      for (auto p = sl.begin; p < sl.end; ++p) s.slot_of.push_back(s.slots.size());
      s.slots.push_back(sl);
    }
    out.push_back(std::move(s));
    std::size_t k = 0;
    for (; k < pick.size(); ++k) {
      if (++pick[k] < choices[k].size()) break;
      pick[k] = 0;
    }
    if (k == pick.size()) break;
  }
  return out;
}

struct Unit {
  bool matched = false;
  std::size_t s0 = 0, s1 = 0;  // New range
  std::size_t o0 = 0, o1 = 0;  // surface range
};

// matched runs and two-sided divergences; nullopt when a one-sided gap appears
std::optional<std::vector<Unit>> units_of(const HitSequence& h, const Surface& sf, std::size_t new_size) {
  std::vector<Unit> units;
  std::size_t ps = 0, po = 0;
  auto gap = [&](std::size_t s, std::size_t o) {
    bool se = s == ps, oe = o == po;
    if (se && oe) return true;
    if (se || oe) return false;
    if (sf.slot_of[po] != sf.slot_of[o - 1]) return false;
    units.push_back({false, ps, s, po, o});
    return true;
  };
  for (std::size_t k = 0; k < h.hits.size();) {
    const auto& hit = h.hits[k];
    if (!gap(hit.pos_a, hit.pos_b)) return std::nullopt;
    std::size_t len = 1;
    while (k + len < h.hits.size() && h.hits[k + len].pos_a == hit.pos_a + len &&
           h.hits[k + len].pos_b == hit.pos_b + len && sf.slot_of[hit.pos_b + len] == sf.slot_of[hit.pos_b])
      ++len;
    units.push_back({true, hit.pos_a, hit.pos_a + len, hit.pos_b, hit.pos_b + len});
    ps = hit.pos_a + len;
    po = hit.pos_b + len;
    k += len;
  }
  if (!gap(new_size, sf.marks.size())) return std::nullopt;
  return units;
}

class Editor {
 public:
  Editor(LearnStore& st, std::size_t new_index) : st_(st), new_index_(new_index) {}

  int singleton(const std::vector<MarkId>& c, std::int64_t freq, std::uint64_t source) {
    for (const auto& e : st_.elements()) {
      if (e.cls < 0 || e.top || !is_leaf(e, c)) continue;
      if (st_.members(e.cls).size() == 1) {
        st_.find_mut(e.uid)->freq += 1;
        return e.cls;
      }
    }
    int cls = st_.fresh_class();
    leaf(cls, c, freq, {source});
    return cls;
  }

  int pair(const std::vector<MarkId>& old_c, const std::vector<MarkId>& new_c, std::int64_t freq,
           std::uint64_t source) {
    for (const auto& e : st_.elements()) {
      if (e.cls < 0 || e.top) continue;
      auto ms = st_.members(e.cls);
      if (ms.size() != 2) continue;
      bool a = is_leaf(*ms[0], old_c) && is_leaf(*ms[1], new_c);
      bool b = is_leaf(*ms[1], old_c) && is_leaf(*ms[0], new_c);
      if (a || b) {
        st_.find_mut((a ? ms[1] : ms[0])->uid)->freq += 1;
        return e.cls;
      }
    }
    int cls = st_.fresh_class();
    leaf(cls, old_c, freq, {source});
    leaf(cls, new_c, 1, {source});
    return cls;
  }

  void leaf(int cls, const std::vector<MarkId>& c, std::int64_t freq, std::vector<std::uint64_t> sources) {
    Element e;
    e.cls = cls;
    e.disc = st_.fresh_disc();
    for (auto m : c) e.body.push_back({false, m, 0});
    e.freq = freq;
    e.new_index = new_index_;
    e.origin = AssimilationCase::split;
    e.sources = std::move(sources);
    st_.add(std::move(e));
  }

  std::uint64_t abstract(int cls, const std::vector<int>& refs, std::int64_t freq, bool top,
                         std::vector<std::uint64_t> sources) {
    Element e;
    e.cls = cls;
    e.disc = st_.fresh_disc();
    for (int r : refs) e.body.push_back({true, 0, r});
    e.freq = freq;
    e.top = top;
    e.new_index = new_index_;
    e.origin = AssimilationCase::split;
    e.sources = std::move(sources);
    return st_.add(std::move(e)).uid;
  }

 private:
  static bool is_leaf(const Element& e, const std::vector<MarkId>& c) {
    if (e.body.size() != c.size()) return false;
    for (std::size_t i = 0; i < c.size(); ++i)
      if (e.body[i].ref || e.body[i].mark != c[i]) return false;
    return true;
  }

  LearnStore& st_;
  std::size_t new_index_;
};

std::optional<LearnStore> apply_split(const LearnStore& base, const Surface& sf, const std::vector<Unit>& units,
                                      std::span<const MarkId> s, std::size_t new_index) {
  LearnStore st = base;
  Editor ed(st, new_index);
  const Element top = *base.find(sf.top);

  std::vector<std::vector<const Unit*>> per_slot(sf.slots.size());
  for (const auto& u : units) per_slot[sf.slot_of[u.o0]].push_back(&u);

  auto content = [](std::span<const MarkId> v, std::size_t a, std::size_t b) {
    return std::vector<MarkId>(v.begin() + static_cast<long>(a), v.begin() + static_cast<long>(b));
  };

  std::set<std::uint64_t> touched;
  std::vector<std::vector<Item>> replacement(sf.slots.size());
  std::vector<std::uint64_t> inlined;
  bool top_changed = false;

  for (std::size_t k = 0; k < sf.slots.size(); ++k) {
    const auto& sl = sf.slots[k];
    const auto& us = per_slot[k];
    const Item orig = top.body.size() > k && sl.kind != Slot::Kind::self ? top.body[k] : Item{};
    if (sl.kind == Slot::Kind::literal) {
      if (us.size() != 1 || !us[0]->matched) return std::nullopt;
      replacement[k] = {orig};
      continue;
    }
    const Element* member = base.find(sl.member);
    if (us.size() == 1 && us[0]->matched) {
      if (sl.kind == Slot::Kind::ref) st.find_mut(member->uid)->freq += 1;
      replacement[k] = {orig};
      continue;
    }
    if (!touched.insert(member->uid).second) return std::nullopt;
    if (us.size() == 1) {
      // whole member differs: New joins the class
      if (sl.kind == Slot::Kind::self) return std::nullopt;
      ed.leaf(sl.cls, content(s, us[0]->s0, us[0]->s1), 1, {member->uid});
      replacement[k] = {orig};
      continue;
    }
    std::vector<int> refs;
    for (const auto* u : us) {
      auto oc = content(sf.marks, u->o0, u->o1);
      refs.push_back(u->matched ? ed.singleton(oc, member->freq + 1, member->uid)
                                : ed.pair(oc, content(s, u->s0, u->s1), member->freq, member->uid));
    }
    if (sl.kind == Slot::Kind::self) {
      bool alone = st.members(top.cls).size() == 1 && st.references(top.cls) == 0;
      ed.abstract(alone ? -1 : top.cls, refs, top.freq + 1, true, {top.uid});
      st.remove(top.uid);
      return st;
    }
    if (base.members(sl.cls).size() == 1 && base.references(sl.cls) == 1) {
      for (int r : refs) replacement[k].push_back({true, 0, r});
      inlined.push_back(member->uid);
      top_changed = true;
    } else {
      ed.abstract(sl.cls, refs, member->freq + 1, false, {member->uid});
      replacement[k] = {orig};
    }
    st.remove(member->uid);
  }

  Element* t = st.find_mut(top.uid);
  if (!top_changed) {
    t->freq += 1;
    return st;
  }
  Element nt = *t;
  nt.body.clear();
  for (const auto& r : replacement) nt.body.insert(nt.body.end(), r.begin(), r.end());
  nt.freq += 1;
  nt.new_index = new_index;
  nt.origin = AssimilationCase::split;
  nt.sources = {top.uid};
  nt.sources.insert(nt.sources.end(), inlined.begin(), inlined.end());
  st.remove(top.uid);
  st.add(std::move(nt));
  return st;
}

}  // namespace

std::vector<Assimilation> assimilate_new_pattern(const Pattern& new_pattern, const LearnStore& store,
                                                 const LearnConfig& config, std::size_t new_index) {
  if (new_pattern.empty()) throw std::invalid_argument("assimilate: empty New pattern");
  const auto s = new_pattern.ids();

  if (auto used = derivation(store, s)) {
    Assimilation a{store, AssimilationCase::exact, s.size(), 0.0};
    for (auto uid : *used) a.store.find_mut(uid)->freq += 1;
    return {std::move(a)};
  }

  const double p1 = 1.0 / static_cast<double>(config.coding.alphabet_size);
  std::vector<Assimilation> found;
  for (const auto& top : store.elements()) {
    if (!top.top) continue;
    for (const auto& sf : surfaces_of(store, top, config.max_surfaces)) {
      const auto need = std::max<double>(static_cast<double>(config.min_hits),
                                         config.min_fraction * static_cast<double>(std::min(s.size(), sf.marks.size())));
      MatchLimits lim;
      lim.max_results = config.match_results;
      for (const auto& h : find_matches(s, sf.marks, p1, lim)) {
        if (static_cast<double>(h.hits.size()) < need) continue;
        auto units = units_of(h, sf, s.size());
        if (!units) continue;
        auto st = apply_split(store, sf, *units, s, new_index);
        if (st) found.push_back({std::move(*st), AssimilationCase::split, h.hits.size(), h.log2_p});
      }
    }
  }

  auto wrapped = [&] {
    Assimilation a{store, AssimilationCase::wrap, 0, 0.0};
    Element e;
    e.cls = a.store.fresh_class();
    e.disc = a.store.fresh_disc();
    for (auto m : s) e.body.push_back({false, m, 0});
    e.top = true;
    e.new_index = new_index;
    e.origin = AssimilationCase::wrap;
    a.store.add(std::move(e));
    return a;
  };

  if (!found.empty()) {
    std::vector<std::pair<std::string, std::size_t>> keyed;
    for (std::size_t i = 0; i < found.size(); ++i) keyed.push_back({canonical_key(found[i].store.render()), i});
    std::stable_sort(keyed.begin(), keyed.end(), [&](const auto& x, const auto& y) {
      const auto& a = found[x.second];
      const auto& b = found[y.second];
      if (a.hits != b.hits) return a.hits > b.hits;
      if (a.log2_p != b.log2_p) return a.log2_p < b.log2_p;
      return x.first < y.first;
    });
    std::vector<Assimilation> out;
    std::set<std::string> seen;
    for (const auto& [key, i] : keyed) {
      if (out.size() >= config.max_branches) break;
      if (seen.insert(key).second) out.push_back(std::move(found[i]));
    }
    // weak partial matches keep the plain wrap as a rival branch
    if (static_cast<double>(out.front().hits) < config.wrap_below * static_cast<double>(s.size()))
      out.push_back(wrapped());
    return out;
  }
  return {wrapped()};
}

// ---------------------------------------------------------------------------
// frequencies and scoring

FrequencyTable compute_grammar_frequencies(const std::vector<std::vector<const Alignment*>>& subsets) {
  FrequencyTable t;
  AlignmentSubsets bags;
  std::set<MarkId> types;
  for (const auto& subset : subsets) {
    std::map<std::string, std::uint64_t> best;
    auto& b = bags.emplace_back();
    for (const auto* a : subset) {
      std::map<std::string, std::uint64_t> rows;
      for (std::size_t r = 1; r < a->rows.size(); ++r) ++rows[Grammar::pattern_id(static_cast<std::size_t>(a->rows[r]))];
      for (const auto& [id, n] : rows) best[id] = std::max(best[id], n);
      auto& bag = b.emplace_back();
      for (std::size_t r = 0; r < a->rows.size(); ++r)
        for (auto m : a->row_pattern(r).ids()) {
          bag.push_back(m);
          types.insert(m);
        }
    }
    for (const auto& [id, n] : best) t.pattern_freq[id] += n;
  }
  std::vector<MarkId> tv(types.begin(), types.end());
  for (const auto& [m, f] : type_frequencies(bags, tv))
    if (f) t.type_freq[mark_name(m)] = f;
  return t;
}

Grammar verbatim_grammar(const Corpus& corpus) {
  Grammar g;
  g.classifier = corpus.classifier;
  for (std::size_t i = 0; i < corpus.patterns.size(); ++i) {
    std::vector<std::string> m{"<", "%" + std::to_string(i + 1), std::to_string(i + 1)};
    for (const auto& s : corpus.patterns[i].symbols()) m.push_back(s.mark);
    m.push_back(">");
    g.patterns.emplace_back(m, 1, Role::Old, corpus.classifier);
  }
  return g;
}

GrammarReport score_grammar(const Grammar& g, const Corpus& corpus, const LearnConfig& config) {
  if (g.patterns.empty()) throw std::invalid_argument("score_grammar: empty grammar");
  if (corpus.patterns.empty()) throw std::invalid_argument("score_grammar: empty corpus");
  auto gp = std::make_shared<const Grammar>(g);
  BuildConfig bc = config.build;
  bc.coding = config.coding;

  std::vector<std::optional<Alignment>> best(corpus.patterns.size());
  for (std::size_t i = 0; i < corpus.patterns.size(); ++i) {
    auto res = build_alignments(corpus.patterns[i], gp, bc);
    if (!res.empty()) best[i] = res.best();
  }

  GrammarReport rep;
  std::vector<std::vector<const Alignment*>> subsets;
  for (const auto& b : best)
    if (b) subsets.push_back({&*b});
  rep.table = compute_grammar_frequencies(subsets);

  std::set<MarkId> types;
  for (const auto& p : g.patterns) types.insert(p.ids().begin(), p.ids().end());
  std::vector<std::pair<MarkId, std::uint64_t>> freqs;
  for (auto m : types)
    if (auto it = rep.table.type_freq.find(mark_name(m)); it != rep.table.type_freq.end())
      freqs.push_back({m, it->second});

  std::set<MarkId> all = types;
  for (const auto& p : corpus.patterns) all.insert(p.ids().begin(), p.ids().end());
  const double uniform = std::ceil(std::log2(std::max<double>(2.0, static_cast<double>(all.size()))));

  std::optional<CodeScheme> scheme;
  if (!freqs.empty()) scheme.emplace(freqs, config.coding);
  auto cost = [&](MarkId m) {
    if (!scheme) return uniform;
    return scheme->contains(m) ? scheme->code_size(m) : scheme->max_code_size();
  };

  for (const auto& p : g.patterns)
    for (auto m : p.ids()) rep.score.g += cost(m);

  for (std::size_t i = 0; i < corpus.patterns.size(); ++i) {
    NewEncoding enc;
    if (!best[i]) {
      enc.uncovered = true;
      enc.bits = uniform * static_cast<double>(corpus.patterns[i].size());
      for (std::size_t p = 0; p < corpus.patterns[i].size(); ++p) enc.residue.push_back(p);
    } else {
      for (auto m : derive_code_pattern(*best[i])) {
        enc.code.push_back(mark_name(m));
        enc.bits += cost(m);
      }
      enc.residue = residue_positions(*best[i]);
      enc.bits += uniform * static_cast<double>(enc.residue.size());
    }
    rep.score.e += enc.bits;
    rep.encodings.push_back(std::move(enc));
  }
  rep.score.t = rep.score.g + rep.score.e;
  return rep;
}

// ---------------------------------------------------------------------------
// grammar search

std::vector<LearnedGrammar> learn_grammars(const Corpus& corpus, const LearnConfig& config, const Grammar* initial) {
  if (corpus.patterns.empty()) throw std::invalid_argument("learn: empty corpus");
  struct Node {
    LearnStore store;
    std::string key;
    double t = 0.0;
  };
  std::vector<Node> beam(1);
  if (initial && !initial->patterns.empty()) beam[0].store = LearnStore::lift(*initial);

  const std::size_t n = corpus.patterns.size();
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<Node> next;
    std::set<std::string> seen;
    for (const auto& node : beam)
      for (auto& a : assimilate_new_pattern(corpus.patterns[i], node.store, config, i + 1)) {
        auto key = canonical_key(a.store.render(corpus.classifier));
        if (seen.insert(key).second) next.push_back({std::move(a.store), std::move(key), 0.0});
      }
    const bool prune = (i + 1) % std::max<std::size_t>(config.prune_period, 1) == 0 || i + 1 == n;
    if (prune && next.size() > 1) {
      Corpus prefix{{corpus.patterns.begin(), corpus.patterns.begin() + static_cast<long>(i + 1)}, corpus.classifier};
      for (auto& nd : next) nd.t = score_grammar(nd.store.render(corpus.classifier), prefix, config).score.t;
      std::stable_sort(next.begin(), next.end(), [](const Node& a, const Node& b) {
        return a.t != b.t ? a.t < b.t : a.key < b.key;
      });
      if (next.size() > config.grammar_beam) next.resize(config.grammar_beam);
    }
    beam = std::move(next);
  }

  std::vector<LearnedGrammar> out;
  for (auto& nd : beam) {
    LearnedGrammar lg;
    lg.grammar = nd.store.render(corpus.classifier);
    lg.report = score_grammar(lg.grammar, corpus, config);
    for (std::size_t k = 0; k < lg.grammar.patterns.size(); ++k) {
      auto it = lg.report.table.pattern_freq.find(Grammar::pattern_id(k));
      std::int64_t f = it == lg.report.table.pattern_freq.end() ? 1 : static_cast<std::int64_t>(it->second);
      lg.grammar.patterns[k] = lg.grammar.patterns[k].with_frequency(std::max<std::int64_t>(f, 1));
    }
    lg.provenance = provenance_of(nd.store);
    lg.store = std::move(nd.store);
    out.push_back(std::move(lg));
  }
  std::stable_sort(out.begin(), out.end(), [](const LearnedGrammar& a, const LearnedGrammar& b) {
    if (a.report.score.t != b.report.score.t) return a.report.score.t < b.report.score.t;
    return canonical_key(a.grammar) < canonical_key(b.grammar);
  });
  return out;
}

}  // namespace sp
