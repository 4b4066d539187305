#include <algorithm>
#include <charconv>
#include <functional>
#include <set>
#include <unordered_map>

#include "sp/learning.hpp"

namespace sp {

const char* to_string(AssimilationCase c) {
  switch (c) {
    case AssimilationCase::exact: return "exact";
    case AssimilationCase::wrap: return "wrap";
    case AssimilationCase::split: return "split";
  }
  return "?";
}

namespace {

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

std::uint64_t to_u64(std::string_view s) {
  std::uint64_t v = 0;
  std::from_chars(s.data(), s.data() + s.size(), v);
  return v;
}

}  // namespace

LearnStore LearnStore::lift(const Grammar& g) {
  LearnStore st;
  std::unordered_map<std::string, int> class_ids;
  int max_class = 0;
  // numeric class marks keep their number
  for (const auto& p : g.patterns)
    for (const auto& s : p.symbols())
      if (s.mark.size() > 1 && s.mark[0] == '%' && all_digits(std::string_view(s.mark).substr(1)))
        max_class = std::max(max_class, static_cast<int>(to_u64(std::string_view(s.mark).substr(1))));
  auto class_of = [&](const std::string& mark) {
    auto sv = std::string_view(mark).substr(1);
    if (all_digits(sv)) return static_cast<int>(to_u64(sv));
    auto [it, fresh] = class_ids.emplace(mark, max_class + 1);
    if (fresh) ++max_class;
    return it->second;
  };

  std::uint64_t max_disc = 0;
  for (std::size_t k = 0; k < g.patterns.size(); ++k) {
    const auto& p = g.patterns[k];
    auto fail = [&](const std::string& why) {
      throw StoreFormatError(Grammar::pattern_id(k) + " (" + p.text() + "): " + why);
    };
    const auto n = p.size();
    if (n < 3 || p[0].mark != "<" || p[n - 1].mark != ">") fail("not framed by < and >");
    Element e;
    std::size_t i = 1;
    if (p[i].mark[0] == '%') e.cls = class_of(p[i++].mark);
    if (i >= n - 1 || !all_digits(p[i].mark)) fail("missing discriminator");
    e.disc = to_u64(p[i++].mark);
    max_disc = std::max(max_disc, e.disc);
    while (i < n - 1) {
      const auto& m = p[i].mark;
      if (m == "<") {
        if (i + 2 >= n - 1 || p[i + 1].mark[0] != '%' || p[i + 2].mark != ">") fail("malformed class reference");
        e.body.push_back({true, 0, class_of(p[i + 1].mark)});
        i += 3;
      } else if (m == ">") {
        fail("unbalanced >");
      } else {
        e.body.push_back({false, p[i].id, 0});
        ++i;
      }
    }
    if (e.body.empty()) fail("empty body");
    e.freq = p.frequency();
    e.new_index = 0;
    st.add(std::move(e));
  }
  for (auto& e : st.elements_) e.top = e.cls < 0 || st.references(e.cls) == 0;
  st.next_class_ = max_class + 1;
  st.next_disc_ = max_disc + 1;
  return st;
}

const LearnStore::Element* LearnStore::find(std::uint64_t uid) const {
  for (const auto& e : elements_)
    if (e.uid == uid) return &e;
  return nullptr;
}

LearnStore::Element* LearnStore::find_mut(std::uint64_t uid) {
  for (auto& e : elements_)
    if (e.uid == uid) return &e;
  return nullptr;
}

LearnStore::Element& LearnStore::add(Element e) {
  e.uid = next_uid_++;
  elements_.push_back(std::move(e));
  history_[elements_.back().uid] = text_of(elements_.back());
  return elements_.back();
}

void LearnStore::remove(std::uint64_t uid) {
  std::erase_if(elements_, [&](const Element& e) { return e.uid == uid; });
}

std::vector<const LearnStore::Element*> LearnStore::members(int cls) const {
  std::vector<const Element*> out;
  for (const auto& e : elements_)
    if (e.cls == cls) out.push_back(&e);
  return out;
}

std::size_t LearnStore::references(int cls) const {
  std::size_t n = 0;
  for (const auto& e : elements_)
    for (const auto& it : e.body) n += it.ref && it.cls == cls;
  return n;
}

namespace {

std::vector<std::string> element_marks(const LearnStore::Element& e) {
  std::vector<std::string> m{"<"};
  if (e.cls >= 0) m.push_back("%" + std::to_string(e.cls));
  m.push_back(std::to_string(e.disc));
  for (const auto& it : e.body) {
    if (it.ref) {
      m.push_back("<");
      m.push_back("%" + std::to_string(it.cls));
      m.push_back(">");
    } else {
      m.push_back(mark_name(it.mark));
    }
  }
  m.push_back(">");
  return m;
}

std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (const auto& x : v) s += (s.empty() ? "" : " ") + x;
  return s;
}

}  // namespace

std::string LearnStore::text_of(const Element& e) const { return join(element_marks(e)); }

std::string LearnStore::historic_text(std::uint64_t uid) const {
  auto it = history_.find(uid);
  return it == history_.end() ? std::string() : it->second;
}

Grammar LearnStore::render(const SymbolClassifier& base) const {
  Grammar g;
  g.classifier = base;
  for (const auto& e : elements_) g.patterns.emplace_back(element_marks(e), std::max<std::int64_t>(e.freq, 1), Role::Old, base);
  return g;
}

std::vector<ProvenanceRecord> provenance_of(const LearnStore& store) {
  std::unordered_map<std::uint64_t, std::string> id_of;
  for (std::size_t k = 0; k < store.elements().size(); ++k) id_of[store.elements()[k].uid] = Grammar::pattern_id(k);
  std::vector<ProvenanceRecord> out;
  for (const auto& e : store.elements()) {
    ProvenanceRecord r{id_of[e.uid], e.new_index, e.origin, {}};
    for (auto s : e.sources) {
      auto it = id_of.find(s);
      r.sources.push_back(it != id_of.end() ? it->second : "\"" + store.historic_text(s) + "\"");
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::string provenance_to_text(const std::vector<ProvenanceRecord>& records) {
  std::string s = "; pattern new-index case sources\n";
  for (const auto& r : records) {
    s += r.pattern_id + " " + std::to_string(r.new_index) + " " + to_string(r.kind);
    for (const auto& src : r.sources) s += " " + src;
    s += "\n";
  }
  return s;
}

// ---------------------------------------------------------------------------
// canonical form

namespace {

struct Canon {
  const LearnStore& st;
  std::unordered_map<int, std::string> class_sig;
  std::set<int> busy;

  std::string body_sig(const LearnStore::Element& e) {
    std::string s;
    for (const auto& it : e.body) {
      s += s.empty() ? "" : " ";
      s += it.ref ? "[" + sig(it.cls) + "]" : mark_name(it.mark);
    }
    return s;
  }

  std::string sig(int cls) {
    if (auto it = class_sig.find(cls); it != class_sig.end()) return it->second;
    if (!busy.insert(cls).second) return "{*}";
    std::vector<std::string> parts;
    for (const auto* m : st.members(cls)) parts.push_back(body_sig(*m));
    std::sort(parts.begin(), parts.end());
    std::string s = "{";
    for (std::size_t i = 0; i < parts.size(); ++i) s += (i ? "|" : "") + parts[i];
    s += "}";
    busy.erase(cls);
    return class_sig[cls] = s;
  }
};

}  // namespace

Grammar canonicalize_grammar(const Grammar& g) {
  LearnStore st;
  try {
    st = LearnStore::lift(g);
  } catch (const StoreFormatError&) {
    Grammar out = g;
    std::stable_sort(out.patterns.begin(), out.patterns.end(),
                     [](const Pattern& a, const Pattern& b) { return a.text() < b.text(); });
    return out;
  }
  Canon c{st, {}, {}};
  struct Keyed {
    std::string key;
    const LearnStore::Element* e;
  };
  std::vector<Keyed> order;
  for (const auto& e : st.elements()) {
    std::string key = e.top ? "0" : "1";
    key += e.cls >= 0 ? c.sig(e.cls) : "";
    key += "/" + c.body_sig(e);
    order.push_back({key, &e});
  }
  std::stable_sort(order.begin(), order.end(), [](const Keyed& a, const Keyed& b) { return a.key < b.key; });

  std::unordered_map<int, int> rename;
  auto name = [&](int cls) {
    auto [it, fresh] = rename.emplace(cls, static_cast<int>(rename.size()) + 1);
    return it->second;
  };
  Grammar out;
  out.classifier = g.classifier;
  std::uint64_t disc = 0;
  for (const auto& k : order) {
    auto e = *k.e;
    if (e.cls >= 0) e.cls = name(e.cls);
    for (auto& it : e.body)
      if (it.ref) it.cls = name(it.cls);
    e.disc = ++disc;
    out.patterns.emplace_back(element_marks(e), std::max<std::int64_t>(e.freq, 1), Role::Old, g.classifier);
  }
  return out;
}

std::string canonical_key(const Grammar& g) {
  std::string s;
  for (const auto& p : canonicalize_grammar(g).patterns) s += p.text() + "\n";
  return s;
}

}  // namespace sp
