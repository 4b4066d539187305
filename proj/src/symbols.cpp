#include "sp/symbols.hpp"

#include <deque>
#include <mutex>
#include <shared_mutex>
#include <unordered_map>

namespace sp {

namespace {

struct InternTable {
  std::shared_mutex mu;
  std::deque<std::string> names;  // deque keeps references stable
  std::unordered_map<std::string_view, MarkId> ids;
};

InternTable& table() {
  static InternTable t;
  return t;
}

}  // namespace

const char* to_string(SymbolKind k) {
  switch (k) {
    case SymbolKind::content: return "content";
    case SymbolKind::identification: return "identification";
    case SymbolKind::boundary: return "boundary";
  }
  return "?";
}

MarkId intern(std::string_view mark) {
  auto& t = table();
  {
    std::shared_lock lk(t.mu);
    auto it = t.ids.find(mark);
    if (it != t.ids.end()) return it->second;
  }
  std::unique_lock lk(t.mu);
  auto it = t.ids.find(mark);
  if (it != t.ids.end()) return it->second;
  const auto id = static_cast<MarkId>(t.names.size());
  t.names.emplace_back(mark);
  t.ids.emplace(t.names.back(), id);
  return id;
}

const std::string& mark_name(MarkId id) {
  auto& t = table();
  std::shared_lock lk(t.mu);
  return t.names.at(id);
}

SymbolClassifier::SymbolClassifier(std::vector<std::string> id_marks)
    : id_marks_(id_marks.begin(), id_marks.end()) {}

void SymbolClassifier::add_id_mark(std::string mark) { id_marks_.insert(std::move(mark)); }

SymbolKind SymbolClassifier::classify(std::string_view mark) const {
  if (mark == "<" || mark == ">") return SymbolKind::boundary;
  if (mark.empty()) return SymbolKind::content;
  if (mark.front() == '%' || mark.front() == '#') return SymbolKind::identification;
  bool digits = true;
  for (char c : mark) digits = digits && c >= '0' && c <= '9';
  if (digits) return SymbolKind::identification;
  if (id_marks_.count(std::string(mark))) return SymbolKind::identification;
  return SymbolKind::content;
}

}  // namespace sp
