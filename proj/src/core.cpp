#include "sp/core.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

namespace sp {

namespace {

bool is_blank(char c) { return c == ' ' || c == '\t'; }

std::vector<std::string_view> split_marks(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && is_blank(line[i])) ++i;
    std::size_t j = i;
    while (j < line.size() && !is_blank(line[j])) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

constexpr std::string_view kIdPragma = ";@id";

}  // namespace

Pattern::Pattern(const std::vector<std::string>& marks, std::int64_t frequency, Role role,
                 const SymbolClassifier& classifier)
    : frequency_(frequency), role_(role) {
  symbols_.reserve(marks.size());
  ids_.reserve(marks.size());
  for (const auto& m : marks) {
    Symbol s{m, classifier.classify(m), intern(m)};
    ids_.push_back(s.id);
    symbols_.push_back(std::move(s));
  }
}

Pattern Pattern::from_text(std::string_view text, std::int64_t frequency, Role role,
                           const SymbolClassifier& classifier) {
  std::vector<std::string> marks;
  for (auto m : split_marks(text)) marks.emplace_back(m);
  return Pattern(marks, frequency, role, classifier);
}

Pattern Pattern::with_frequency(std::int64_t f) const {
  Pattern p = *this;
  p.frequency_ = f;
  return p;
}

Pattern Pattern::with_role(Role r) const {
  Pattern p = *this;
  p.role_ = r;
  return p;
}

std::string Pattern::text() const {
  std::string out;
  for (std::size_t i = 0; i < symbols_.size(); ++i) {
    if (i) out += ' ';
    out += symbols_[i].mark;
  }
  return out;
}

FormatError::FormatError(std::size_t line, const std::string& detail, const std::string& source)
    : std::runtime_error((source.empty() ? "" : source + ":") + "line " + std::to_string(line) + ": " + detail),
      line_(line),
      detail_(detail) {}

PatternFile parse_pattern_file(std::string_view text, Role role, const SymbolClassifier& base) {
  struct Raw {
    std::vector<std::string> marks;
    std::int64_t freq;
  };
  PatternFile out;
  out.classifier = base;
  std::vector<Raw> raws;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    auto toks = split_marks(line);
    if (toks.empty()) {
      if (end == text.size()) break;
      continue;
    }
    if (toks.front().front() == ';') {
      if (toks.front() == kIdPragma) {
        for (std::size_t i = 1; i < toks.size(); ++i) out.classifier.add_id_mark(std::string(toks[i]));
      }
      if (end == text.size()) break;
      continue;
    }

    Raw raw{{}, 1};
    std::size_t first = 0;
    if (toks.front().size() > 1 && toks.front().front() == '@') {
      auto digits = toks.front().substr(1);
      std::int64_t n = 0;
      auto [p, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), n);
      if (ec != std::errc{} || p != digits.data() + digits.size())
        throw FormatError(line_no, "bad frequency token '" + std::string(toks.front()) + "'");
      if (n <= 0) throw FormatError(line_no, "non-positive frequency " + std::to_string(n));
      raw.freq = n;
      first = 1;
    }
    if (first == toks.size()) throw FormatError(line_no, "empty pattern");
    for (std::size_t i = first; i < toks.size(); ++i) raw.marks.emplace_back(toks[i]);
    raws.push_back(std::move(raw));
    if (end == text.size()) break;
  }

  out.patterns.reserve(raws.size());
  for (auto& r : raws) out.patterns.emplace_back(r.marks, r.freq, role, out.classifier);
  return out;
}

std::string serialize_pattern_file(std::span<const Pattern> patterns, const SymbolClassifier& classifier) {
  std::ostringstream os;
  if (!classifier.id_marks().empty()) {
    std::vector<std::string> ids(classifier.id_marks().begin(), classifier.id_marks().end());
    std::sort(ids.begin(), ids.end());
    os << kIdPragma;
    for (const auto& m : ids) os << ' ' << m;
    os << '\n';
  }
  for (const auto& p : patterns) {
    // A first mark starting with ';' or '@' would be misread, so such lines
    // always carry an explicit frequency.
    const bool guard = !p.empty() && (p[0].mark.front() == ';' || p[0].mark.front() == '@');
    if (p.frequency() > 1 || guard) os << '@' << p.frequency() << ' ';
    os << p.text() << '\n';
  }
  return os.str();
}

Grammar parse_grammar(std::string_view text, const SymbolClassifier& base) {
  auto f = parse_pattern_file(text, Role::Old, base);
  return Grammar{std::move(f.patterns), std::move(f.classifier)};
}

Corpus parse_corpus(std::string_view text, const SymbolClassifier& base) {
  auto f = parse_pattern_file(text, Role::New, base);
  return Corpus{std::move(f.patterns), std::move(f.classifier)};
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Grammar load_grammar(const std::string& path, const SymbolClassifier& base) {
  try {
    return parse_grammar(read_text_file(path), base);
  } catch (const FormatError& e) {
    throw FormatError(e.line(), e.detail(), path);
  }
}

Corpus load_corpus(const std::string& path, const SymbolClassifier& base) {
  try {
    return parse_corpus(read_text_file(path), base);
  } catch (const FormatError& e) {
    throw FormatError(e.line(), e.detail(), path);
  }
}

std::vector<std::string> validate_pattern(const Pattern& p) {
  std::vector<std::string> v;
  if (p.empty()) v.emplace_back("empty pattern");
  if (p.frequency() <= 0) v.emplace_back("non-positive frequency");
  for (std::size_t i = 0; i < p.size(); ++i) {
    const auto& m = p[i].mark;
    if (m.empty()) v.push_back("empty mark at position " + std::to_string(i));
    else if (std::any_of(m.begin(), m.end(), [](char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }))
      v.push_back("whitespace in mark at position " + std::to_string(i));
  }
  return v;
}

}  // namespace sp
