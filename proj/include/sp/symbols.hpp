#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace sp {

// Interned mark handle. Equal marks always intern to the same id.
using MarkId = std::uint32_t;

enum class SymbolKind : std::uint8_t { content, identification, boundary };

const char* to_string(SymbolKind k);

/// Process-wide intern table. Thread safe; ids are never recycled.
MarkId intern(std::string_view mark);
const std::string& mark_name(MarkId id);

/**
 * Decides the kind of a mark from its spelling.
 *
 * `<` and `>` are boundary marks. Marks starting with `%` or `#`, all-digit
 * marks and anything listed in `id_marks` are identification marks.
 */
class SymbolClassifier {
 public:
  SymbolClassifier() = default;
  explicit SymbolClassifier(std::vector<std::string> id_marks);

  SymbolKind classify(std::string_view mark) const;
  void add_id_mark(std::string mark);
  const std::unordered_set<std::string>& id_marks() const { return id_marks_; }

  bool operator==(const SymbolClassifier& o) const { return id_marks_ == o.id_marks_; }

 private:
  std::unordered_set<std::string> id_marks_;
};

}  // namespace sp
