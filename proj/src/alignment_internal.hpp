#pragma once

#include <utility>
#include <vector>

#include "sp/alignment.hpp"

namespace sp::detail {

/// Puts columns in canonical order and renumbers rows by first appearance.
void canonicalize(Alignment& a);

/// Interleaves two column lists, fusing the paired columns.
std::vector<Column> merge_columns(const std::vector<Column>& left, const std::vector<Column>& right,
                                  const std::vector<std::pair<std::size_t, std::size_t>>& pairs);

std::size_t instances_of(const Alignment& a, int pattern);

}  // namespace sp::detail
