#include "sp/coding.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sp/kernels.hpp"

namespace sp {

const char* to_string(CodeSizeMode m) { return m == CodeSizeMode::sfe ? "sfe" : "ideal"; }

CodeSizeMode parse_code_size_mode(std::string_view s) {
  if (s == "sfe") return CodeSizeMode::sfe;
  if (s == "ideal") return CodeSizeMode::ideal;
  throw std::invalid_argument("unknown code-size mode '" + std::string(s) + "'");
}

BitCost::BitCost(double bits) : bits_(bits) {
  if (!(bits >= 0.0)) throw std::invalid_argument("negative bit cost");
}

int sfe_length(std::uint64_t f, std::uint64_t total) {
  if (f == 0 || f > total) throw std::invalid_argument("sfe_length: frequency out of range");
  int l = 0;
  unsigned __int128 v = f;
  while (v < total) {
    v <<= 1;
    ++l;
  }
  return l + 1;
}

CodeScheme::CodeScheme(const std::vector<std::pair<MarkId, std::uint64_t>>& freqs, CodeSchemeOptions opts)
    : opts_(opts) {
  if (opts.alphabet_size < 2) throw std::invalid_argument("alphabet size must be at least 2");
  for (const auto& [m, f] : freqs) {
    if (f == 0) {
      warnings_.push_back("mark '" + mark_name(m) + "' has zero frequency; excluded");
      continue;
    }
    entries_[m].frequency += f;
  }
  for (const auto& [m, e] : entries_) total_ += e.frequency;
  if (total_ == 0) throw std::invalid_argument("all symbol frequencies are zero");
  for (auto& [m, e] : entries_) {
    if (opts.mode == CodeSizeMode::sfe)
      e.code_size = sfe_length(e.frequency, total_);
    else
      e.code_size = std::log2(static_cast<double>(total_) / static_cast<double>(e.frequency));
    max_size_ = std::max(max_size_, e.code_size);
  }
}

const CodeScheme::Entry& CodeScheme::entry(MarkId m) const {
  auto it = entries_.find(m);
  if (it == entries_.end()) throw UnknownMarkError(mark_name(m));
  return it->second;
}

std::vector<MarkId> CodeScheme::types() const {
  std::vector<MarkId> out;
  out.reserve(entries_.size());
  for (const auto& [m, e] : entries_) out.push_back(m);
  std::sort(out.begin(), out.end(), [](MarkId a, MarkId b) { return mark_name(a) < mark_name(b); });
  return out;
}

CodeScheme CodeScheme::scaled(double k) const {
  CodeScheme c = *this;
  for (auto& [m, e] : c.entries_) e.code_size *= k;
  c.max_size_ *= k;
  return c;
}

CodeScheme build_code_scheme(std::span<const Pattern> patterns, CodeSchemeOptions opts) {
  if (patterns.empty()) throw std::invalid_argument("empty grammar");
  std::unordered_map<MarkId, std::uint64_t> f;
  std::vector<MarkId> order;
  for (const auto& p : patterns) {
    for (auto id : p.ids()) {
      auto [it, fresh] = f.emplace(id, 0);
      if (fresh) order.push_back(id);
      it->second += static_cast<std::uint64_t>(p.frequency());
    }
  }
  std::vector<std::pair<MarkId, std::uint64_t>> v;
  for (auto id : order) v.emplace_back(id, f[id]);
  return CodeScheme(v, opts);
}

std::unordered_map<MarkId, std::uint64_t> type_frequencies(const AlignmentSubsets& subsets,
                                                           std::span<const MarkId> types) {
  std::unordered_map<MarkId, std::uint64_t> out;
  for (auto t : types) out.emplace(t, 0);
  for (const auto& subset : subsets) {
    for (auto t : types) {
      std::size_t best = 0;
      for (const auto& bag : subset) best = std::max(best, kernels::count_equal(bag, t));
      out[t] += best;
    }
  }
  return out;
}

CodeScheme build_code_scheme(std::span<const Pattern> patterns, const AlignmentSubsets& subsets,
                             CodeSchemeOptions opts) {
  if (patterns.empty()) throw std::invalid_argument("empty grammar");
  std::vector<MarkId> types;
  for (const auto& p : patterns)
    for (auto id : p.ids())
      if (std::find(types.begin(), types.end(), id) == types.end()) types.push_back(id);
  auto f = type_frequencies(subsets, types);
  std::vector<std::pair<MarkId, std::uint64_t>> v;
  for (auto t : types) v.emplace_back(t, f[t]);
  return CodeScheme(v, opts);
}

BitCost code_size_of_sequence(std::span<const MarkId> seq, const CodeScheme& scheme) {
  double bits = 0.0;
  for (auto m : seq) bits += scheme.code_size(m);
  return BitCost(bits);
}

double entropy(std::span<const double> probabilities) {
  double sum = 0.0, h = 0.0;
  for (double p : probabilities) {
    if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("probability outside (0,1]");
    sum += p;
    h -= p * std::log2(p);
  }
  if (std::abs(sum - 1.0) > 1e-9) throw std::invalid_argument("probabilities do not sum to 1");
  return h == 0.0 ? 0.0 : h;
}

double redundancy(std::span<const std::pair<double, double>> freq_size) {
  double r = 0.0;
  for (const auto& [f, s] : freq_size) r += (f - 1.0) * s;
  return r;
}

SearchSpace search_space_stats(unsigned N) {
  if (N == 0) throw std::invalid_argument("N must be at least 1");
  using boost::multiprecision::cpp_int;
  cpp_int P = (cpp_int(1) << N) - 1;
  cpp_int C = P * (P - 1) / 2;
  return {P, C};
}

}  // namespace sp
