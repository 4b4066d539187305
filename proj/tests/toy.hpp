#pragma once

// Random toy grammars: a few word classes sequenced by one sentence pattern.

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "sp/core.hpp"

namespace sp::toy {

struct ToyLanguage {
  std::vector<std::vector<std::string>> classes;  // words as space-separated letters
  Grammar grammar;                                // `< %c d word >` members + `< d < %1 > ... >`
};

struct ToyShape {
  int min_slots = 2, max_slots = 3;
  int min_words = 2, max_words = 3;
  int min_len = 2, max_len = 4;
  std::string letters = "abcdefghijklmnop";
};

inline ToyLanguage random_language(std::mt19937& rng, const ToyShape& shape = {}) {
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  ToyLanguage lang;
  lang.classes.resize(static_cast<std::size_t>(pick(shape.min_slots, shape.max_slots)));
  for (auto& cl : lang.classes) {
    const int k = pick(shape.min_words, shape.max_words);
    while (static_cast<int>(cl.size()) < k) {
      std::string w;
      const int len = pick(shape.min_len, shape.max_len);
      for (int j = 0; j < len; ++j) {
        w += (w.empty() ? "" : " ");
        w += shape.letters[static_cast<std::size_t>(pick(0, static_cast<int>(shape.letters.size()) - 1))];
      }
      if (std::find(cl.begin(), cl.end(), w) == cl.end()) cl.push_back(w);
    }
  }
  int disc = 1;
  std::string top = "< " + std::to_string(disc++);
  for (std::size_t c = 0; c < lang.classes.size(); ++c) {
    const std::string cls = "%" + std::to_string(c + 1);
    top += " < " + cls + " >";
    for (const auto& w : lang.classes[c])
      lang.grammar.patterns.push_back(Pattern::from_text("< " + cls + " " + std::to_string(disc++) + " " + w + " >"));
  }
  lang.grammar.patterns.push_back(Pattern::from_text(top + " >"));
  return lang;
}

inline Pattern random_sentence(std::mt19937& rng, const ToyLanguage& lang) {
  std::string s;
  for (const auto& cl : lang.classes) {
    s += (s.empty() ? "" : " ");
    s += cl[std::uniform_int_distribution<std::size_t>(0, cl.size() - 1)(rng)];
  }
  return Pattern::from_text(s, 1, Role::New);
}

inline Corpus random_corpus(std::mt19937& rng, int min_sentences = 6, int max_sentences = 10,
                            const ToyShape& shape = {}) {
  auto lang = random_language(rng, shape);
  Corpus c;
  const int n = std::uniform_int_distribution<int>(min_sentences, max_sentences)(rng);
  for (int i = 0; i < n; ++i) c.patterns.push_back(random_sentence(rng, lang));
  return c;
}

}  // namespace sp::toy
