#pragma once

// Deterministic synthetic corpora for tests and the acceptance suite.

#include <cstddef>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace synth {

inline const std::vector<std::string>& letters() {
  static const std::vector<std::string> kLetters = {
      "a", "b", "c", "d", "e", "f", "g", "h", "i", "j", "k", "l", "m", "n", "o", "p", "r", "s",
      "t", "u", "v", "z", "á", "ä", "č", "ď", "é", "í", "ľ", "ň", "ó", "ô", "š", "ť", "ú", "ý", "ž"};
  return kLetters;
}

inline std::string random_word(std::mt19937_64& rng, std::size_t min_len, std::size_t max_len) {
  std::uniform_int_distribution<std::size_t> len(min_len, max_len);
  std::uniform_int_distribution<std::size_t> pick(0, letters().size() - 1);
  std::string w;
  const std::size_t n = len(rng);
  for (std::size_t i = 0; i < n; ++i) w += letters()[pick(rng)];
  return w;
}

// `n` distinct lowercase words of 3..max_len letters.
inline std::vector<std::string> vocabulary(std::mt19937_64& rng, std::size_t n, std::size_t max_len = 9) {
  std::set<std::string> seen;
  std::vector<std::string> out;
  while (out.size() < n) {
    std::string w = random_word(rng, 3, max_len);
    if (seen.insert(w).second) out.push_back(std::move(w));
  }
  return out;
}

// Replaces one letter (a distance-1 misspelling).
inline std::string misspell(std::mt19937_64& rng, const std::string& word) {
  std::vector<std::string> cps;
  for (std::size_t i = 0; i < word.size();) {
    const unsigned char c = static_cast<unsigned char>(word[i]);
    const std::size_t len = c >= 0xF0 ? 4 : c >= 0xE0 ? 3 : c >= 0xC0 ? 2 : 1;
    cps.push_back(word.substr(i, len));
    i += len;
  }
  std::uniform_int_distribution<std::size_t> pos(0, cps.size() - 1);
  std::uniform_int_distribution<std::size_t> pick(0, letters().size() - 1);
  const std::size_t at = pos(rng);
  std::string repl;
  do repl = letters()[pick(rng)];
  while (repl == cps[at]);
  cps[at] = repl;
  std::string out;
  for (auto& c : cps) out += c;
  return out;
}

}  // namespace synth
