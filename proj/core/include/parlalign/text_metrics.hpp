#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace parlalign {

// Case-folded, punctuation-free, whitespace-free tokens in text order.
struct NormalizedWords {
  std::vector<std::string> words;

  bool empty() const noexcept { return words.empty(); }
  std::size_t size() const noexcept { return words.size(); }
  bool operator==(const NormalizedWords&) const = default;
};

struct WerScore {
  std::size_t substitutions = 0;
  std::size_t deletions = 0;
  std::size_t insertions = 0;
  std::size_t reference_length = 0;
  double value = 0.0;

  std::size_t errors() const noexcept { return substitutions + deletions + insertions; }
};

// Case-fold, drop every Unicode punctuation character, split on whitespace.
// Punctuation inside a token fuses its neighbours ("A-B" -> "ab").
NormalizedWords normalize(std::string_view text);

// Normalizes a single whitespace-free token; may return an empty string.
std::string normalize_token(std::string_view token);

// Unit-cost edit distance over code points.
std::size_t levenshtein(std::string_view a, std::string_view b);
std::size_t levenshtein(std::u32string_view a, std::u32string_view b);

// levenshtein(a, b) <= bound, computed in a diagonal band of width 2*bound+1.
bool within_distance(std::u32string_view a, std::u32string_view b, std::size_t bound);

// Word error rate of `hypothesis` against `reference`. Throws
// ValidationError when the reference is empty. S/D/I come from one optimal
// alignment; ties prefer substitutions over a deletion+insertion pair.
WerScore wer(const NormalizedWords& reference, const NormalizedWords& hypothesis);

// Convenience: normalizes both sides first.
WerScore wer(std::string_view reference, std::string_view hypothesis);

}  // namespace parlalign
