#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace parlalign {

// A reference-transcript word; `text` is a normalized token.
struct TimedWord {
  std::string text;
  double start_s = 0.0;
  double end_s = 0.0;
};

// One ground-truth word. `index` equals the word's position in its vector.
struct GtWord {
  std::size_t index = 0;
  std::string raw;
  std::string norm;
};

struct Anchor {
  std::size_t gt_index = 0;
  std::size_t ref_index = 0;
  double time_s = 0.0;
  int score = 0;

  bool operator==(const Anchor&) const = default;
};

struct AlignParams {
  std::size_t max_word_dist = 1;
  std::size_t window = 50;
  std::size_t context_radius = 4;
  int min_score = 3;
  std::size_t min_word_len = 3;

  // Throws ValidationError if any field is out of range.
  void validate() const;
};

// Splits `text` on whitespace into ground-truth words. Tokens that normalize
// to nothing (a lone dash, an ellipsis) are attached to the preceding word's
// raw text so orthography survives but the token never takes an index.
std::vector<GtWord> make_gt_words(std::string_view text);

// Normalizes raw reference words. A word that normalizes to nothing is
// dropped; one that splits into several tokens shares its timestamps.
struct RawTimedWord {
  std::string word;
  double start_s = 0.0;
  double end_s = 0.0;
};
std::vector<TimedWord> make_ref_words(std::span<const RawTimedWord> raw);

// Indices i with cursor < i <= cursor + window and
// levenshtein(ref_word.text, gt[i].norm) <= max_word_dist, ascending.
// `cursor` is the gt_index of the latest anchor, or -1 before the first.
std::vector<std::size_t> candidate_matches(const TimedWord& ref_word, std::span<const GtWord> gt,
                                           long cursor, const AlignParams& params);

// Number of offsets k in [-radius,-1] u [1,radius] where both neighbours
// exist and gt[gt_i+k].norm == ref[ref_j+k].text.
int context_score(std::size_t gt_i, std::size_t ref_j, std::span<const GtWord> gt,
                  std::span<const TimedWord> ref, std::size_t radius);

// Single forward pass over `ref` producing anchors whose gt_index, ref_index
// and time_s are all strictly increasing.
std::vector<Anchor> align(std::span<const GtWord> gt, std::span<const TimedWord> ref,
                          const AlignParams& params = {});

}  // namespace parlalign
