#include "parlalign/aligner.hpp"

#include <limits>

#include "parlalign/error.hpp"
#include "parlalign/text_metrics.hpp"
#include "parlalign/unicode.hpp"

namespace parlalign {

void AlignParams::validate() const {
  if (window < 1) throw ValidationError("align window must be >= 1");
  if (context_radius < 1) throw ValidationError("context radius must be >= 1");
  if (min_score < 1) throw ValidationError("minimum match score must be >= 1");
  if (min_word_len < 1) throw ValidationError("minimum word length must be >= 1");
}

std::vector<GtWord> make_gt_words(std::string_view text) {
  std::vector<GtWord> words;
  std::string leading;
  for (auto raw : unicode::split_whitespace(text)) {
    std::string norm = normalize_token(raw);
    if (norm.empty()) {
      if (words.empty()) {
        if (!leading.empty()) leading.push_back(' ');
        leading.append(raw);
      } else {
        words.back().raw.push_back(' ');
        words.back().raw.append(raw);
      }
      continue;
    }
    GtWord w{words.size(), std::string(raw), std::move(norm)};
    if (!leading.empty()) {
      w.raw = leading + ' ' + w.raw;
      leading.clear();
    }
    words.push_back(std::move(w));
  }
  return words;
}

std::vector<TimedWord> make_ref_words(std::span<const RawTimedWord> raw) {
  std::vector<TimedWord> out;
  out.reserve(raw.size());
  for (const auto& w : raw) {
    for (auto& token : normalize(w.word).words) out.push_back({std::move(token), w.start_s, w.end_s});
  }
  return out;
}

namespace {

// Code-point views of both sequences, decoded once per alignment.
struct DecodedCorpus {
  std::vector<std::u32string> gt;
  std::vector<std::u32string> ref;

  DecodedCorpus(std::span<const GtWord> gt_words, std::span<const TimedWord> ref_words) {
    gt.reserve(gt_words.size());
    for (const auto& w : gt_words) gt.push_back(unicode::decode(w.norm));
    ref.reserve(ref_words.size());
    for (const auto& w : ref_words) ref.push_back(unicode::decode(w.text));
  }
};

std::pair<std::size_t, std::size_t> window_bounds(long cursor, std::size_t window, std::size_t n) {
  const std::size_t lo = static_cast<std::size_t>(cursor + 1);
  const std::size_t hi = std::min(n, static_cast<std::size_t>(cursor) + 1 + window);
  return {lo, hi};
}

}  // namespace

std::vector<std::size_t> candidate_matches(const TimedWord& ref_word, std::span<const GtWord> gt,
                                           long cursor, const AlignParams& params) {
  std::vector<std::size_t> out;
  const auto [lo, hi] = window_bounds(cursor, params.window, gt.size());
  const std::u32string ref = unicode::decode(ref_word.text);
  std::u32string cand;
  for (std::size_t i = lo; i < hi; ++i) {
    unicode::decode_into(gt[i].norm, cand);
    if (within_distance(ref, cand, params.max_word_dist)) out.push_back(i);
  }
  return out;
}

int context_score(std::size_t gt_i, std::size_t ref_j, std::span<const GtWord> gt,
                  std::span<const TimedWord> ref, std::size_t radius) {
  int score = 0;
  for (std::size_t k = 1; k <= radius; ++k) {
    if (gt_i >= k && ref_j >= k && gt[gt_i - k].norm == ref[ref_j - k].text) ++score;
    if (gt_i + k < gt.size() && ref_j + k < ref.size() && gt[gt_i + k].norm == ref[ref_j + k].text)
      ++score;
  }
  return score;
}

std::vector<Anchor> align(std::span<const GtWord> gt, std::span<const TimedWord> ref,
                          const AlignParams& params) {
  params.validate();
  const DecodedCorpus decoded(gt, ref);
  std::vector<Anchor> anchors;
  long cursor = -1;

  for (std::size_t j = 0; j < ref.size(); ++j) {
    const std::u32string& word = decoded.ref[j];
    if (word.size() < params.min_word_len) continue;

    const auto [lo, hi] = window_bounds(cursor, params.window, gt.size());
    long best = -1;
    int best_score = std::numeric_limits<int>::min();
    for (std::size_t i = lo; i < hi; ++i) {
      if (!within_distance(word, decoded.gt[i], params.max_word_dist)) continue;
      const int score = context_score(i, j, gt, ref, params.context_radius);
      if (score > best_score) {
        best_score = score;
        best = static_cast<long>(i);
      }
    }
    if (best < 0 || best_score < params.min_score) continue;
    if (!anchors.empty() && !(ref[j].start_s > anchors.back().time_s)) continue;

    anchors.push_back({static_cast<std::size_t>(best), j, ref[j].start_s, best_score});
    cursor = best;
  }
  return anchors;
}

}  // namespace parlalign
