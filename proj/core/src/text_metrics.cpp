#include "parlalign/text_metrics.hpp"

#include <algorithm>
#include <cstdint>

#include "parlalign/error.hpp"
#include "parlalign/unicode.hpp"

namespace parlalign {

namespace {

void append_normalized(std::u32string_view cps, std::string& token,
                       std::vector<std::string>* sink) {
  for (char32_t cp : cps) {
    if (unicode::is_whitespace(cp)) {
      if (sink && !token.empty()) {
        sink->push_back(std::move(token));
        token.clear();
      }
      continue;
    }
    if (unicode::is_punctuation(cp)) continue;
    unicode::append_utf8(token, unicode::fold(cp));
  }
}

}  // namespace

NormalizedWords normalize(std::string_view text) {
  thread_local std::u32string cps;
  unicode::decode_into(text, cps);
  NormalizedWords out;
  std::string token;
  append_normalized(cps, token, &out.words);
  if (!token.empty()) out.words.push_back(std::move(token));
  return out;
}

std::string normalize_token(std::string_view token) {
  thread_local std::u32string cps;
  unicode::decode_into(token, cps);
  std::string out;
  // Whitespace inside a "token" is dropped rather than split.
  std::erase_if(cps, [](char32_t cp) { return unicode::is_whitespace(cp); });
  append_normalized(cps, out, nullptr);
  return out;
}

std::size_t levenshtein(std::u32string_view a, std::u32string_view b) {
  if (a.size() < b.size()) std::swap(a, b);
  if (b.empty()) return a.size();
  thread_local std::vector<std::size_t> row;
  row.resize(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t up = row[j];
      const std::size_t sub = diag + (a[i - 1] == b[j - 1] ? 0 : 1);
      row[j] = std::min({sub, up + 1, row[j - 1] + 1});
      diag = up;
    }
  }
  return row[b.size()];
}

std::size_t levenshtein(std::string_view a, std::string_view b) {
  if (a == b) return 0;
  thread_local std::u32string ca, cb;
  unicode::decode_into(a, ca);
  unicode::decode_into(b, cb);
  return levenshtein(std::u32string_view(ca), std::u32string_view(cb));
}

bool within_distance(std::u32string_view a, std::u32string_view b, std::size_t bound) {
  const std::size_t diff = a.size() > b.size() ? a.size() - b.size() : b.size() - a.size();
  if (diff > bound) return false;
  if (a == b) return true;
  if (bound == 0) return false;
  if (bound == 1) {
    // Strip common prefix and suffix; what remains must be a single edit.
    std::size_t p = 0;
    const std::size_t n = std::min(a.size(), b.size());
    while (p < n && a[p] == b[p]) ++p;
    std::size_t sa = a.size(), sb = b.size();
    while (sa > p && sb > p && a[sa - 1] == b[sb - 1]) --sa, --sb;
    return (sa - p) <= 1 && (sb - p) <= 1;
  }
  // Banded DP; cells outside the band are treated as bound+1.
  const std::size_t inf = bound + 1;
  thread_local std::vector<std::size_t> prev, cur;
  prev.assign(b.size() + 1, inf);
  cur.assign(b.size() + 1, inf);
  for (std::size_t j = 0; j <= std::min(b.size(), bound); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    const std::size_t lo = i > bound ? i - bound : 0;
    const std::size_t hi = std::min(b.size(), i + bound);
    std::fill(cur.begin(), cur.end(), inf);
    std::size_t row_min = inf;
    if (lo == 0) cur[0] = i;
    for (std::size_t j = std::max<std::size_t>(lo, 1); j <= hi; ++j) {
      const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({sub, prev[j] + 1, cur[j - 1] + 1, inf});
    }
    for (std::size_t j = lo; j <= hi; ++j) row_min = std::min(row_min, cur[j]);
    if (row_min > bound) return false;
    std::swap(prev, cur);
  }
  return prev[b.size()] <= bound;
}

namespace {

// One DP cell: total cost plus the S/D/I split of the path that reached it.
struct Cell {
  std::uint32_t cost;
  std::uint32_t sub;
  std::uint32_t del;
  std::uint32_t ins;
};

// Equal cost: more substitutions means fewer delete+insert pairs.
inline bool better(const Cell& x, const Cell& y) {
  return x.cost < y.cost || (x.cost == y.cost && x.sub > y.sub);
}

}  // namespace

WerScore wer(const NormalizedWords& reference, const NormalizedWords& hypothesis) {
  if (reference.empty()) throw ValidationError("WER undefined for an empty reference");
  const auto& ref = reference.words;
  const auto& hyp = hypothesis.words;

  thread_local std::vector<Cell> prev, cur;
  prev.resize(hyp.size() + 1);
  cur.resize(hyp.size() + 1);
  for (std::uint32_t j = 0; j <= hyp.size(); ++j) prev[j] = {j, 0, 0, j};

  for (std::size_t i = 1; i <= ref.size(); ++i) {
    cur[0] = {prev[0].cost + 1, prev[0].sub, prev[0].del + 1, prev[0].ins};
    for (std::size_t j = 1; j <= hyp.size(); ++j) {
      const Cell& d = prev[j - 1];
      Cell best = d;
      if (ref[i - 1] != hyp[j - 1]) ++best.cost, ++best.sub;
      Cell del = prev[j];
      ++del.cost, ++del.del;
      if (better(del, best)) best = del;
      Cell ins = cur[j - 1];
      ++ins.cost, ++ins.ins;
      if (better(ins, best)) best = ins;
      cur[j] = best;
    }
    std::swap(prev, cur);
  }

  const Cell& end = prev[hyp.size()];
  WerScore score;
  score.substitutions = end.sub;
  score.deletions = end.del;
  score.insertions = end.ins;
  score.reference_length = ref.size();
  score.value = static_cast<double>(end.cost) / static_cast<double>(ref.size());
  return score;
}

WerScore wer(std::string_view reference, std::string_view hypothesis) {
  return wer(normalize(reference), normalize(hypothesis));
}

}  // namespace parlalign
