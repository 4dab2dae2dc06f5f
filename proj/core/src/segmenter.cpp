#include "parlalign/segmenter.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <unordered_map>

#include "parlalign/text_metrics.hpp"

namespace parlalign {

void SegmentParams::validate() const {
  if (!(max_gap_s > 0)) throw ValidationError("max_gap_s must be > 0");
  if (!(wer_threshold >= 0)) throw ValidationError("wer_threshold must be >= 0");
  if (!(max_duration_s > 0)) throw ValidationError("max_duration_s must be > 0");
  if (!(bin_width > 0)) throw ValidationError("bin_width must be > 0");
  if (!(histogram_clip > 0)) throw ValidationError("histogram_clip must be > 0");
}

std::string_view to_string(DropReason reason) {
  switch (reason) {
    case DropReason::kOverDuration:
      return "over_duration";
    case DropReason::kOverWer:
      return "over_wer";
    case DropReason::kUnscored:
      return "unscored";
  }
  return "unknown";
}

DropReason drop_reason_from_string(std::string_view s) {
  if (s == "over_duration") return DropReason::kOverDuration;
  if (s == "over_wer") return DropReason::kOverWer;
  if (s == "unscored") return DropReason::kUnscored;
  throw ValidationError("unknown drop reason '" + std::string(s) + "'");
}

std::vector<Segment> build_segments(std::span<const Anchor> anchors, std::span<const GtWord> gt,
                                    double max_gap_s, std::string_view id_prefix,
                                    Warnings* warnings) {
  std::vector<Segment> segments;
  if (anchors.size() < 2) {
    if (warnings)
      warnings->push_back({"too_few_anchors", std::to_string(anchors.size()) +
                                                  " anchor(s); no segment can be formed"});
    return segments;
  }

  auto emit = [&](const Anchor& from, const Anchor& to) {
    Segment seg;
    char id[32];
    std::snprintf(id, sizeof id, "-%06zu", segments.size() + 1);
    seg.id = std::string(id_prefix) + id;
    seg.start_s = from.time_s;
    seg.end_s = to.time_s;
    seg.gt_from = from.gt_index;
    seg.gt_to = to.gt_index;
    for (std::size_t i = from.gt_index; i <= to.gt_index && i < gt.size(); ++i) {
      if (!seg.text.empty()) seg.text.push_back(' ');
      seg.text += gt[i].raw;
    }
    segments.push_back(std::move(seg));
  };

  const std::size_t n = anchors.size();
  std::size_t a = 0;
  while (a < n) {
    std::size_t b = a + 1;
    while (b < n && !(anchors[b].time_s - anchors[a].time_s > max_gap_s)) ++b;
    if (b < n) {
      emit(anchors[a], anchors[b]);
      a = b + 1;
      continue;
    }
    const std::size_t last = n - 1;
    if (last > a && anchors[last].time_s > anchors[a].time_s) emit(anchors[a], anchors[last]);
    break;
  }
  return segments;
}

CutManifest emit_cut_manifest(std::span<const Segment> segments, std::string_view audio_path) {
  CutManifest manifest;
  manifest.rows.reserve(segments.size());
  for (std::size_t k = 0; k < segments.size(); ++k) {
    const Segment& s = segments[k];
    if (!(s.end_s > s.start_s))
      throw ValidationError("segment has non-positive duration", "segment " + s.id);
    if (k > 0 && s.start_s < segments[k - 1].end_s)
      throw ValidationError("segment overlaps or precedes " + segments[k - 1].id, "segment " + s.id);
    manifest.rows.push_back({std::string(audio_path), s.start_s, s.end_s, s.id});
  }
  return manifest;
}

std::vector<SegmentScore> score_against_reference(std::span<const Segment> segments,
                                                  std::span<const TimedWord> ref) {
  std::vector<SegmentScore> scores;
  scores.reserve(segments.size());
  for (const auto& seg : segments) {
    auto first = std::lower_bound(ref.begin(), ref.end(), seg.start_s,
                                  [](const TimedWord& w, double t) { return w.start_s < t; });
    NormalizedWords hyp;
    std::string hypothesis;
    for (auto it = first; it != ref.end() && it->start_s <= seg.end_s; ++it) {
      if (!hypothesis.empty()) hypothesis.push_back(' ');
      hypothesis += it->text;
      hyp.words.push_back(it->text);
    }
    const NormalizedWords reference = normalize(seg.text);
    const double value = reference.empty() ? static_cast<double>(hyp.size()) : wer(reference, hyp).value;
    scores.push_back({seg.id, std::move(hypothesis), value});
  }
  return scores;
}

Selection select(std::span<const Segment> segments, std::span<const SegmentScore> scores,
                 double wer_threshold, double max_duration_s) {
  std::unordered_map<std::string_view, const SegmentScore*> by_id;
  by_id.reserve(scores.size());
  for (const auto& s : scores) {
    if (!by_id.emplace(s.segment_id, &s).second)
      throw ValidationError("duplicate score for segment '" + s.segment_id + "'");
  }

  Selection out;
  std::size_t matched = 0;
  for (const auto& seg : segments) {
    const auto it = by_id.find(seg.id);
    if (it != by_id.end()) ++matched;
    if (!(seg.duration_s() < max_duration_s)) {
      out.dropped.push_back({seg, DropReason::kOverDuration});
    } else if (it == by_id.end()) {
      out.dropped.push_back({seg, DropReason::kUnscored});
    } else if (!(it->second->wer_value <= wer_threshold)) {
      out.dropped.push_back({seg, DropReason::kOverWer});
    } else {
      out.kept.push_back(seg);
    }
  }
  if (matched < scores.size()) {
    out.warnings.push_back({"orphan_scores", std::to_string(scores.size() - matched) +
                                                 " score(s) reference no known segment"});
  }
  return out;
}

double round_hours(double seconds) {
  // Round on centi-hours; the small epsilon absorbs summation noise
  // sitting just under a .xx5 boundary.
  const double centi = seconds / 36.0;
  return std::floor(centi + 0.5 + 1e-9) / 100.0;
}

void CorpusStatsAccumulator::KahanSum::add(double x) {
  const double y = x - carry;
  const double t = sum + y;
  carry = (t - sum) - y;
  sum = t;
}

void CorpusStatsAccumulator::KahanSum::merge(const KahanSum& o) {
  add(o.sum);
  add(-o.carry);
}

void CorpusStatsAccumulator::add_kept(double duration_s) {
  ++kept_;
  kept_s_.add(duration_s);
}

void CorpusStatsAccumulator::add_dropped(double duration_s, DropReason reason) {
  ++dropped_;
  dropped_s_.add(duration_s);
  ++reasons_[std::string(to_string(reason))];
}

void CorpusStatsAccumulator::merge(const CorpusStatsAccumulator& other) {
  kept_ += other.kept_;
  dropped_ += other.dropped_;
  kept_s_.merge(other.kept_s_);
  dropped_s_.merge(other.dropped_s_);
  for (const auto& [k, v] : other.reasons_) reasons_[k] += v;
}

CorpusStats CorpusStatsAccumulator::finish() const {
  CorpusStats s;
  s.kept_segments = kept_;
  s.dropped_segments = dropped_;
  s.input_segments = kept_ + dropped_;
  s.kept_seconds = kept_s_.sum;
  s.dropped_seconds = dropped_s_.sum;
  KahanSum total = kept_s_;
  total.merge(dropped_s_);
  s.input_seconds = total.sum;
  for (auto reason : {DropReason::kOverDuration, DropReason::kOverWer, DropReason::kUnscored})
    s.drop_reasons[std::string(to_string(reason))] = 0;
  for (const auto& [k, v] : reasons_) s.drop_reasons[k] = v;
  return s;
}

CorpusStats corpus_stats(std::span<const Segment> kept, std::span<const DroppedSegment> dropped) {
  CorpusStatsAccumulator acc;
  for (const auto& s : kept) acc.add_kept(s.duration_s());
  for (const auto& d : dropped) acc.add_dropped(d.segment.duration_s(), d.reason);
  return acc.finish();
}

namespace {

// Snaps q onto the nearest integer when it is within relative 1e-9 of it.
double snap(double q) {
  const double r = std::round(q);
  return std::fabs(q - r) <= 1e-9 * std::max(1.0, std::fabs(r)) ? r : q;
}

std::string format_edge(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

}  // namespace

std::size_t WerHistogram::total() const {
  std::size_t n = overflow;
  for (auto c : bins) n += c;
  return n;
}

double WerHistogram::bin_low(std::size_t k) const { return static_cast<double>(k) * bin_width; }

double WerHistogram::bin_high(std::size_t k) const {
  return std::min(static_cast<double>(k + 1) * bin_width, clip);
}

std::string WerHistogram::to_csv() const {
  std::string out = "bin_low,bin_high,count\n";
  for (std::size_t k = 0; k < bins.size(); ++k)
    out += format_edge(bin_low(k)) + ',' + format_edge(bin_high(k)) + ',' + std::to_string(bins[k]) + '\n';
  out += format_edge(clip) + ",inf," + std::to_string(overflow) + '\n';
  return out;
}

std::string WerHistogram::to_text_chart(std::size_t width) const {
  std::size_t peak = overflow;
  for (auto c : bins) peak = std::max(peak, c);
  auto line = [&](const std::string& label, std::size_t count) {
    const std::size_t bar = peak == 0 ? 0 : (count * width + peak - 1) / peak;
    char head[48];
    std::snprintf(head, sizeof head, "%-16s", label.c_str());
    return std::string(head) + std::string(bar, '#') + ' ' + std::to_string(count) + '\n';
  };
  std::string out;
  for (std::size_t k = 0; k < bins.size(); ++k) {
    char label[48];
    std::snprintf(label, sizeof label, "[%.2f, %.2f)", bin_low(k), bin_high(k));
    out += line(label, bins[k]);
  }
  char label[48];
  std::snprintf(label, sizeof label, "[%.2f, inf)", clip);
  out += line(label, overflow);
  return out;
}

WerHistogram wer_histogram(std::span<const double> values, double bin_width, double clip) {
  if (!(bin_width > 0)) throw ValidationError("histogram bin width must be > 0");
  if (!(clip > 0)) throw ValidationError("histogram clip must be > 0");
  WerHistogram h;
  h.bin_width = bin_width;
  h.clip = clip;
  h.bins.assign(static_cast<std::size_t>(std::ceil(snap(clip / bin_width))), 0);
  for (double v : values) {
    if (!(v >= 0)) throw ValidationError("WER value must be a non-negative number");
    if (v >= clip) {
      ++h.overflow;
      continue;
    }
    const auto k = static_cast<std::size_t>(std::floor(snap(v / bin_width)));
    if (k >= h.bins.size()) {
      ++h.overflow;
    } else {
      ++h.bins[k];
    }
  }
  return h;
}

WerHistogram wer_histogram(std::span<const SegmentScore> scores, double bin_width, double clip) {
  std::vector<double> values;
  values.reserve(scores.size());
  for (const auto& s : scores) values.push_back(s.wer_value);
  return wer_histogram(values, bin_width, clip);
}

}  // namespace parlalign
