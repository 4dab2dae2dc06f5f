#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "parlalign/aligner.hpp"
#include "parlalign/error.hpp"

namespace parlalign {

struct Segment {
  std::string id;
  double start_s = 0.0;
  double end_s = 0.0;
  std::size_t gt_from = 0;
  std::size_t gt_to = 0;  // inclusive
  std::string text;

  double duration_s() const noexcept { return end_s - start_s; }
  bool operator==(const Segment&) const = default;
};

struct SegmentScore {
  std::string segment_id;
  std::string hypothesis;
  double wer_value = 0.0;
};

struct CutRow {
  std::string audio_path;
  double start_s = 0.0;
  double end_s = 0.0;
  std::string segment_id;
};

struct CutManifest {
  std::vector<CutRow> rows;
};

struct SegmentParams {
  double max_gap_s = 28.0;
  double wer_threshold = 0.40;
  double max_duration_s = 30.0;
  double bin_width = 0.05;
  double histogram_clip = 2.0;

  void validate() const;
};

enum class DropReason { kOverDuration, kOverWer, kUnscored };
std::string_view to_string(DropReason reason);
DropReason drop_reason_from_string(std::string_view s);

struct DroppedSegment {
  Segment segment;
  DropReason reason;
};

struct Selection {
  std::vector<Segment> kept;
  std::vector<DroppedSegment> dropped;
  Warnings warnings;
};

// Non-overlapping cover: from the first unconsumed anchor A, the segment
// ends at the first anchor B with B.time - A.time > max_gap_s; scanning
// resumes after B. Anchors left without such a B form one final segment
// when they span a positive duration. Ids are "<id_prefix>-NNNNNN".
std::vector<Segment> build_segments(std::span<const Anchor> anchors, std::span<const GtWord> gt,
                                    double max_gap_s = 28.0, std::string_view id_prefix = "seg",
                                    Warnings* warnings = nullptr);

// Throws ValidationError when segments overlap or are out of order.
CutManifest emit_cut_manifest(std::span<const Segment> segments, std::string_view audio_path);

// Hypothesis for each segment taken from the reference words whose start
// time lies in [start_s, end_s]; stands in for re-transcribing the slice.
std::vector<SegmentScore> score_against_reference(std::span<const Segment> segments,
                                                  std::span<const TimedWord> ref);

// kept: duration < max_duration and wer <= threshold. Throws
// ValidationError on a duplicate score id.
Selection select(std::span<const Segment> segments, std::span<const SegmentScore> scores,
                 double wer_threshold = 0.40, double max_duration_s = 30.0);

// Rounds half-up to two decimals.
double round_hours(double seconds);

struct CorpusStats {
  std::size_t input_segments = 0;
  std::size_t kept_segments = 0;
  std::size_t dropped_segments = 0;
  double input_seconds = 0.0;
  double kept_seconds = 0.0;
  double dropped_seconds = 0.0;
  std::map<std::string, std::size_t> drop_reasons;

  double input_hours() const { return round_hours(input_seconds); }
  double kept_hours() const { return round_hours(kept_seconds); }
  double dropped_hours() const { return round_hours(dropped_seconds); }
};

// Streaming aggregation; memory does not grow with the number of segments.
class CorpusStatsAccumulator {
 public:
  void add_kept(double duration_s);
  void add_dropped(double duration_s, DropReason reason);
  void merge(const CorpusStatsAccumulator& other);
  CorpusStats finish() const;

 private:
  // Compensated sums; hour totals must survive ~10^6 additions.
  struct KahanSum {
    double sum = 0.0;
    double carry = 0.0;
    void add(double x);
    void merge(const KahanSum& o);
  };
  std::size_t kept_ = 0;
  std::size_t dropped_ = 0;
  KahanSum kept_s_;
  KahanSum dropped_s_;
  std::map<std::string, std::size_t> reasons_;
};

CorpusStats corpus_stats(std::span<const Segment> kept, std::span<const DroppedSegment> dropped);

struct WerHistogram {
  double bin_width = 0.05;
  double clip = 2.0;
  std::vector<std::size_t> bins;  // [k*w, (k+1)*w) for k < bins.size()
  std::size_t overflow = 0;       // values >= clip

  std::size_t total() const;
  double bin_low(std::size_t k) const;
  double bin_high(std::size_t k) const;

  std::string to_csv() const;
  std::string to_text_chart(std::size_t width = 50) const;
};

// Bins are left-closed. Values within 1e-9 relative of a bin edge snap onto
// that edge so decimal boundaries like 0.15 land in the bin they open.
// Throws ValidationError for bin_width <= 0, clip <= 0, or a negative or
// NaN value.
WerHistogram wer_histogram(std::span<const double> values, double bin_width = 0.05,
                           double clip = 2.0);
WerHistogram wer_histogram(std::span<const SegmentScore> scores, double bin_width = 0.05,
                           double clip = 2.0);

}  // namespace parlalign
