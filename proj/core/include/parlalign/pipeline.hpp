#pragma once

// Stage orchestration shared by the command-line tool and the tests. Each
// stage reads files, writes its outputs atomically and returns a report.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "parlalign/aligner.hpp"
#include "parlalign/error.hpp"
#include "parlalign/segmenter.hpp"

namespace parlalign::pipeline {

namespace fs = std::filesystem;

enum class Verbosity { kQuiet, kNormal, kVerbose };

struct PipelineConfig {
  fs::path registry;
  fs::path manifest;
  fs::path reference_dir;
  fs::path scores_dir;
  fs::path output_dir;
  AlignParams align;
  SegmentParams segment;
  unsigned jobs = 1;
  Verbosity verbosity = Verbosity::kNormal;

  void validate() const;
};

// JSON object; unknown keys anywhere are rejected with ValidationError.
// Relative paths are resolved against `base_dir`.
PipelineConfig parse_config(std::string_view json_text, std::string_view source,
                             const fs::path& base_dir = {});
PipelineConfig load_config(const fs::path& path);

struct StageReport {
  std::string stage;
  std::map<std::string, std::int64_t> counts;
  std::map<std::string, double> metrics;
  Warnings warnings;
  // Wall-clock fields live apart from the data so the data stays reproducible.
  double wall_seconds = 0.0;

  std::string to_json() const;
};

// Exit statuses of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitMissingInput = 3;
inline constexpr int kExitInternal = 4;

// Maps the active exception (call inside a catch block) to an exit status.
int exit_code_for_current_exception();

StageReport run_parse(const fs::path& xhtml, const fs::path& registry, const fs::path& output,
                      const fs::path& sidecar);

StageReport run_match(const fs::path& manifest, const fs::path& output_dir);

StageReport run_align(const fs::path& reference, const fs::path& ground_truth,
                      const fs::path& output, const AlignParams& params);

StageReport run_segment(const fs::path& anchors, const fs::path& ground_truth,
                        const fs::path& output, double max_gap_s, const std::string& id_prefix);

// Scores segments against reference time slices.
StageReport run_score(const fs::path& segments, const fs::path& reference, const fs::path& output);

// Writes kept.jsonl, dropped.jsonl and stats.json into `output_dir`, plus
// cuts.csv when `audio_path` is set.
StageReport run_select(const fs::path& segments, const fs::path& scores, const fs::path& output_dir,
                       const SegmentParams& params, const std::optional<std::string>& audio_path);

// Writes stats.json, histogram.csv and histogram.txt into `output_dir`.
StageReport run_stats(const fs::path& kept, const fs::path& dropped,
                      const std::optional<fs::path>& scores, const fs::path& output_dir,
                      const SegmentParams& params);

struct SessionSummary {
  std::string id;
  bool ok = false;
  int exit_code = kExitOk;
  std::string error;
  std::size_t gt_words = 0;
  std::size_t ref_words = 0;
  std::size_t anchors = 0;
  std::size_t segments = 0;
  std::size_t kept = 0;
  Warnings warnings;
};

struct RunAllResult {
  int exit_code = kExitOk;
  std::vector<SessionSummary> sessions;
  StageReport report;
};

// Matches the manifest, then processes every paired session independently
// on `config.jobs` workers. A failing session is quarantined; the others
// still contribute to the merged corpus in `config.output_dir`.
RunAllResult run_all(const PipelineConfig& config);

}  // namespace parlalign::pipeline
