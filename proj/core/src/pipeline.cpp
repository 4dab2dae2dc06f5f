#include "parlalign/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <iostream>
#include <mutex>
#include <thread>

#include "json.hpp"
#include "parlalign/document_parser.hpp"
#include "parlalign/formats.hpp"
#include "parlalign/session_matcher.hpp"

namespace parlalign::pipeline {

using json = nlohmann::ordered_json;

namespace {

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

fs::path resolve(const fs::path& p, const fs::path& base) {
  if (p.empty() || p.is_absolute() || base.empty()) return p;
  return base / p;
}

void append(Warnings& into, const Warnings& from) { into.insert(into.end(), from.begin(), from.end()); }

std::string lower_extension(const fs::path& p) {
  std::string ext = p.extension().string();
  for (char& c : ext)
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c + 32);
  return ext;
}

bool is_markup(const fs::path& p) {
  const std::string ext = lower_extension(p);
  return ext == ".xhtml" || ext == ".html" || ext == ".htm" || ext == ".xml";
}

std::vector<GtWord> load_ground_truth(const fs::path& path) {
  const std::string content = formats::read_text_file(path);
  return make_gt_words(formats::ground_truth_text(content, path.string()));
}

std::vector<TimedWord> load_reference(const fs::path& path) {
  const auto raw = formats::parse_reference_json(formats::read_text_file(path), path.string());
  return make_ref_words(raw);
}

}  // namespace

void PipelineConfig::validate() const {
  align.validate();
  segment.validate();
  if (jobs < 1) throw ValidationError("jobs must be >= 1");
}

PipelineConfig parse_config(std::string_view json_text, std::string_view source,
                            const fs::path& base_dir) {
  json j;
  try {
    j = json::parse(json_text.begin(), json_text.end());
  } catch (const json::parse_error& e) {
    throw ValidationError(e.what(), std::string(source) + ": byte " + std::to_string(e.byte));
  }
  if (!j.is_object()) throw ValidationError("config must be a JSON object", std::string(source));

  PipelineConfig cfg;
  auto where = [&](const std::string& key) { return std::string(source) + ": key '" + key + "'"; };
  auto as_path = [&](const json& v, const std::string& key) {
    if (!v.is_string()) throw ValidationError("expected a string path", where(key));
    return resolve(fs::path(v.get<std::string>()), base_dir);
  };
  auto as_count = [&](const json& v, const std::string& key) -> std::size_t {
    if (!v.is_number_integer() || v.get<long long>() < 0)
      throw ValidationError("expected a non-negative integer", where(key));
    return v.get<std::size_t>();
  };
  auto as_real = [&](const json& v, const std::string& key) {
    if (!v.is_number()) throw ValidationError("expected a number", where(key));
    return v.get<double>();
  };

  for (const auto& [key, value] : j.items()) {
    if (key == "registry") {
      cfg.registry = as_path(value, key);
    } else if (key == "manifest") {
      cfg.manifest = as_path(value, key);
    } else if (key == "reference_dir") {
      cfg.reference_dir = as_path(value, key);
    } else if (key == "scores_dir") {
      cfg.scores_dir = as_path(value, key);
    } else if (key == "output_dir") {
      cfg.output_dir = as_path(value, key);
    } else if (key == "jobs") {
      cfg.jobs = static_cast<unsigned>(as_count(value, key));
    } else if (key == "verbosity") {
      const std::string v = value.is_string() ? value.get<std::string>() : "";
      if (v == "quiet") {
        cfg.verbosity = Verbosity::kQuiet;
      } else if (v == "normal") {
        cfg.verbosity = Verbosity::kNormal;
      } else if (v == "verbose") {
        cfg.verbosity = Verbosity::kVerbose;
      } else {
        throw ValidationError("expected quiet, normal or verbose", where(key));
      }
    } else if (key == "align") {
      if (!value.is_object()) throw ValidationError("expected an object", where(key));
      for (const auto& [k, v] : value.items()) {
        const std::string full = "align." + k;
        if (k == "max_word_dist") {
          cfg.align.max_word_dist = as_count(v, full);
        } else if (k == "window") {
          cfg.align.window = as_count(v, full);
        } else if (k == "context_radius") {
          cfg.align.context_radius = as_count(v, full);
        } else if (k == "min_score") {
          cfg.align.min_score = static_cast<int>(as_count(v, full));
        } else if (k == "min_word_len") {
          cfg.align.min_word_len = as_count(v, full);
        } else {
          throw ValidationError("unknown config key", where(full));
        }
      }
    } else if (key == "segment") {
      if (!value.is_object()) throw ValidationError("expected an object", where(key));
      for (const auto& [k, v] : value.items()) {
        const std::string full = "segment." + k;
        if (k == "max_gap_s") {
          cfg.segment.max_gap_s = as_real(v, full);
        } else if (k == "wer_threshold") {
          cfg.segment.wer_threshold = as_real(v, full);
        } else if (k == "max_duration_s") {
          cfg.segment.max_duration_s = as_real(v, full);
        } else if (k == "bin_width") {
          cfg.segment.bin_width = as_real(v, full);
        } else if (k == "histogram_clip") {
          cfg.segment.histogram_clip = as_real(v, full);
        } else {
          throw ValidationError("unknown config key", where(full));
        }
      }
    } else {
      throw ValidationError("unknown config key", where(key));
    }
  }
  try {
    cfg.validate();
  } catch (const ValidationError& e) {
    throw ValidationError(e.what(), std::string(source));
  }
  return cfg;
}

PipelineConfig load_config(const fs::path& path) {
  return parse_config(formats::read_text_file(path), path.string(), path.parent_path());
}

std::string StageReport::to_json() const {
  json j;
  j["stage"] = stage;
  json c = json::object();
  for (const auto& [k, v] : counts) c[k] = v;
  j["counts"] = std::move(c);
  json m = json::object();
  for (const auto& [k, v] : metrics) m[k] = v;
  j["metrics"] = std::move(m);
  json w = json::array();
  for (const auto& warning : warnings) w.push_back({{"code", warning.code}, {"detail", warning.detail}});
  j["warnings"] = std::move(w);
  j["timing"] = {{"wall_seconds", wall_seconds}};
  return j.dump(2) + "\n";
}

int exit_code_for_current_exception() {
  try {
    throw;
  } catch (const ValidationError&) {
    return kExitValidation;
  } catch (const MissingInputError&) {
    return kExitMissingInput;
  } catch (...) {
    return kExitInternal;
  }
}

StageReport run_parse(const fs::path& xhtml, const fs::path& registry_path, const fs::path& output,
                      const fs::path& sidecar) {
  Stopwatch clock;
  StageReport report;
  report.stage = "parse";
  const std::string doc = formats::read_text_file(xhtml);
  const NameRegistry registry =
      formats::parse_name_registry_csv(formats::read_text_file(registry_path), registry_path.string());

  ParseReport counts;
  std::vector<SpeakerTurn> turns;
  try {
    turns = parse_document(doc, registry, &counts, &report.warnings);
  } catch (const ValidationError& e) {
    throw ValidationError(e.what(), xhtml.string() + (e.location().empty() ? "" : ": " + e.location()));
  }
  formats::write_file_atomic(output, formats::turns_to_json(turns));
  formats::write_file_atomic(sidecar, formats::parse_report_to_json(counts, report.warnings));

  report.counts["runs"] = static_cast<std::int64_t>(counts.runs);
  report.counts["annotations"] = static_cast<std::int64_t>(counts.annotations);
  report.counts["discarded_header_runs"] = static_cast<std::int64_t>(counts.discarded_header_runs);
  report.counts["stripped_note_spans"] = static_cast<std::int64_t>(counts.stripped_note_spans);
  report.counts["turns"] = static_cast<std::int64_t>(turns.size());
  report.wall_seconds = clock.seconds();
  return report;
}

StageReport run_match(const fs::path& manifest, const fs::path& output_dir) {
  Stopwatch clock;
  StageReport report;
  report.stage = "match";
  const auto entries = formats::parse_manifest_csv(formats::read_text_file(manifest), manifest.string());
  std::vector<MediaEntry> recordings, transcripts;
  for (const auto& e : entries) (e.kind == MediaKind::kRecording ? recordings : transcripts).push_back(e);

  const MatchResult m = match_sessions(recordings, transcripts);
  formats::write_file_atomic(output_dir / "pairs.csv", formats::pairs_to_csv(m.pairs));
  formats::write_file_atomic(output_dir / "unmatched_recordings.csv",
                             formats::media_entries_to_csv(m.unmatched_recordings));
  formats::write_file_atomic(output_dir / "unmatched_transcripts.csv",
                             formats::media_entries_to_csv(m.unmatched_transcripts));
  formats::write_file_atomic(output_dir / "warnings.jsonl", formats::warnings_to_jsonl(m.warnings));

  double hours = 0;
  for (const auto& p : m.pairs) hours += p.recording.duration_seconds / 3600.0;
  report.counts["recordings"] = static_cast<std::int64_t>(recordings.size());
  report.counts["transcripts"] = static_cast<std::int64_t>(transcripts.size());
  report.counts["pairs"] = static_cast<std::int64_t>(m.pairs.size());
  report.counts["unmatched_recordings"] = static_cast<std::int64_t>(m.unmatched_recordings.size());
  report.counts["unmatched_transcripts"] = static_cast<std::int64_t>(m.unmatched_transcripts.size());
  report.metrics["matched_hours"] = hours;
  report.warnings = m.warnings;
  report.wall_seconds = clock.seconds();
  return report;
}

StageReport run_align(const fs::path& reference, const fs::path& ground_truth,
                      const fs::path& output, const AlignParams& params) {
  Stopwatch clock;
  StageReport report;
  report.stage = "align";
  params.validate();
  const auto gt = load_ground_truth(ground_truth);
  const auto ref = load_reference(reference);
  const auto anchors = align(gt, ref, params);
  formats::write_file_atomic(output, formats::anchors_to_json(anchors));
  report.counts["gt_words"] = static_cast<std::int64_t>(gt.size());
  report.counts["ref_words"] = static_cast<std::int64_t>(ref.size());
  report.counts["anchors"] = static_cast<std::int64_t>(anchors.size());
  if (anchors.empty()) report.warnings.push_back({"no_anchors", "alignment produced no anchors"});
  report.wall_seconds = clock.seconds();
  return report;
}

StageReport run_segment(const fs::path& anchors_path, const fs::path& ground_truth,
                        const fs::path& output, double max_gap_s, const std::string& id_prefix) {
  Stopwatch clock;
  StageReport report;
  report.stage = "segment";
  if (!(max_gap_s > 0)) throw ValidationError("max_gap_s must be > 0");
  const auto anchors = formats::anchors_from_json(formats::read_text_file(anchors_path), anchors_path.string());
  const auto gt = load_ground_truth(ground_truth);
  for (std::size_t i = 0; i < anchors.size(); ++i) {
    if (anchors[i].gt_index >= gt.size())
      throw ValidationError("gt_index beyond ground truth length",
                            anchors_path.string() + ": record " + std::to_string(i));
  }
  const auto segments = build_segments(anchors, gt, max_gap_s, id_prefix, &report.warnings);
  formats::write_file_atomic(output, formats::segments_to_jsonl(segments));
  double seconds = 0;
  for (const auto& s : segments) seconds += s.duration_s();
  report.counts["anchors"] = static_cast<std::int64_t>(anchors.size());
  report.counts["segments"] = static_cast<std::int64_t>(segments.size());
  report.metrics["hours"] = round_hours(seconds);
  report.wall_seconds = clock.seconds();
  return report;
}

StageReport run_score(const fs::path& segments_path, const fs::path& reference, const fs::path& output) {
  Stopwatch clock;
  StageReport report;
  report.stage = "score";
  const auto segments =
      formats::segments_from_jsonl(formats::read_text_file(segments_path), segments_path.string());
  const auto ref = load_reference(reference);
  const auto scores = score_against_reference(segments, ref);
  formats::write_file_atomic(output, formats::scores_to_jsonl(scores));
  report.counts["segments"] = static_cast<std::int64_t>(segments.size());
  report.counts["scores"] = static_cast<std::int64_t>(scores.size());
  report.wall_seconds = clock.seconds();
  return report;
}

namespace {

void fill_stats(StageReport& report, const CorpusStats& stats) {
  report.counts["input_segments"] = static_cast<std::int64_t>(stats.input_segments);
  report.counts["kept_segments"] = static_cast<std::int64_t>(stats.kept_segments);
  report.counts["dropped_segments"] = static_cast<std::int64_t>(stats.dropped_segments);
  for (const auto& [k, v] : stats.drop_reasons) report.counts["dropped_" + k] = static_cast<std::int64_t>(v);
  report.metrics["input_hours"] = stats.input_hours();
  report.metrics["kept_hours"] = stats.kept_hours();
  report.metrics["dropped_hours"] = stats.dropped_hours();
}

}  // namespace

StageReport run_select(const fs::path& segments_path, const fs::path& scores_path,
                       const fs::path& output_dir, const SegmentParams& params,
                       const std::optional<std::string>& audio_path) {
  Stopwatch clock;
  StageReport report;
  report.stage = "select";
  params.validate();
  const auto segments =
      formats::segments_from_jsonl(formats::read_text_file(segments_path), segments_path.string());
  const auto scores = formats::scores_from_jsonl(formats::read_text_file(scores_path), scores_path.string());
  Selection sel;
  try {
    sel = select(segments, scores, params.wer_threshold, params.max_duration_s);
  } catch (const ValidationError& e) {
    throw ValidationError(e.what(), scores_path.string());
  }
  const CorpusStats stats = corpus_stats(sel.kept, sel.dropped);

  formats::write_file_atomic(output_dir / "kept.jsonl", formats::segments_to_jsonl(sel.kept));
  formats::write_file_atomic(output_dir / "dropped.jsonl", formats::dropped_to_jsonl(sel.dropped));
  formats::write_file_atomic(output_dir / "stats.json", formats::stats_to_json(stats));
  if (audio_path) {
    formats::write_file_atomic(output_dir / "cuts.csv",
                               formats::cut_manifest_to_csv(emit_cut_manifest(sel.kept, *audio_path)));
  }
  fill_stats(report, stats);
  report.warnings = sel.warnings;
  report.wall_seconds = clock.seconds();
  return report;
}

StageReport run_stats(const fs::path& kept_path, const fs::path& dropped_path,
                      const std::optional<fs::path>& scores_path, const fs::path& output_dir,
                      const SegmentParams& params) {
  Stopwatch clock;
  StageReport report;
  report.stage = "stats";
  params.validate();
  const auto kept = formats::segments_from_jsonl(formats::read_text_file(kept_path), kept_path.string());
  const auto dropped =
      formats::dropped_from_jsonl(formats::read_text_file(dropped_path), dropped_path.string());
  const CorpusStats stats = corpus_stats(kept, dropped);
  formats::write_file_atomic(output_dir / "stats.json", formats::stats_to_json(stats));
  if (scores_path) {
    const auto scores = formats::scores_from_jsonl(formats::read_text_file(*scores_path), scores_path->string());
    const auto hist = wer_histogram(scores, params.bin_width, params.histogram_clip);
    formats::write_file_atomic(output_dir / "histogram.csv", hist.to_csv());
    formats::write_file_atomic(output_dir / "histogram.txt", hist.to_text_chart());
    report.counts["histogram_total"] = static_cast<std::int64_t>(hist.total());
  }
  fill_stats(report, stats);
  report.wall_seconds = clock.seconds();
  return report;
}

namespace {

struct SessionOutput {
  SessionSummary summary;
  std::vector<Segment> kept;
  std::vector<DroppedSegment> dropped;
  std::vector<SegmentScore> scores;
  CutManifest cuts;
};

SessionOutput process_session(const SessionPair& pair, const PipelineConfig& cfg,
                              const fs::path& base_dir,
                              const std::optional<NameRegistry>& registry) {
  SessionOutput out;
  SessionSummary& s = out.summary;
  s.id = pair.recording.key.id();
  const fs::path session_dir = cfg.output_dir / "sessions" / s.id;

  // Ground truth.
  const fs::path transcript = resolve(pair.transcript.path, base_dir);
  std::string gt_text;
  if (is_markup(transcript)) {
    if (!registry) throw ValidationError("a name registry is required to parse " + transcript.string());
    ParseReport counts;
    Warnings parse_warnings;
    const std::string doc = formats::read_text_file(transcript);
    std::vector<SpeakerTurn> turns;
    try {
      turns = parse_document(doc, *registry, &counts, &parse_warnings);
    } catch (const ValidationError& e) {
      throw ValidationError(e.what(), transcript.string() + (e.location().empty() ? "" : ": " + e.location()));
    }
    formats::write_file_atomic(session_dir / "turns.json", formats::turns_to_json(turns));
    append(s.warnings, parse_warnings);
    gt_text = formats::ground_truth_text(formats::turns_to_json(turns), transcript.string());
  } else {
    gt_text = formats::ground_truth_text(formats::read_text_file(transcript), transcript.string());
  }
  const auto gt = make_gt_words(gt_text);
  s.gt_words = gt.size();

  // Reference transcript: <reference_dir>/<recording stem>.json
  const fs::path recording = resolve(pair.recording.path, base_dir);
  const fs::path ref_path = cfg.reference_dir / (recording.stem().string() + ".json");
  const auto ref = load_reference(ref_path);
  s.ref_words = ref.size();

  const auto anchors = align(gt, ref, cfg.align);
  s.anchors = anchors.size();
  formats::write_file_atomic(session_dir / "anchors.json", formats::anchors_to_json(anchors));

  const auto segments = build_segments(anchors, gt, cfg.segment.max_gap_s, s.id, &s.warnings);
  s.segments = segments.size();
  formats::write_file_atomic(session_dir / "segments.jsonl", formats::segments_to_jsonl(segments));

  const fs::path external_scores = cfg.scores_dir.empty() ? fs::path{} : cfg.scores_dir / (s.id + ".jsonl");
  if (!external_scores.empty() && fs::exists(external_scores)) {
    out.scores = formats::scores_from_jsonl(formats::read_text_file(external_scores), external_scores.string());
  } else {
    out.scores = score_against_reference(segments, ref);
  }
  formats::write_file_atomic(session_dir / "scores.jsonl", formats::scores_to_jsonl(out.scores));

  Selection sel = select(segments, out.scores, cfg.segment.wer_threshold, cfg.segment.max_duration_s);
  append(s.warnings, sel.warnings);
  out.cuts = emit_cut_manifest(sel.kept, pair.recording.path);
  out.kept = std::move(sel.kept);
  out.dropped = std::move(sel.dropped);
  s.kept = out.kept.size();
  s.ok = true;
  return out;
}

}  // namespace

RunAllResult run_all(const PipelineConfig& cfg) {
  Stopwatch clock;
  RunAllResult result;
  result.report.stage = "run-all";
  cfg.validate();
  if (cfg.manifest.empty()) throw ValidationError("config does not name a manifest");
  if (cfg.output_dir.empty()) throw ValidationError("config does not name an output_dir");

  const auto entries =
      formats::parse_manifest_csv(formats::read_text_file(cfg.manifest), cfg.manifest.string());
  const fs::path base_dir = cfg.manifest.parent_path();
  std::vector<MediaEntry> recordings, transcripts;
  for (const auto& e : entries) (e.kind == MediaKind::kRecording ? recordings : transcripts).push_back(e);
  const MatchResult match = match_sessions(recordings, transcripts);
  append(result.report.warnings, match.warnings);
  formats::write_file_atomic(cfg.output_dir / "pairs.csv", formats::pairs_to_csv(match.pairs));
  if (match.pairs.empty()) throw MissingInputError(cfg.manifest.string() + " (no matched sessions)");

  std::optional<NameRegistry> registry;
  if (!cfg.registry.empty())
    registry = formats::parse_name_registry_csv(formats::read_text_file(cfg.registry), cfg.registry.string());

  std::vector<SessionOutput> outputs(match.pairs.size());
  std::atomic<std::size_t> next{0};
  std::mutex log_mutex;
  auto worker = [&] {
    for (std::size_t k = next++; k < match.pairs.size(); k = next++) {
      try {
        outputs[k] = process_session(match.pairs[k], cfg, base_dir, registry);
      } catch (const std::exception& e) {
        const int code = exit_code_for_current_exception();
        outputs[k] = SessionOutput{};
        outputs[k].summary.id = match.pairs[k].recording.key.id();
        outputs[k].summary.ok = false;
        outputs[k].summary.exit_code = code;
        outputs[k].summary.error = e.what();
      }
      if (cfg.verbosity == Verbosity::kVerbose) {
        std::lock_guard lock(log_mutex);
        const auto& s = outputs[k].summary;
        std::cerr << "[run-all] " << s.id << (s.ok ? " ok" : " quarantined: " + s.error) << '\n';
      }
    }
  };
  const unsigned workers = std::max(1u, std::min<unsigned>(cfg.jobs, static_cast<unsigned>(match.pairs.size())));
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  // Merge in key order; every merged file is a pure function of the inputs.
  std::vector<Segment> kept;
  std::vector<DroppedSegment> dropped;
  std::vector<SegmentScore> scores;
  CutManifest cuts;
  CorpusStatsAccumulator acc;
  std::size_t failed = 0;
  int first_failure = kExitOk;
  for (auto& o : outputs) {
    if (!o.summary.ok) {
      ++failed;
      if (first_failure == kExitOk) first_failure = o.summary.exit_code;
      result.report.warnings.push_back({"session_quarantined", o.summary.id + ": " + o.summary.error});
    }
    for (const auto& w : o.summary.warnings) result.report.warnings.push_back({w.code, o.summary.id + ": " + w.detail});
    for (auto& seg : o.kept) acc.add_kept(seg.duration_s());
    for (auto& d : o.dropped) acc.add_dropped(d.segment.duration_s(), d.reason);
    std::move(o.kept.begin(), o.kept.end(), std::back_inserter(kept));
    std::move(o.dropped.begin(), o.dropped.end(), std::back_inserter(dropped));
    std::move(o.scores.begin(), o.scores.end(), std::back_inserter(scores));
    std::move(o.cuts.rows.begin(), o.cuts.rows.end(), std::back_inserter(cuts.rows));
    result.sessions.push_back(std::move(o.summary));
  }

  const CorpusStats stats = acc.finish();
  const auto hist = wer_histogram(scores, cfg.segment.bin_width, cfg.segment.histogram_clip);
  formats::write_file_atomic(cfg.output_dir / "kept.jsonl", formats::segments_to_jsonl(kept));
  formats::write_file_atomic(cfg.output_dir / "dropped.jsonl", formats::dropped_to_jsonl(dropped));
  formats::write_file_atomic(cfg.output_dir / "scores.jsonl", formats::scores_to_jsonl(scores));
  formats::write_file_atomic(cfg.output_dir / "cuts.csv", formats::cut_manifest_to_csv(cuts));
  formats::write_file_atomic(cfg.output_dir / "stats.json", formats::stats_to_json(stats));
  formats::write_file_atomic(cfg.output_dir / "histogram.csv", hist.to_csv());
  formats::write_file_atomic(cfg.output_dir / "histogram.txt", hist.to_text_chart());

  StageReport& report = result.report;
  fill_stats(report, stats);
  report.counts["sessions"] = static_cast<std::int64_t>(outputs.size());
  report.counts["sessions_failed"] = static_cast<std::int64_t>(failed);
  report.counts["unmatched_recordings"] = static_cast<std::int64_t>(match.unmatched_recordings.size());
  report.counts["unmatched_transcripts"] = static_cast<std::int64_t>(match.unmatched_transcripts.size());
  report.wall_seconds = clock.seconds();

  json sessions = json::array();
  for (const auto& s : result.sessions) {
    json js;
    js["id"] = s.id;
    js["status"] = s.ok ? "ok" : "quarantined";
    if (!s.ok) {
      js["exit_code"] = s.exit_code;
      js["error"] = s.error;
    }
    js["gt_words"] = s.gt_words;
    js["ref_words"] = s.ref_words;
    js["anchors"] = s.anchors;
    js["segments"] = s.segments;
    js["kept"] = s.kept;
    sessions.push_back(std::move(js));
  }
  json full = json::parse(report.to_json());
  full["sessions"] = std::move(sessions);
  formats::write_file_atomic(cfg.output_dir / "report.json", full.dump(2) + "\n");

  if (failed == outputs.size()) result.exit_code = first_failure == kExitOk ? kExitInternal : first_failure;
  return result;
}

}  // namespace parlalign::pipeline
