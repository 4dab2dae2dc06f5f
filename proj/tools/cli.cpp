#include "cli.hpp"

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "parlalign/formats.hpp"
#include "parlalign/pipeline.hpp"

namespace parlalign::cli {

namespace {

namespace fs = std::filesystem;
using pipeline::PipelineConfig;
using pipeline::StageReport;
using pipeline::Verbosity;

// Values that may come from --config and be overridden by flags.
struct Overrides {
  std::string config;
  unsigned jobs = 1;
  AlignParams align;
  SegmentParams segment;
  std::string verbosity = "normal";

  CLI::Option* jobs_opt = nullptr;
  CLI::Option* verbosity_opt = nullptr;
  CLI::Option* max_word_dist = nullptr;
  CLI::Option* window = nullptr;
  CLI::Option* context_radius = nullptr;
  CLI::Option* min_score = nullptr;
  CLI::Option* min_word_len = nullptr;
  CLI::Option* max_gap = nullptr;
  CLI::Option* wer_threshold = nullptr;
  CLI::Option* max_duration = nullptr;
  CLI::Option* bin_width = nullptr;
  CLI::Option* clip = nullptr;
};

void add_common(CLI::App* app, Overrides& o) {
  app->add_option("--config", o.config, "JSON pipeline config; flags override its values");
  o.jobs_opt = app->add_option("--jobs,-j", o.jobs, "Worker threads for independent sessions")
                   ->capture_default_str();
  o.verbosity_opt = app->add_option("--verbosity", o.verbosity, "quiet | normal | verbose")
                        ->check(CLI::IsMember({"quiet", "normal", "verbose"}))
                        ->capture_default_str();
}

void add_align_flags(CLI::App* app, Overrides& o) {
  o.max_word_dist = app->add_option("--max-word-dist", o.align.max_word_dist,
                                    "Largest Levenshtein distance for a candidate match")
                        ->capture_default_str();
  o.window = app->add_option("--window", o.align.window, "Forward search window in ground-truth words")
                 ->capture_default_str();
  o.context_radius = app->add_option("--context-radius", o.align.context_radius,
                                     "Neighbours compared on each side when scoring a candidate")
                         ->capture_default_str();
  o.min_score = app->add_option("--min-score", o.align.min_score, "Minimum context score for an anchor")
                    ->capture_default_str();
  o.min_word_len = app->add_option("--min-word-len", o.align.min_word_len,
                                   "Reference words shorter than this (code points) are skipped")
                       ->capture_default_str();
}

void add_segment_flags(CLI::App* app, Overrides& o, bool gap, bool select, bool hist) {
  if (gap)
    o.max_gap = app->add_option("--max-gap", o.segment.max_gap_s, "Anchor time gap that closes a segment (s)")
                    ->capture_default_str();
  if (select) {
    o.wer_threshold = app->add_option("--wer-threshold", o.segment.wer_threshold,
                                      "Keep segments with WER <= this value")
                          ->capture_default_str();
    o.max_duration = app->add_option("--max-duration", o.segment.max_duration_s,
                                     "Keep segments strictly shorter than this (s)")
                         ->capture_default_str();
  }
  if (hist) {
    o.bin_width = app->add_option("--bin-width", o.segment.bin_width, "WER histogram bin width")
                      ->capture_default_str();
    o.clip = app->add_option("--clip", o.segment.histogram_clip, "WER values >= clip go to the overflow bin")
                 ->capture_default_str();
  }
}

bool given(const CLI::Option* opt) { return opt != nullptr && opt->count() > 0; }

PipelineConfig resolve_config(const Overrides& o) {
  PipelineConfig cfg;
  if (!o.config.empty()) cfg = pipeline::load_config(o.config);
  if (given(o.jobs_opt)) cfg.jobs = o.jobs;
  if (given(o.verbosity_opt))
    cfg.verbosity = o.verbosity == "quiet" ? Verbosity::kQuiet
                    : o.verbosity == "verbose" ? Verbosity::kVerbose
                                               : Verbosity::kNormal;
  if (given(o.max_word_dist)) cfg.align.max_word_dist = o.align.max_word_dist;
  if (given(o.window)) cfg.align.window = o.align.window;
  if (given(o.context_radius)) cfg.align.context_radius = o.align.context_radius;
  if (given(o.min_score)) cfg.align.min_score = o.align.min_score;
  if (given(o.min_word_len)) cfg.align.min_word_len = o.align.min_word_len;
  if (given(o.max_gap)) cfg.segment.max_gap_s = o.segment.max_gap_s;
  if (given(o.wer_threshold)) cfg.segment.wer_threshold = o.segment.wer_threshold;
  if (given(o.max_duration)) cfg.segment.max_duration_s = o.segment.max_duration_s;
  if (given(o.bin_width)) cfg.segment.bin_width = o.segment.bin_width;
  if (given(o.clip)) cfg.segment.histogram_clip = o.segment.histogram_clip;
  cfg.validate();
  return cfg;
}

// Falls back to the config value when the flag was not given.
fs::path pick(const std::string& flag, const fs::path& from_config, const char* what) {
  if (!flag.empty()) return flag;
  if (!from_config.empty()) return from_config;
  throw ValidationError(std::string("no ") + what + " given (flag or config)");
}

void emit_report(const StageReport& report, const std::string& report_path, Verbosity v,
                 std::ostream& out) {
  const std::string text = report.to_json();
  if (!report_path.empty()) formats::write_file_atomic(report_path, text);
  if (v != Verbosity::kQuiet) out << text;
}

}  // namespace

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Long-form transcript alignment and ASR corpus segmentation toolkit", "parlalign"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "parlalign 0.1.0");

  std::string report_path;
  std::function<int()> action;

  // parse
  std::string parse_input, parse_registry, parse_output, parse_sidecar;
  auto* parse = app.add_subcommand("parse", "Split an XHTML transcript into speaker turns");
  Overrides o_parse;
  add_common(parse, o_parse);
  parse->add_option("--input,-i", parse_input, "XHTML transcript document")->required();
  parse->add_option("--registry", parse_registry, "Name registry CSV (first_name,surname)");
  parse->add_option("--output,-o", parse_output, "Turns JSON output")->required();
  parse->add_option("--sidecar", parse_sidecar, "Count report JSON (default: <output>.report.json)");
  parse->add_option("--report", report_path, "Write the run report here too");
  parse->callback([&] {
    action = [&] {
      const auto cfg = resolve_config(o_parse);
      const fs::path registry = pick(parse_registry, cfg.registry, "name registry");
      const fs::path sidecar = parse_sidecar.empty() ? fs::path(parse_output + ".report.json") : fs::path(parse_sidecar);
      emit_report(pipeline::run_parse(parse_input, registry, parse_output, sidecar), report_path,
                  cfg.verbosity, out);
      return pipeline::kExitOk;
    };
  });

  // match
  std::string match_manifest, match_out;
  auto* match = app.add_subcommand("match", "Pair recordings with transcripts by (session, date)");
  Overrides o_match;
  add_common(match, o_match);
  match->add_option("--manifest,-m", match_manifest, "Manifest CSV");
  match->add_option("--output-dir,-o", match_out, "Directory for pairs and unmatched lists");
  match->add_option("--report", report_path, "Write the run report here too");
  match->callback([&] {
    action = [&] {
      const auto cfg = resolve_config(o_match);
      emit_report(pipeline::run_match(pick(match_manifest, cfg.manifest, "manifest"),
                                      pick(match_out, cfg.output_dir, "output directory")),
                  report_path, cfg.verbosity, out);
      return pipeline::kExitOk;
    };
  });

  // align
  std::string align_ref, align_gt, align_out;
  auto* align_cmd = app.add_subcommand("align", "Anchor ground-truth words to reference timestamps");
  Overrides o_align;
  add_common(align_cmd, o_align);
  add_align_flags(align_cmd, o_align);
  align_cmd->add_option("--ref,-r", align_ref, "Reference transcript JSON with word timestamps")->required();
  align_cmd->add_option("--gt,-g", align_gt, "Ground truth: plain text or turns JSON")->required();
  align_cmd->add_option("--output,-o", align_out, "Anchors JSON output")->required();
  align_cmd->add_option("--report", report_path, "Write the run report here too");
  align_cmd->callback([&] {
    action = [&] {
      const auto cfg = resolve_config(o_align);
      emit_report(pipeline::run_align(align_ref, align_gt, align_out, cfg.align), report_path,
                  cfg.verbosity, out);
      return pipeline::kExitOk;
    };
  });

  // segment
  std::string seg_anchors, seg_gt, seg_out, seg_prefix = "seg";
  auto* segment = app.add_subcommand("segment", "Build candidate segments from anchors");
  Overrides o_segment;
  add_common(segment, o_segment);
  add_segment_flags(segment, o_segment, true, false, false);
  segment->add_option("--anchors,-a", seg_anchors, "Anchors JSON")->required();
  segment->add_option("--gt,-g", seg_gt, "Ground truth used for alignment")->required();
  segment->add_option("--output,-o", seg_out, "Segments JSONL output")->required();
  segment->add_option("--id-prefix", seg_prefix, "Segment id prefix")->capture_default_str();
  segment->add_option("--report", report_path, "Write the run report here too");
  segment->callback([&] {
    action = [&] {
      const auto cfg = resolve_config(o_segment);
      emit_report(pipeline::run_segment(seg_anchors, seg_gt, seg_out, cfg.segment.max_gap_s, seg_prefix),
                  report_path, cfg.verbosity, out);
      return pipeline::kExitOk;
    };
  });

  // score
  std::string score_segments, score_ref, score_out;
  auto* score = app.add_subcommand("score", "Score segments against reference time slices");
  Overrides o_score;
  add_common(score, o_score);
  score->add_option("--segments,-s", score_segments, "Segments JSONL")->required();
  score->add_option("--ref,-r", score_ref, "Reference transcript JSON")->required();
  score->add_option("--output,-o", score_out, "Scores JSONL output")->required();
  score->add_option("--report", report_path, "Write the run report here too");
  score->callback([&] {
    action = [&] {
      const auto cfg = resolve_config(o_score);
      emit_report(pipeline::run_score(score_segments, score_ref, score_out), report_path, cfg.verbosity, out);
      return pipeline::kExitOk;
    };
  });

  // select
  std::string sel_segments, sel_scores, sel_out, sel_audio;
  auto* select_cmd = app.add_subcommand("select", "Filter segments by duration and WER");
  Overrides o_select;
  add_common(select_cmd, o_select);
  add_segment_flags(select_cmd, o_select, false, true, false);
  select_cmd->add_option("--segments,-s", sel_segments, "Segments JSONL")->required();
  select_cmd->add_option("--scores", sel_scores, "Scores JSONL")->required();
  select_cmd->add_option("--output-dir,-o", sel_out, "Directory for kept/dropped/stats");
  select_cmd->add_option("--audio", sel_audio, "Audio path; also writes cuts.csv for kept segments");
  select_cmd->add_option("--report", report_path, "Write the run report here too");
  select_cmd->callback([&] {
    action = [&] {
      const auto cfg = resolve_config(o_select);
      std::optional<std::string> audio;
      if (!sel_audio.empty()) audio = sel_audio;
      emit_report(pipeline::run_select(sel_segments, sel_scores,
                                       pick(sel_out, cfg.output_dir, "output directory"), cfg.segment, audio),
                  report_path, cfg.verbosity, out);
      return pipeline::kExitOk;
    };
  });

  // stats
  std::string stats_kept, stats_dropped, stats_scores, stats_out;
  auto* stats = app.add_subcommand("stats", "Corpus statistics and WER histogram");
  Overrides o_stats;
  add_common(stats, o_stats);
  add_segment_flags(stats, o_stats, false, false, true);
  stats->add_option("--kept", stats_kept, "Kept segments JSONL")->required();
  stats->add_option("--dropped", stats_dropped, "Dropped segments JSONL")->required();
  stats->add_option("--scores", stats_scores, "Scores JSONL for the histogram");
  stats->add_option("--output-dir,-o", stats_out, "Directory for stats and histogram");
  stats->add_option("--report", report_path, "Write the run report here too");
  stats->callback([&] {
    action = [&] {
      const auto cfg = resolve_config(o_stats);
      std::optional<fs::path> scores;
      if (!stats_scores.empty()) scores = stats_scores;
      emit_report(pipeline::run_stats(stats_kept, stats_dropped, scores,
                                      pick(stats_out, cfg.output_dir, "output directory"), cfg.segment),
                  report_path, cfg.verbosity, out);
      return pipeline::kExitOk;
    };
  });

  // run-all
  std::string all_out;
  auto* all = app.add_subcommand("run-all", "Match, parse, align, segment, score and select every session");
  Overrides o_all;
  add_common(all, o_all);
  add_align_flags(all, o_all);
  add_segment_flags(all, o_all, true, true, true);
  all->add_option("--output-dir,-o", all_out, "Overrides output_dir from the config");
  all->add_option("--report", report_path, "Write the run report here too");
  all->callback([&] {
    action = [&] {
      if (o_all.config.empty()) throw ValidationError("run-all requires --config");
      auto cfg = resolve_config(o_all);
      if (!all_out.empty()) cfg.output_dir = all_out;
      auto result = pipeline::run_all(cfg);
      emit_report(result.report, report_path, cfg.verbosity, out);
      const auto failed = result.report.counts["sessions_failed"];
      if (failed > 0 && result.exit_code == pipeline::kExitOk)
        err << "warning: " << failed << " session(s) quarantined; see report.json\n";
      return result.exit_code;
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return pipeline::kExitValidation;
  }

  try {
    return action ? action() : pipeline::kExitInternal;
  } catch (const std::exception& e) {
    const int code = pipeline::exit_code_for_current_exception();
    err << "error: " << e.what() << '\n';
    return code;
  }
}

}  // namespace parlalign::cli
