#pragma once

// File formats exchanged between pipeline stages. Every parser reports
// schema violations as ValidationError whose location names the source and
// the offending record.

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "parlalign/aligner.hpp"
#include "parlalign/document_parser.hpp"
#include "parlalign/error.hpp"
#include "parlalign/segmenter.hpp"
#include "parlalign/session_matcher.hpp"

namespace parlalign::formats {

namespace fs = std::filesystem;

// Throws MissingInputError if absent, ValidationError if not UTF-8.
std::string read_text_file(const fs::path& path);

// Writes via a sibling temp file and rename(), so readers never observe a
// partially written file at `path`.
void write_file_atomic(const fs::path& path, std::string_view content);

// Minimal RFC 4180 reader: quoted fields, doubled quotes, CRLF.
std::vector<std::vector<std::string>> parse_csv(std::string_view text, std::string_view source);
std::string csv_field(std::string_view field);

// Header `first_name,surname`.
NameRegistry parse_name_registry_csv(std::string_view text, std::string_view source);

// Listing-style turn array: objects with exactly `speaker` and `transcript`.
std::string turns_to_json(std::span<const SpeakerTurn> turns);
std::vector<SpeakerTurn> turns_from_json(std::string_view text, std::string_view source);
std::string parse_report_to_json(const ParseReport& report, std::span<const Warning> warnings);

// Header `kind,path,session_number,date,duration_seconds`.
std::vector<MediaEntry> parse_manifest_csv(std::string_view text, std::string_view source);
std::string media_entries_to_csv(std::span<const MediaEntry> entries);
std::string pairs_to_csv(std::span<const SessionPair> pairs);
std::string warnings_to_jsonl(std::span<const Warning> warnings);

// Array of {"word","start","end"}.
std::vector<RawTimedWord> parse_reference_json(std::string_view text, std::string_view source);
std::string reference_to_json(std::span<const RawTimedWord> words);

// Plain text, or a turn array when the content is a JSON array (the
// transcripts are joined in order).
std::string ground_truth_text(std::string_view content, std::string_view source);

std::string anchors_to_json(std::span<const Anchor> anchors);
std::vector<Anchor> anchors_from_json(std::string_view text, std::string_view source);

// One {"id","start","end","gt_from","gt_to","text"} object per line;
// dropped segments carry an extra "reason".
std::string segments_to_jsonl(std::span<const Segment> segments);
std::string dropped_to_jsonl(std::span<const DroppedSegment> dropped);
std::vector<Segment> segments_from_jsonl(std::string_view text, std::string_view source);
std::vector<DroppedSegment> dropped_from_jsonl(std::string_view text, std::string_view source);

// One {"segment_id","hypothesis","wer"} object per line.
std::string scores_to_jsonl(std::span<const SegmentScore> scores);
std::vector<SegmentScore> scores_from_jsonl(std::string_view text, std::string_view source);

// `audio_path,start,end,segment_id`, seconds with exactly 3 decimals.
std::string cut_manifest_to_csv(const CutManifest& manifest);

std::string stats_to_json(const CorpusStats& stats);

}  // namespace parlalign::formats
