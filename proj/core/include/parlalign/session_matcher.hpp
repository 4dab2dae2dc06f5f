#pragma once

#include <compare>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "parlalign/error.hpp"

namespace parlalign {

struct CalendarDate {
  int year = 0;
  unsigned month = 0;
  unsigned day = 0;

  // Throws ValidationError unless `iso` is a valid YYYY-MM-DD date.
  static CalendarDate parse(std::string_view iso);
  bool valid() const;
  std::string to_string() const;

  auto operator<=>(const CalendarDate&) const = default;
};

// One meeting day: a session number alone can span several days.
struct SessionKey {
  int session_number = 0;
  CalendarDate date;

  // "s0007_2015-03-10"
  std::string id() const;

  auto operator<=>(const SessionKey&) const = default;
};

enum class MediaKind { kRecording, kTranscript };

struct MediaEntry {
  MediaKind kind = MediaKind::kRecording;
  std::string path;
  SessionKey key;
  double duration_seconds = 0.0;
};

struct SessionPair {
  MediaEntry recording;
  MediaEntry transcript;
};

struct MatchResult {
  std::vector<SessionPair> pairs;
  std::vector<MediaEntry> unmatched_recordings;
  std::vector<MediaEntry> unmatched_transcripts;
  Warnings warnings;
};

// Pairs entries with equal (session number, date). A key that occurs more
// than once on either side is ambiguous: all its entries go to the
// unmatched lists and one warning is recorded. Outputs are sorted by key.
MatchResult match_sessions(std::span<const MediaEntry> recordings,
                           std::span<const MediaEntry> transcripts);

}  // namespace parlalign
