#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "parlalign/error.hpp"

namespace parlalign {

// A contiguous span of block text sharing one bold flag.
struct TextRun {
  std::string text;
  bool bold = false;

  bool operator==(const TextRun&) const = default;
};

// Known member names, stored as case-folded punctuation-free tokens.
class NameRegistry {
 public:
  NameRegistry() = default;

  bool contains(std::string_view folded_token) const;
  std::size_t size() const noexcept { return names_.size(); }
  const std::unordered_set<std::string>& names() const noexcept { return names_; }

  void add_token(std::string_view raw_token);

 private:
  std::unordered_set<std::string> names_;
};

struct SpeakerTurn {
  std::string speaker;
  std::string transcript;

  bool operator==(const SpeakerTurn&) const = default;
};

struct ParseReport {
  std::size_t runs = 0;
  std::size_t annotations = 0;
  std::size_t discarded_header_runs = 0;
  std::size_t stripped_note_spans = 0;
};

struct StrippedText {
  std::string text;
  std::size_t removed_spans = 0;
};

// Heuristic thresholds for speaker annotations.
inline constexpr std::size_t kMinAnnotationNames = 1;
inline constexpr std::size_t kMaxAnnotationNames = 3;
inline constexpr std::size_t kMaxAnnotationWords = 15;

// Runs in document order. Bold comes from <b>/<strong>. Throws MarkupError
// on input that cannot be tokenized; unmatched bold tags are demoted to
// plain text and reported through `warnings`.
std::vector<TextRun> extract_runs(std::string_view xhtml, Warnings* warnings = nullptr);

// Throws ValidationError on an empty record list.
NameRegistry load_name_registry(
    std::span<const std::pair<std::string, std::string>> first_and_surnames);

// Count of registry hits among the run's tokens (after punctuation
// stripping and case folding).
std::size_t count_name_hits(std::string_view text, const NameRegistry& registry);

bool is_speaker_annotation(const TextRun& run, const NameRegistry& registry);

// Removes (...) and [...] transcriber notes. An opening bracket that is
// never closed swallows text up to and including the next period.
std::string strip_notes(std::string_view text);
StrippedText strip_notes_counted(std::string_view text);

// Throws ValidationError when no run qualifies as a speaker annotation.
std::vector<SpeakerTurn> split_turns(std::span<const TextRun> runs,
                                     const NameRegistry& registry,
                                     ParseReport* report = nullptr);

// extract_runs + split_turns.
std::vector<SpeakerTurn> parse_document(std::string_view xhtml, const NameRegistry& registry,
                                        ParseReport* report = nullptr,
                                        Warnings* warnings = nullptr);

}  // namespace parlalign
