#include "parlalign/document_parser.hpp"

#include <algorithm>
#include <array>

#include "parlalign/text_metrics.hpp"
#include "parlalign/unicode.hpp"
#include "xhtml.hpp"

namespace parlalign {

namespace {

using namespace std::string_view_literals;

constexpr std::array kBlockElements = {
    "html"sv, "body"sv, "p"sv, "div"sv, "h1"sv, "h2"sv, "h3"sv, "h4"sv, "h5"sv, "h6"sv,
    "li"sv, "ul"sv, "ol"sv, "dl"sv, "dt"sv, "dd"sv, "table"sv, "thead"sv, "tbody"sv, "tfoot"sv, "tr"sv, "td"sv,
    "th"sv, "caption"sv, "blockquote"sv, "pre"sv, "section"sv, "article"sv, "header"sv, "footer"sv, "hr"sv};
constexpr std::array kSkippedElements = {"head"sv, "title"sv, "script"sv, "style"sv};
constexpr std::array kBoldElements = {"b"sv, "strong"sv};

template <std::size_t N>
bool one_of(const std::array<std::string_view, N>& set, std::string_view name) {
  return std::find(set.begin(), set.end(), name) != set.end();
}

bool is_blank(std::string_view s) { return unicode::split_whitespace(s).empty(); }

// Accumulates the character data of one block element.
class BlockBuilder {
 public:
  BlockBuilder(std::vector<TextRun>& out, Warnings* warnings) : out_(out), warnings_(warnings) {}

  void text(std::string_view s) {
    if (s.empty()) return;
    fragments_.push_back({std::string(s), depth_});
  }

  void open_bold(std::size_t offset) {
    open_.push_back({fragments_.size(), offset});
    ++depth_;
  }

  void close_bold(std::size_t offset) {
    if (open_.empty()) {
      warn("unmatched_bold_close", "closing bold tag without opener at byte offset " +
                                       std::to_string(offset));
      return;
    }
    open_.pop_back();
    --depth_;
  }

  void flush() {
    // Openers never closed inside this block: everything after them is
    // demoted by one bold level.
    for (const auto& opener : open_) {
      warn("unclosed_bold", "bold tag opened at byte offset " + std::to_string(opener.offset) +
                                " is not closed within its block; treated as plain text");
      for (std::size_t k = opener.fragment; k < fragments_.size(); ++k) --fragments_[k].depth;
    }
    open_.clear();
    depth_ = 0;

    std::string pending;
    bool pending_bold = false;
    bool have_pending = false;
    auto emit = [&] {
      if (!have_pending) return;
      std::string collapsed = unicode::collapse_whitespace(pending);
      if (!collapsed.empty()) out_.push_back({std::move(collapsed), pending_bold});
      pending.clear();
      have_pending = false;
    };
    for (auto& f : fragments_) {
      const bool bold = f.depth > 0;
      // Whitespace-only fragments carry no boldness of their own.
      if (is_blank(f.text)) {
        pending += f.text;
        continue;
      }
      if (have_pending && bold != pending_bold) emit();
      if (!have_pending) {
        pending_bold = bold;
        have_pending = true;
      }
      pending += f.text;
    }
    emit();
    fragments_.clear();
  }

 private:
  struct Fragment {
    std::string text;
    int depth;
  };
  struct Opener {
    std::size_t fragment;
    std::size_t offset;
  };

  void warn(std::string code, std::string detail) {
    if (warnings_) warnings_->push_back({std::move(code), std::move(detail)});
  }

  std::vector<TextRun>& out_;
  Warnings* warnings_;
  std::vector<Fragment> fragments_;
  std::vector<Opener> open_;
  int depth_ = 0;
};

}  // namespace

std::vector<TextRun> extract_runs(std::string_view xhtml, Warnings* warnings) {
  std::vector<TextRun> runs;
  BlockBuilder block(runs, warnings);
  int skip_depth = 0;

  xhtml::tokenize(xhtml, [&](const xhtml::Token& tok) {
    switch (tok.kind) {
      case xhtml::TokenKind::kText:
        if (skip_depth == 0) block.text(tok.text);
        return;
      case xhtml::TokenKind::kEmptyTag:
        if (skip_depth > 0) return;
        if (tok.name == "br") {
          block.text(" ");
        } else if (one_of(kBlockElements, tok.name)) {
          block.flush();
        }
        return;
      case xhtml::TokenKind::kStartTag:
        if (one_of(kSkippedElements, tok.name)) {
          ++skip_depth;
          return;
        }
        if (skip_depth > 0) return;
        if (one_of(kBoldElements, tok.name)) {
          block.open_bold(tok.offset);
        } else if (tok.name == "br") {
          block.text(" ");
        } else if (one_of(kBlockElements, tok.name)) {
          block.flush();
        }
        return;
      case xhtml::TokenKind::kEndTag:
        if (one_of(kSkippedElements, tok.name)) {
          if (skip_depth > 0) --skip_depth;
          return;
        }
        if (skip_depth > 0) return;
        if (one_of(kBoldElements, tok.name)) {
          block.close_bold(tok.offset);
        } else if (one_of(kBlockElements, tok.name)) {
          block.flush();
        }
        return;
    }
  });
  block.flush();
  return runs;
}

bool NameRegistry::contains(std::string_view folded_token) const {
  return names_.find(std::string(folded_token)) != names_.end();
}

void NameRegistry::add_token(std::string_view raw_token) {
  std::string token = normalize_token(raw_token);
  if (!token.empty()) names_.insert(std::move(token));
}

NameRegistry load_name_registry(
    std::span<const std::pair<std::string, std::string>> first_and_surnames) {
  if (first_and_surnames.empty()) throw ValidationError("name registry has no records");
  NameRegistry registry;
  for (const auto& [first, surname] : first_and_surnames) {
    for (auto token : unicode::split_whitespace(first)) registry.add_token(token);
    for (auto token : unicode::split_whitespace(surname)) registry.add_token(token);
  }
  if (registry.size() == 0) throw ValidationError("name registry contains no usable names");
  return registry;
}

std::size_t count_name_hits(std::string_view text, const NameRegistry& registry) {
  std::size_t hits = 0;
  for (auto word : unicode::split_whitespace(text)) {
    const std::string token = normalize_token(word);
    if (!token.empty() && registry.contains(token)) ++hits;
  }
  return hits;
}

bool is_speaker_annotation(const TextRun& run, const NameRegistry& registry) {
  if (!run.bold) return false;
  if (unicode::split_whitespace(run.text).size() > kMaxAnnotationWords) return false;
  const std::size_t hits = count_name_hits(run.text, registry);
  return hits >= kMinAnnotationNames && hits <= kMaxAnnotationNames;
}

namespace {

struct Interval {
  std::size_t begin;
  std::size_t end;  // exclusive
};

// Matches `open`/`close` pairs innermost-first and returns the outermost
// matched intervals. Unmatched brackets are left alone.
std::vector<Interval> balanced_spans(std::string_view s, char open, char close) {
  std::vector<std::size_t> stack;
  std::vector<Interval> spans;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == open) {
      stack.push_back(i);
    } else if (s[i] == close && !stack.empty()) {
      const std::size_t begin = stack.back();
      stack.pop_back();
      // Drop inner spans swallowed by this one.
      while (!spans.empty() && spans.back().begin > begin) spans.pop_back();
      spans.push_back({begin, i + 1});
    }
  }
  return spans;
}

std::string remove_spans(std::string_view s, const std::vector<Interval>& spans) {
  std::string out;
  out.reserve(s.size());
  std::size_t at = 0;
  for (const auto& span : spans) {
    out.append(s.substr(at, span.begin - at));
    out.push_back(' ');
    at = span.end;
  }
  out.append(s.substr(at));
  return out;
}

}  // namespace

StrippedText strip_notes_counted(std::string_view text) {
  StrippedText result;
  std::string work(text);

  // Balanced spans; periods inside them do not matter.
  for (bool changed = true; changed;) {
    changed = false;
    for (auto [open, close] : {std::pair{'(', ')'}, std::pair{'[', ']'}}) {
      const auto spans = balanced_spans(work, open, close);
      if (spans.empty()) continue;
      result.removed_spans += spans.size();
      work = remove_spans(work, spans);
      changed = true;
    }
  }

  // Every remaining opener is unclosed: it runs to the next period.
  std::vector<Interval> unclosed;
  for (std::size_t i = 0; i < work.size();) {
    if (work[i] == '(' || work[i] == '[') {
      const std::size_t period = work.find('.', i + 1);
      const std::size_t end = period == std::string::npos ? work.size() : period + 1;
      unclosed.push_back({i, end});
      i = end;
    } else {
      ++i;
    }
  }
  result.removed_spans += unclosed.size();
  if (!unclosed.empty()) work = remove_spans(work, unclosed);

  result.text = unicode::collapse_whitespace(work);
  return result;
}

std::string strip_notes(std::string_view text) { return strip_notes_counted(text).text; }

std::vector<SpeakerTurn> split_turns(std::span<const TextRun> runs, const NameRegistry& registry,
                                     ParseReport* report) {
  ParseReport local;
  local.runs = runs.size();

  std::vector<SpeakerTurn> turns;
  std::vector<std::string> pending;
  auto close_turn = [&] {
    if (turns.empty()) return;
    std::string joined;
    for (const auto& piece : pending) {
      if (!joined.empty()) joined.push_back(' ');
      joined += piece;
    }
    auto stripped = strip_notes_counted(joined);
    local.stripped_note_spans += stripped.removed_spans;
    turns.back().transcript = std::move(stripped.text);
    pending.clear();
  };

  for (const auto& run : runs) {
    if (is_speaker_annotation(run, registry)) {
      close_turn();
      turns.push_back({run.text, {}});
      ++local.annotations;
    } else if (turns.empty()) {
      ++local.discarded_header_runs;
    } else {
      pending.push_back(run.text);
    }
  }
  close_turn();

  if (report) *report = local;
  if (turns.empty()) throw ValidationError("no speaker annotations found; not a verbatim transcript");
  return turns;
}

std::vector<SpeakerTurn> parse_document(std::string_view xhtml, const NameRegistry& registry,
                                        ParseReport* report, Warnings* warnings) {
  const auto runs = extract_runs(xhtml, warnings);
  return split_turns(runs, registry, report);
}

}  // namespace parlalign
