#include "parlalign/formats.hpp"

#include <unistd.h>

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "parlalign/unicode.hpp"

namespace parlalign::formats {

using json = nlohmann::ordered_json;

namespace {

std::string at_record(std::string_view source, std::string_view unit, std::size_t n) {
  return std::string(source) + ": " + std::string(unit) + " " + std::to_string(n);
}

json parse_json(std::string_view text, std::string_view source) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ValidationError(e.what(), std::string(source) + ": byte " + std::to_string(e.byte));
  }
}

template <typename T>
T get_field(const json& obj, const char* key, const std::string& where) {
  const auto it = obj.find(key);
  if (it == obj.end()) throw ValidationError(std::string("missing key '") + key + "'", where);
  try {
    return it->template get<T>();
  } catch (const json::exception&) {
    throw ValidationError(std::string("wrong type for key '") + key + "'", where);
  }
}

double get_number(const json& obj, const char* key, const std::string& where) {
  const auto it = obj.find(key);
  if (it == obj.end()) throw ValidationError(std::string("missing key '") + key + "'", where);
  if (!it->is_number()) throw ValidationError(std::string("key '") + key + "' must be a number", where);
  const double v = it->get<double>();
  if (!std::isfinite(v)) throw ValidationError(std::string("key '") + key + "' is not finite", where);
  return v;
}

std::size_t get_index(const json& obj, const char* key, const std::string& where) {
  const auto it = obj.find(key);
  if (it == obj.end()) throw ValidationError(std::string("missing key '") + key + "'", where);
  if (!it->is_number_unsigned())
    throw ValidationError(std::string("key '") + key + "' must be a non-negative integer", where);
  return it->get<std::size_t>();
}

void require_keys(const json& obj, std::initializer_list<std::string_view> allowed,
                  const std::string& where) {
  if (!obj.is_object()) throw ValidationError("expected a JSON object", where);
  for (const auto& [key, value] : obj.items()) {
    bool known = false;
    for (auto a : allowed) known |= (a == key);
    if (!known) throw ValidationError("unexpected key '" + key + "'", where);
  }
}

std::string dump(const json& j) { return j.dump(-1, ' ', false, json::error_handler_t::strict); }

// Calls fn(line_number, json) for each non-blank line.
template <typename Fn>
void for_each_jsonl(std::string_view text, std::string_view source, Fn&& fn) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!unicode::split_whitespace(line).empty()) {
      const std::string where = at_record(source, "line", line_no);
      json j;
      try {
        j = json::parse(line.begin(), line.end());
      } catch (const json::parse_error& e) {
        throw ValidationError(e.what(), where);
      }
      fn(where, j);
    }
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
}

json segment_object(const Segment& s) {
  json j;
  j["id"] = s.id;
  j["start"] = s.start_s;
  j["end"] = s.end_s;
  j["gt_from"] = s.gt_from;
  j["gt_to"] = s.gt_to;
  j["text"] = s.text;
  return j;
}

Segment segment_from_object(const json& j, const std::string& where, bool allow_reason) {
  if (allow_reason) {
    require_keys(j, {"id", "start", "end", "gt_from", "gt_to", "text", "reason"}, where);
  } else {
    require_keys(j, {"id", "start", "end", "gt_from", "gt_to", "text"}, where);
  }
  Segment s;
  s.id = get_field<std::string>(j, "id", where);
  s.start_s = get_number(j, "start", where);
  s.end_s = get_number(j, "end", where);
  s.gt_from = get_index(j, "gt_from", where);
  s.gt_to = get_index(j, "gt_to", where);
  s.text = get_field<std::string>(j, "text", where);
  if (s.id.empty()) throw ValidationError("segment id is empty", where);
  if (!(s.end_s > s.start_s)) throw ValidationError("segment end must exceed start", where);
  if (s.gt_to < s.gt_from) throw ValidationError("gt_to precedes gt_from", where);
  if (s.text.empty()) throw ValidationError("segment text is empty", where);
  return s;
}

}  // namespace

std::string read_text_file(const fs::path& path) {
  std::error_code ec;
  if (!fs::is_regular_file(path, ec)) throw MissingInputError(path.string());
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingInputError(path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  std::string text = ss.str();
  if (!unicode::is_valid_utf8(text)) throw ValidationError("file is not valid UTF-8", path.string());
  // Tolerate a UTF-8 byte order mark.
  if (text.starts_with("\xEF\xBB\xBF")) text.erase(0, 3);
  return text;
}

void write_file_atomic(const fs::path& path, std::string_view content) {
  static std::atomic<unsigned> counter{0};
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp-" + std::to_string(::getpid()) + "-" + std::to_string(counter++);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw Error("short write to " + tmp.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error("cannot rename onto " + path.string());
  }
}

std::vector<std::vector<std::string>> parse_csv(std::string_view text, std::string_view source) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  std::size_t line = 1;
  auto end_row = [&] {
    if (field_started || !row.empty()) {
      row.push_back(std::move(field));
      rows.push_back(std::move(row));
    }
    row.clear();
    field.clear();
    field_started = false;
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        if (!field.empty()) throw ValidationError("quote inside unquoted field", at_record(source, "line", line));
        in_quotes = true;
        field_started = true;
        break;
      case ',':
        row.push_back(std::move(field));
        field.clear();
        field_started = true;
        break;
      case '\r':
        break;
      case '\n':
        end_row();
        ++line;
        break;
      default:
        field.push_back(c);
        field_started = true;
    }
  }
  if (in_quotes) throw ValidationError("unterminated quoted field", at_record(source, "line", line));
  end_row();
  return rows;
}

std::string csv_field(std::string_view field) {
  if (field.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

NameRegistry parse_name_registry_csv(std::string_view text, std::string_view source) {
  const auto rows = parse_csv(text, source);
  if (rows.empty() || rows[0] != std::vector<std::string>{"first_name", "surname"})
    throw ValidationError("expected header 'first_name,surname'", at_record(source, "line", 1));
  std::vector<std::pair<std::string, std::string>> records;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() != 2)
      throw ValidationError("expected 2 fields", at_record(source, "row", r + 1));
    records.emplace_back(rows[r][0], rows[r][1]);
  }
  try {
    return load_name_registry(records);
  } catch (const ValidationError& e) {
    throw ValidationError(e.what(), std::string(source));
  }
}

std::string turns_to_json(std::span<const SpeakerTurn> turns) {
  json arr = json::array();
  for (const auto& t : turns) {
    json obj;
    obj["speaker"] = t.speaker;
    obj["transcript"] = t.transcript;
    arr.push_back(std::move(obj));
  }
  return arr.dump(4, ' ', false, json::error_handler_t::strict) + "\n";
}

std::vector<SpeakerTurn> turns_from_json(std::string_view text, std::string_view source) {
  const json j = parse_json(text, source);
  if (!j.is_array()) throw ValidationError("expected a JSON array of turns", std::string(source));
  std::vector<SpeakerTurn> turns;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string where = at_record(source, "record", i);
    require_keys(j[i], {"speaker", "transcript"}, where);
    SpeakerTurn t{get_field<std::string>(j[i], "speaker", where),
                  get_field<std::string>(j[i], "transcript", where)};
    if (t.speaker.empty()) throw ValidationError("speaker is empty", where);
    turns.push_back(std::move(t));
  }
  return turns;
}

std::string parse_report_to_json(const ParseReport& report, std::span<const Warning> warnings) {
  json j;
  j["runs"] = report.runs;
  j["annotations"] = report.annotations;
  j["discarded_header_runs"] = report.discarded_header_runs;
  j["stripped_note_spans"] = report.stripped_note_spans;
  json w = json::array();
  for (const auto& warning : warnings) w.push_back({{"code", warning.code}, {"detail", warning.detail}});
  j["warnings"] = std::move(w);
  return j.dump(2) + "\n";
}

std::vector<MediaEntry> parse_manifest_csv(std::string_view text, std::string_view source) {
  const auto rows = parse_csv(text, source);
  const std::vector<std::string> header{"kind", "path", "session_number", "date", "duration_seconds"};
  if (rows.empty() || rows[0] != header)
    throw ValidationError("expected header 'kind,path,session_number,date,duration_seconds'",
                          at_record(source, "line", 1));
  std::vector<MediaEntry> entries;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const std::string where = at_record(source, "row", r + 1);
    const auto& f = rows[r];
    if (f.size() != header.size()) throw ValidationError("expected 5 fields", where);
    MediaEntry e;
    if (f[0] == "recording") {
      e.kind = MediaKind::kRecording;
    } else if (f[0] == "transcript") {
      e.kind = MediaKind::kTranscript;
    } else {
      throw ValidationError("kind must be 'recording' or 'transcript'", where);
    }
    e.path = f[1];
    if (e.path.empty()) throw ValidationError("path is empty", where);
    try {
      std::size_t used = 0;
      const long n = std::stol(f[2], &used);
      if (used != f[2].size() || n < 1) throw std::invalid_argument("range");
      e.key.session_number = static_cast<int>(n);
    } catch (const std::exception&) {
      throw ValidationError("session_number must be a positive integer", where);
    }
    try {
      e.key.date = CalendarDate::parse(f[3]);
    } catch (const ValidationError& err) {
      throw ValidationError(err.what(), where);
    }
    if (f[4].empty()) {
      e.duration_seconds = 0.0;
    } else {
      try {
        std::size_t used = 0;
        e.duration_seconds = std::stod(f[4], &used);
        if (used != f[4].size()) throw std::invalid_argument("trailing");
      } catch (const std::exception&) {
        throw ValidationError("duration_seconds must be a number", where);
      }
      if (!(e.duration_seconds >= 0) || !std::isfinite(e.duration_seconds))
        throw ValidationError("duration_seconds must be >= 0", where);
    }
    if (e.kind == MediaKind::kTranscript) e.duration_seconds = 0.0;
    entries.push_back(std::move(e));
  }
  return entries;
}

std::string media_entries_to_csv(std::span<const MediaEntry> entries) {
  std::string out = "kind,path,session_number,date,duration_seconds\n";
  for (const auto& e : entries) {
    char dur[64];
    std::snprintf(dur, sizeof dur, "%.3f", e.duration_seconds);
    out += (e.kind == MediaKind::kRecording ? "recording," : "transcript,") + csv_field(e.path) + ',' +
           std::to_string(e.key.session_number) + ',' + e.key.date.to_string() + ',' + dur + '\n';
  }
  return out;
}

std::string pairs_to_csv(std::span<const SessionPair> pairs) {
  std::string out = "recording_path,transcript_path,session_number,date\n";
  for (const auto& p : pairs) {
    out += csv_field(p.recording.path) + ',' + csv_field(p.transcript.path) + ',' +
           std::to_string(p.recording.key.session_number) + ',' + p.recording.key.date.to_string() + '\n';
  }
  return out;
}

std::string warnings_to_jsonl(std::span<const Warning> warnings) {
  std::string out;
  for (const auto& w : warnings) {
    json j;
    j["code"] = w.code;
    j["detail"] = w.detail;
    out += dump(j) + '\n';
  }
  return out;
}

std::vector<RawTimedWord> parse_reference_json(std::string_view text, std::string_view source) {
  const json j = parse_json(text, source);
  if (!j.is_array()) throw ValidationError("expected a JSON array of words", std::string(source));
  std::vector<RawTimedWord> words;
  words.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string where = at_record(source, "record", i);
    require_keys(j[i], {"word", "start", "end"}, where);
    RawTimedWord w{get_field<std::string>(j[i], "word", where), get_number(j[i], "start", where),
                   get_number(j[i], "end", where)};
    if (w.start_s < 0) throw ValidationError("start must be >= 0", where);
    if (w.end_s < w.start_s) throw ValidationError("end precedes start", where);
    if (!words.empty() && w.start_s < words.back().start_s)
      throw ValidationError("start times must be non-decreasing", where);
    words.push_back(std::move(w));
  }
  return words;
}

std::string reference_to_json(std::span<const RawTimedWord> words) {
  std::string out = "[\n";
  for (std::size_t i = 0; i < words.size(); ++i) {
    json j;
    j["word"] = words[i].word;
    j["start"] = words[i].start_s;
    j["end"] = words[i].end_s;
    out += dump(j);
    out += i + 1 < words.size() ? ",\n" : "\n";
  }
  out += "]\n";
  return out;
}

std::string ground_truth_text(std::string_view content, std::string_view source) {
  std::size_t first = 0;
  while (first < content.size() && unicode::is_whitespace(static_cast<unsigned char>(content[first]))) ++first;
  if (first < content.size() && content[first] == '[') {
    std::string joined;
    for (const auto& t : turns_from_json(content, source)) {
      if (t.transcript.empty()) continue;
      if (!joined.empty()) joined.push_back(' ');
      joined += t.transcript;
    }
    return joined;
  }
  return std::string(content);
}

std::string anchors_to_json(std::span<const Anchor> anchors) {
  std::string out = "[\n";
  for (std::size_t i = 0; i < anchors.size(); ++i) {
    json j;
    j["gt_index"] = anchors[i].gt_index;
    j["ref_index"] = anchors[i].ref_index;
    j["time"] = anchors[i].time_s;
    j["score"] = anchors[i].score;
    out += dump(j);
    out += i + 1 < anchors.size() ? ",\n" : "\n";
  }
  out += "]\n";
  return out;
}

std::vector<Anchor> anchors_from_json(std::string_view text, std::string_view source) {
  const json j = parse_json(text, source);
  if (!j.is_array()) throw ValidationError("expected a JSON array of anchors", std::string(source));
  std::vector<Anchor> anchors;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string where = at_record(source, "record", i);
    require_keys(j[i], {"gt_index", "ref_index", "time", "score"}, where);
    Anchor a{get_index(j[i], "gt_index", where), get_index(j[i], "ref_index", where),
             get_number(j[i], "time", where), get_field<int>(j[i], "score", where)};
    if (!anchors.empty()) {
      const Anchor& p = anchors.back();
      if (!(a.gt_index > p.gt_index && a.ref_index > p.ref_index && a.time_s > p.time_s))
        throw ValidationError("anchors must be strictly increasing in gt_index, ref_index and time", where);
    }
    anchors.push_back(a);
  }
  return anchors;
}

std::string segments_to_jsonl(std::span<const Segment> segments) {
  std::string out;
  for (const auto& s : segments) out += dump(segment_object(s)) + '\n';
  return out;
}

std::string dropped_to_jsonl(std::span<const DroppedSegment> dropped) {
  std::string out;
  for (const auto& d : dropped) {
    json j = segment_object(d.segment);
    j["reason"] = std::string(to_string(d.reason));
    out += dump(j) + '\n';
  }
  return out;
}

std::vector<Segment> segments_from_jsonl(std::string_view text, std::string_view source) {
  std::vector<Segment> out;
  for_each_jsonl(text, source, [&](const std::string& where, const json& j) {
    out.push_back(segment_from_object(j, where, false));
  });
  return out;
}

std::vector<DroppedSegment> dropped_from_jsonl(std::string_view text, std::string_view source) {
  std::vector<DroppedSegment> out;
  for_each_jsonl(text, source, [&](const std::string& where, const json& j) {
    Segment s = segment_from_object(j, where, true);
    DropReason reason;
    try {
      reason = drop_reason_from_string(get_field<std::string>(j, "reason", where));
    } catch (const ValidationError& e) {
      throw ValidationError(e.what(), where);
    }
    out.push_back({std::move(s), reason});
  });
  return out;
}

std::string scores_to_jsonl(std::span<const SegmentScore> scores) {
  std::string out;
  for (const auto& s : scores) {
    json j;
    j["segment_id"] = s.segment_id;
    j["hypothesis"] = s.hypothesis;
    j["wer"] = s.wer_value;
    out += dump(j) + '\n';
  }
  return out;
}

std::vector<SegmentScore> scores_from_jsonl(std::string_view text, std::string_view source) {
  std::vector<SegmentScore> out;
  for_each_jsonl(text, source, [&](const std::string& where, const json& j) {
    require_keys(j, {"segment_id", "hypothesis", "wer"}, where);
    SegmentScore s{get_field<std::string>(j, "segment_id", where),
                   get_field<std::string>(j, "hypothesis", where), get_number(j, "wer", where)};
    if (s.wer_value < 0) throw ValidationError("wer must be >= 0", where);
    out.push_back(std::move(s));
  });
  return out;
}

std::string cut_manifest_to_csv(const CutManifest& manifest) {
  std::string out = "audio_path,start,end,segment_id\n";
  char buf[96];
  for (const auto& row : manifest.rows) {
    std::snprintf(buf, sizeof buf, ",%.3f,%.3f,", row.start_s, row.end_s);
    out += csv_field(row.audio_path) + buf + csv_field(row.segment_id) + '\n';
  }
  return out;
}

std::string stats_to_json(const CorpusStats& stats) {
  json j;
  j["input"] = {{"segments", stats.input_segments}, {"hours", stats.input_hours()}};
  j["kept"] = {{"segments", stats.kept_segments}, {"hours", stats.kept_hours()}};
  json reasons = json::object();
  for (const auto& [k, v] : stats.drop_reasons) reasons[k] = v;
  j["dropped"] = {{"segments", stats.dropped_segments},
                  {"hours", stats.dropped_hours()},
                  {"reasons", std::move(reasons)}};
  return j.dump(2) + "\n";
}

}  // namespace parlalign::formats
