#include "parlalign/session_matcher.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <map>

namespace parlalign {

CalendarDate CalendarDate::parse(std::string_view iso) {
  auto fail = [&] { return ValidationError("invalid ISO-8601 date '" + std::string(iso) + "'"); };
  if (iso.size() != 10 || iso[4] != '-' || iso[7] != '-') throw fail();
  auto number = [&](std::size_t pos, std::size_t len) {
    int v = 0;
    const char* first = iso.data() + pos;
    auto [ptr, ec] = std::from_chars(first, first + len, v);
    if (ec != std::errc() || ptr != first + len) throw fail();
    return v;
  };
  CalendarDate d{number(0, 4), static_cast<unsigned>(number(5, 2)),
                 static_cast<unsigned>(number(8, 2))};
  if (!d.valid()) throw fail();
  return d;
}

bool CalendarDate::valid() const {
  return std::chrono::year_month_day{std::chrono::year{year}, std::chrono::month{month},
                                     std::chrono::day{day}}
      .ok();
}

std::string CalendarDate::to_string() const {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", year, month, day);
  return buf;
}

std::string SessionKey::id() const {
  char buf[32];
  std::snprintf(buf, sizeof buf, "s%04d_", session_number);
  return buf + date.to_string();
}

MatchResult match_sessions(std::span<const MediaEntry> recordings,
                           std::span<const MediaEntry> transcripts) {
  struct Bucket {
    std::vector<const MediaEntry*> recordings;
    std::vector<const MediaEntry*> transcripts;
  };
  std::map<SessionKey, Bucket> buckets;
  for (const auto& r : recordings) buckets[r.key].recordings.push_back(&r);
  for (const auto& t : transcripts) buckets[t.key].transcripts.push_back(&t);

  MatchResult result;
  for (const auto& [key, bucket] : buckets) {
    const std::size_t nr = bucket.recordings.size();
    const std::size_t nt = bucket.transcripts.size();
    if (nr == 1 && nt == 1) {
      result.pairs.push_back({*bucket.recordings.front(), *bucket.transcripts.front()});
      continue;
    }
    if (nr > 1 || nt > 1) {
      result.warnings.push_back(
          {"ambiguous_key", "session " + std::to_string(key.session_number) + " on " +
                                key.date.to_string() + ": " + std::to_string(nr) +
                                " recording(s), " + std::to_string(nt) + " transcript(s)"});
    }
    for (const auto* r : bucket.recordings) result.unmatched_recordings.push_back(*r);
    for (const auto* t : bucket.transcripts) result.unmatched_transcripts.push_back(*t);
  }
  return result;
}

}  // namespace parlalign
