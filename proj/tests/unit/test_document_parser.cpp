#include <random>

#include "doctest.h"
#include "parlalign/document_parser.hpp"
#include "parlalign/unicode.hpp"

using namespace parlalign;

namespace {

NameRegistry registry_of(std::vector<std::pair<std::string, std::string>> records) {
  return load_name_registry(records);
}

NameRegistry listing_registry() {
  return registry_of({{"Jana", "Laššáková"}, {"Branislav", "Škripek"}, {"Peter", "Pellegrini"}});
}

// Reference scanner for documents built only from <p>, </p>, <b>, </b> and
// entity-free text: walks the input byte by byte.
std::vector<TextRun> scan_simple(const std::string& doc) {
  std::vector<TextRun> runs;
  std::string cur;
  bool bold = false;
  auto flush = [&] {
    std::string t = unicode::collapse_whitespace(cur);
    if (!t.empty()) runs.push_back({t, bold});
    cur.clear();
  };
  for (std::size_t i = 0; i < doc.size();) {
    if (doc.compare(i, 3, "<p>") == 0) {
      flush();
      i += 3;
    } else if (doc.compare(i, 4, "</p>") == 0) {
      flush();
      i += 4;
    } else if (doc.compare(i, 3, "<b>") == 0) {
      flush();
      bold = true;
      i += 3;
    } else if (doc.compare(i, 4, "</b>") == 0) {
      flush();
      bold = false;
      i += 4;
    } else {
      cur.push_back(doc[i++]);
    }
  }
  flush();
  return runs;
}

}  // namespace

TEST_CASE("extract_runs splits bold and plain text") {
  const auto runs = extract_runs("<p><b>Ábc, Def, poslanec</b> Ďakujem.</p>");
  REQUIRE(runs.size() == 2);
  CHECK(runs[0] == TextRun{"Ábc, Def, poslanec", true});
  CHECK(runs[1] == TextRun{"Ďakujem.", false});

  const auto plain = extract_runs("<p>plain only</p>");
  REQUIRE(plain.size() == 1);
  CHECK(plain[0] == TextRun{"plain only", false});
}

TEST_CASE("extract_runs matches the reference scanner on two half-bold paragraphs") {
  const std::string doc =
      "<p><b>Laššáková, Jana, podpredsedníčka NR SR</b> Príjemné, dobré ráno.</p>\n"
      "<p><b>Škripek, Branislav, poslanec NR SR</b>   Ďakujem pekne.</p>";
  const auto expected = scan_simple(doc);
  REQUIRE(expected.size() == 4);
  CHECK(extract_runs(doc) == expected);
}

TEST_CASE("extract_runs handles real XHTML scaffolding") {
  const std::string doc =
      "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      "<!DOCTYPE html>\n"
      "<html xmlns=\"http://www.w3.org/1999/xhtml\"><head><meta name=\"x\" content=\"y\"/>"
      "<title>Title text</title></head><body>"
      "<!-- comment <b> -->"
      "<p class=\"p1\"><b>Meno </b><b>Priezvisko</b> a&amp;b &#268;&#x160;<br/>nový&nbsp;riadok</p>"
      "<p/><div><i>kurzíva</i> text</div></body></html>";
  const auto runs = extract_runs(doc);
  REQUIRE(runs.size() == 3);
  CHECK(runs[0] == TextRun{"Meno Priezvisko", true});
  CHECK(runs[1] == TextRun{"a&b ČŠ nový riadok", false});
  CHECK(runs[2] == TextRun{"kurzíva text", false});
}

TEST_CASE("extract_runs reports unparseable markup with its byte offset") {
  try {
    extract_runs("<p>a < b</p>");
    FAIL("expected MarkupError");
  } catch (const MarkupError& e) {
    CHECK(e.byte_offset() == 5);
  }
  CHECK_THROWS_AS(extract_runs("<p>text<!-- never closed"), MarkupError);
  CHECK_THROWS_AS(extract_runs("<p class=\"x>text</p>"), MarkupError);
  CHECK_THROWS_AS(extract_runs("<p"), MarkupError);
}

TEST_CASE("mismatched bold tags are demoted to plain text with a warning") {
  Warnings w;
  const auto runs = extract_runs("<p>before <b>never closed</p><p>x</b> y</p>", &w);
  REQUIRE(runs.size() == 2);
  CHECK(runs[0] == TextRun{"before never closed", false});
  CHECK(runs[1] == TextRun{"x y", false});
  REQUIRE(w.size() == 2);
  CHECK(w[0].code == "unclosed_bold");
  CHECK(w[1].code == "unmatched_bold_close");
}

TEST_CASE("load_name_registry") {
  const auto r = registry_of({{"Jana", "Laššáková"}});
  CHECK(r.size() == 2);
  CHECK(r.contains("jana"));
  CHECK(r.contains("laššáková"));

  const auto multi = registry_of({{"Anna", "Zemanová Kováčová"}});
  CHECK(multi.names() == std::unordered_set<std::string>{"anna", "zemanová", "kováčová"});

  CHECK_THROWS_AS(registry_of({}), ValidationError);
  for (const auto& name : multi.names()) CHECK(unicode::split_whitespace(name).size() == 1);
}

TEST_CASE("is_speaker_annotation applies the three conditions") {
  const auto reg = registry_of({{"Jana", "Laššáková"}});
  const std::string listing = "Laššáková, Jana, podpredsedníčka NR SR";
  CHECK(is_speaker_annotation({listing, true}, reg));
  CHECK_FALSE(is_speaker_annotation({listing, false}, reg));

  const std::string fifteen = "Jana a b c d e f g h i j k l m n";
  const std::string sixteen = fifteen + " o";
  CHECK(unicode::split_whitespace(fifteen).size() == 15);
  CHECK(is_speaker_annotation({fifteen, true}, reg));
  CHECK_FALSE(is_speaker_annotation({sixteen, true}, reg));

  CHECK(is_speaker_annotation({"Jana Jana Jana poslankyňa", true}, reg));
  CHECK_FALSE(is_speaker_annotation({"Jana Jana Jana Laššáková", true}, reg));
  CHECK_FALSE(is_speaker_annotation({"Podpredseda NR SR", true}, reg));
  CHECK(is_speaker_annotation({"LAŠŠÁKOVÁ, JANA", true}, reg));
  // Diacritics are significant.
  CHECK_FALSE(is_speaker_annotation({"Lassakova", true}, reg));
}

TEST_CASE("annotation status only flips across hit counts 0->1 or 3->4") {
  std::mt19937_64 rng(21);
  const std::vector<std::string> names = {"Jana", "Peter", "Anna", "Marek", "Eva"};
  const std::vector<std::string> filler = {"poslanec", "NR", "SR", "minister", "vlády", "za"};
  for (int t = 0; t < 300; ++t) {
    std::string text;
    const int n = 1 + static_cast<int>(rng() % 14);
    for (int k = 0; k < n; ++k) {
      const bool is_name = rng() % 3 == 0;
      text += (k ? " " : "") + (is_name ? names[rng() % names.size()] : filler[rng() % filler.size()]) +
              (rng() % 4 == 0 ? "," : "");
    }
    const NameRegistry small = registry_of({{"Jana", "Novák"}, {"Peter", "Kováč"}});
    const NameRegistry big = registry_of({{"Jana", "Novák"}, {"Peter", "Kováč"}, {"Anna", "Eva"}});
    const std::size_t hs = count_name_hits(text, small), hb = count_name_hits(text, big);
    CHECK(hs <= hb);
    const bool as = is_speaker_annotation({text, true}, small), ab = is_speaker_annotation({text, true}, big);
    if (as != ab) CHECK(((hs == 0 && hb >= 1) || (hs <= 3 && hb >= 4)));

    // Prefixes with 1..3 hits stay annotations.
    if (as) {
      const auto words = unicode::split_whitespace(text);
      std::string prefix;
      for (auto w : words) {
        prefix += (prefix.empty() ? "" : " ") + std::string(w);
        const std::size_t h = count_name_hits(prefix, small);
        if (h >= 1 && h <= 3) CHECK(is_speaker_annotation({prefix, true}, small));
      }
    }
  }
}

TEST_CASE("strip_notes") {
  CHECK(strip_notes("Ďakujem. (Potlesk.) Ďalej.") == "Ďakujem. Ďalej.");
  CHECK(strip_notes("text [ruch v sále] pokračuje") == "text pokračuje");
  CHECK(strip_notes("text (Potlesk trvá. ďalšie slová") == "text ďalšie slová");
  CHECK(strip_notes("text (bez bodky") == "text");
  CHECK(strip_notes("a (b (c) d) e") == "a e");
  CHECK(strip_notes("a (x. y) b") == "a b");
  CHECK(strip_notes("a (neuzavretá. b (c) d") == "a b d");
  CHECK(strip_notes("a ) b") == "a ) b");

  const auto counted = strip_notes_counted("x (a) y [b] z (c");
  CHECK(counted.text == "x y z");
  CHECK(counted.removed_spans == 3);
}

TEST_CASE("strip_notes is idempotent and leaves no balanced span") {
  std::mt19937_64 rng(99);
  const std::vector<std::string> pieces = {"(", ")", "[", "]", ".", " ", "slovo", "Potlesk", "  ", "x."};
  for (int t = 0; t < 2000; ++t) {
    std::string text;
    for (int k = 0; k < 14; ++k) text += pieces[rng() % pieces.size()];
    const std::string once = strip_notes(text);
    CHECK(strip_notes(once) == once);
    for (auto [open, close] : {std::pair{'(', ')'}, std::pair{'[', ']'}}) {
      const auto o = once.find(open);
      if (o != std::string::npos) CHECK(once.find(close, o) == std::string::npos);
    }
  }
}

TEST_CASE("split_turns reproduces the listing structure") {
  const std::vector<TextRun> runs = {
      {"Laššáková, Jana, podpredsedníčka NR SR", true},
      {"Príjemné, dobré ráno, vážené panie poslankyne, páni poslanci...", false},
      {"Škripek, Branislav, poslanec NR SR", true},
      {"Ďakujem pekne, pani predsedajúca. Áno, preto som sa chcel vydýchať...", false},
  };
  ParseReport report;
  const auto turns = split_turns(runs, listing_registry(), &report);
  REQUIRE(turns.size() == 2);
  CHECK(turns[0] == SpeakerTurn{"Laššáková, Jana, podpredsedníčka NR SR",
                                "Príjemné, dobré ráno, vážené panie poslankyne, páni poslanci..."});
  CHECK(turns[1].speaker == "Škripek, Branislav, poslanec NR SR");
  CHECK(report.annotations == 2);
  CHECK(report.runs == 4);
}

TEST_CASE("split_turns without any annotation is an error") {
  const std::vector<TextRun> runs = {{"x", false}};
  CHECK_THROWS_AS(split_turns(runs, listing_registry()), ValidationError);
}

TEST_CASE("split_turns discards headers and keeps bold quotes in the transcript") {
  // Classification by hand: header (bold, no name), header date (plain),
  // annotation, speech, bold quote (16 words, one name), speech,
  // annotation, speech with note, annotation, speech.
  const std::vector<TextRun> runs = {
      {"Spoločná česko-slovenská digitálna parlamentná knižnica", true},
      {"Utorok 10. marca 2015 o 9.00 hodine", false},
      {"Pellegrini, Peter, predseda NR SR", true},
      {"Otváram rokovanie.", false},
      {"Citujem: Peter povedal že toto je veľmi dlhá veta ktorá sa tu nachádza v celom znení", true},
      {"Koniec citátu.", false},
      {"Laššáková, Jana, podpredsedníčka NR SR", true},
      {"Ďakujem. (Potlesk.)", false},
      {"Škripek, Branislav, poslanec NR SR", true},
      {"Áno.", false},
  };
  const auto reg = listing_registry();
  CHECK_FALSE(is_speaker_annotation(runs[4], reg));
  ParseReport report;
  const auto turns = split_turns(runs, reg, &report);
  REQUIRE(turns.size() == 3);
  CHECK(turns[0].transcript ==
        "Otváram rokovanie. Citujem: Peter povedal že toto je veľmi dlhá veta ktorá sa tu nachádza v "
        "celom znení Koniec citátu.");
  CHECK(turns[1].transcript == "Ďakujem.");
  CHECK(turns[2].transcript == "Áno.");
  CHECK(report.discarded_header_runs == 2);
  CHECK(report.stripped_note_spans == 1);
  CHECK(report.annotations == 3);
}

TEST_CASE("split_turns preserves run order") {
  std::mt19937_64 rng(4);
  const auto reg = listing_registry();
  const std::vector<TextRun> pool = {{"Škripek, Branislav, poslanec", true},
                                     {"Jana Laššáková", true},
                                     {"obyčajný text", false},
                                     {"zvýraznený text", true},
                                     {"ďalšie slová.", false}};
  for (int t = 0; t < 200; ++t) {
    std::vector<TextRun> runs;
    for (int k = 0; k < 10; ++k) runs.push_back(pool[rng() % pool.size()]);
    runs.insert(runs.begin() + static_cast<long>(rng() % runs.size()), pool[0]);
    std::string expected;
    bool started = false;
    for (const auto& r : runs) {
      started |= is_speaker_annotation(r, reg);
      if (started) expected += (expected.empty() ? "" : " ") + r.text;
    }
    std::string actual;
    for (const auto& turn : split_turns(runs, reg)) {
      actual += (actual.empty() ? "" : " ") + turn.speaker;
      if (!turn.transcript.empty()) actual += " " + turn.transcript;
    }
    CHECK(actual == expected);
  }
}
