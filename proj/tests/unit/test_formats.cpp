#include <filesystem>

#include "doctest.h"
#include "parlalign/error.hpp"
#include "parlalign/formats.hpp"
#include "parlalign/pipeline.hpp"
#include "support/tempdir.hpp"

using namespace parlalign;
using testing_support::TempDir;

TEST_CASE("parse_csv handles quoting and CRLF") {
  const auto rows = formats::parse_csv("a,\"b,c\",\"say \"\"hi\"\"\"\r\nx,,z\n", "t.csv");
  REQUIRE(rows.size() == 2);
  CHECK(rows[0] == std::vector<std::string>{"a", "b,c", "say \"hi\""});
  CHECK(rows[1] == std::vector<std::string>{"x", "", "z"});
  CHECK_THROWS_AS(formats::parse_csv("a,\"open\n", "t.csv"), ValidationError);
  CHECK(formats::csv_field("plain") == "plain");
  CHECK(formats::csv_field("a,b") == "\"a,b\"");
  CHECK(formats::csv_field("q\"") == "\"q\"\"\"");
}

TEST_CASE("name registry csv") {
  const auto reg = formats::parse_name_registry_csv("first_name,surname\nPeter,Pellegrini\nAnna,Nováková\n", "r.csv");
  CHECK(reg.contains("pellegrini"));
  CHECK(reg.contains("nováková"));
  CHECK_THROWS_AS(formats::parse_name_registry_csv("name\nPeter\n", "r.csv"), ValidationError);
}

TEST_CASE("manifest csv validation") {
  const std::string good =
      "kind,path,session_number,date,duration_seconds\n"
      "recording,a.wav,7,2015-03-10,3600.5\n"
      "transcript,a.xhtml,7,2015-03-10,\n";
  const auto entries = formats::parse_manifest_csv(good, "m.csv");
  REQUIRE(entries.size() == 2);
  CHECK(entries[0].kind == MediaKind::kRecording);
  CHECK(entries[0].duration_seconds == 3600.5);
  CHECK(entries[1].key.id() == "s0007_2015-03-10");

  const std::string header = "kind,path,session_number,date,duration_seconds\n";
  CHECK_THROWS_AS(formats::parse_manifest_csv(header + "video,a,1,2015-01-01,1\n", "m"), ValidationError);
  CHECK_THROWS_AS(formats::parse_manifest_csv(header + "recording,a,0,2015-01-01,1\n", "m"), ValidationError);
  CHECK_THROWS_AS(formats::parse_manifest_csv(header + "recording,a,1,2015-02-30,1\n", "m"), ValidationError);
  CHECK_THROWS_AS(formats::parse_manifest_csv(header + "recording,a,1,2015-01-01,-4\n", "m"), ValidationError);
  CHECK_THROWS_AS(formats::parse_manifest_csv("kind,path\n", "m"), ValidationError);
  try {
    formats::parse_manifest_csv(header + "recording,a,1,2015-01-01,x\n", "m.csv");
    FAIL("expected a validation error");
  } catch (const ValidationError& e) {
    CHECK(e.location() == "m.csv: row 2");
  }
}

TEST_CASE("reference json validation") {
  const auto words = formats::parse_reference_json(R"([{"word":"Dobrý","start":0.5,"end":0.9}])", "r.json");
  REQUIRE(words.size() == 1);
  CHECK(words[0].word == "Dobrý");
  CHECK(formats::parse_reference_json(formats::reference_to_json(words), "rt").at(0).end_s == 0.9);

  CHECK_THROWS_AS(formats::parse_reference_json(R"([{"word":"a","start":-1,"end":0}])", "r"), ValidationError);
  CHECK_THROWS_AS(formats::parse_reference_json(R"([{"word":"a","start":2,"end":1}])", "r"), ValidationError);
  CHECK_THROWS_AS(formats::parse_reference_json(R"([{"word":"a","start":2,"end":3},{"word":"b","start":1,"end":3}])", "r"),
                  ValidationError);
  CHECK_THROWS_AS(formats::parse_reference_json(R"([{"word":"a","start":0,"end":1,"conf":1}])", "r"), ValidationError);
  CHECK_THROWS_AS(formats::parse_reference_json(R"({"word":"a"})", "r"), ValidationError);
  CHECK_THROWS_AS(formats::parse_reference_json("[{", "r"), ValidationError);
}

TEST_CASE("turns json round-trip and ground truth text") {
  const std::vector<SpeakerTurn> turns = {{"Peter Pellegrini", "Vážené dámy, vážení páni."}, {"Ján Figeľ", "Ďakujem."}};
  const std::string text = formats::turns_to_json(turns);
  CHECK(text.back() == '\n');
  CHECK(text.find("Vážené") != std::string::npos);
  CHECK(formats::turns_from_json(text, "t") == turns);
  CHECK(formats::ground_truth_text(text, "t") == "Vážené dámy, vážení páni. Ďakujem.");
  CHECK(formats::ground_truth_text("plain words", "t") == "plain words");
  CHECK_THROWS_AS(formats::turns_from_json(R"([{"speaker":"x"}])", "t"), ValidationError);
}

TEST_CASE("anchors, segments, scores round-trip") {
  const std::vector<Anchor> anchors = {{0, 1, 0.5, 4}, {3, 2, 1.25, 8}};
  CHECK(formats::anchors_from_json(formats::anchors_to_json(anchors), "a") == anchors);
  const std::vector<Anchor> backwards = {{3, 1, 0.5, 4}, {2, 2, 1.0, 4}};
  CHECK_THROWS_AS(formats::anchors_from_json(formats::anchors_to_json(backwards), "a"), ValidationError);

  Segment s{"seg-000001", 0.5, 12.25, 0, 9, "text \"quoted\""};
  const std::vector<Segment> segs = {s};
  CHECK(formats::segments_from_jsonl(formats::segments_to_jsonl(segs), "s") == segs);
  const std::vector<DroppedSegment> dropped = {{s, DropReason::kOverWer}};
  const auto back = formats::dropped_from_jsonl(formats::dropped_to_jsonl(dropped), "d");
  REQUIRE(back.size() == 1);
  CHECK(back[0].reason == DropReason::kOverWer);
  CHECK(back[0].segment == s);

  const std::vector<SegmentScore> scores = {{"seg-000001", "hyp", 0.25}};
  const auto sc = formats::scores_from_jsonl(formats::scores_to_jsonl(scores), "sc");
  REQUIRE(sc.size() == 1);
  CHECK(sc[0].wer_value == 0.25);
  try {
    formats::segments_from_jsonl("\n{\"id\":1}\n", "segs.jsonl");
    FAIL("expected a validation error");
  } catch (const ValidationError& e) {
    CHECK(e.location() == "segs.jsonl: line 2");
  }
}

TEST_CASE("cut manifest csv uses three decimals") {
  CutManifest m;
  m.rows.push_back({"audio/a b.wav", 1.0, 2.3456, "seg-000001"});
  CHECK(formats::cut_manifest_to_csv(m) == "audio_path,start,end,segment_id\naudio/a b.wav,1.000,2.346,seg-000001\n");
  CHECK(formats::cut_manifest_to_csv({}) == "audio_path,start,end,segment_id\n");
}

TEST_CASE("file io") {
  TempDir dir;
  const auto p = dir / "out" / "x.txt";
  std::filesystem::create_directories(p.parent_path());
  formats::write_file_atomic(p, "hello\n");
  CHECK(formats::read_text_file(p) == "hello\n");
  formats::write_file_atomic(p, "replaced");
  CHECK(formats::read_text_file(p) == "replaced");
  for (const auto& e : std::filesystem::directory_iterator(p.parent_path())) CHECK(e.path().filename() == "x.txt");

  CHECK_THROWS_AS(formats::read_text_file(dir / "missing.txt"), MissingInputError);
  dir.write("bad.txt", "\xC3\x28");
  CHECK_THROWS_AS(formats::read_text_file(dir / "bad.txt"), ValidationError);
  dir.write("bom.txt", "\xEF\xBB\xBFok");
  CHECK(formats::read_text_file(dir / "bom.txt") == "ok");
}

TEST_CASE("config parsing is strict") {
  const auto cfg = pipeline::parse_config(
      R"({"manifest":"m.csv","output_dir":"out","jobs":4,"align":{"window":30},"segment":{"wer_threshold":0.3}})",
      "c.json", "/base");
  CHECK(cfg.manifest == std::filesystem::path("/base/m.csv"));
  CHECK(cfg.jobs == 4);
  CHECK(cfg.align.window == 30);
  CHECK(cfg.align.context_radius == 4);
  CHECK(cfg.segment.wer_threshold == 0.3);

  CHECK_THROWS_AS(pipeline::parse_config(R"({"manifets":"m.csv"})", "c"), ValidationError);
  CHECK_THROWS_AS(pipeline::parse_config(R"({"align":{"widow":3}})", "c"), ValidationError);
  CHECK_THROWS_AS(pipeline::parse_config(R"({"segment":{"max_gap_s":-1}})", "c"), ValidationError);
  CHECK_THROWS_AS(pipeline::parse_config(R"({"verbosity":"loud"})", "c"), ValidationError);
  CHECK_THROWS_AS(pipeline::parse_config("[]", "c"), ValidationError);
}

TEST_CASE("stage report keeps timing apart") {
  pipeline::StageReport r;
  r.stage = "align";
  r.counts["anchors"] = 3;
  r.wall_seconds = 1.5;
  const std::string j = r.to_json();
  CHECK(j.find("\"timing\"") != std::string::npos);
  CHECK(j.find("\"anchors\": 3") != std::string::npos);
}
