#include <random>

#include "doctest.h"
#include "parlalign/error.hpp"
#include "parlalign/text_metrics.hpp"
#include "parlalign/unicode.hpp"
#include "support/oracles.hpp"
#include "support/synth.hpp"

using namespace parlalign;

namespace {

NormalizedWords words(std::initializer_list<const char*> ws) {
  NormalizedWords n;
  for (auto w : ws) n.words.emplace_back(w);
  return n;
}

std::string join(const NormalizedWords& n) {
  std::string out;
  for (const auto& w : n.words) out += (out.empty() ? "" : " ") + w;
  return out;
}

// Character-class reference: fold, drop P*, split on whitespace, one code
// point at a time with no fast paths.
std::vector<std::string> reference_normalize(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (char32_t cp : oracle::decode_utf8(text)) {
    if (unicode::is_whitespace(cp)) {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else if (!unicode::is_punctuation(cp)) {
      cur += unicode::encode(std::u32string(1, unicode::fold(cp)));
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

}  // namespace

TEST_CASE("normalize") {
  CHECK(normalize("Ďakujem, pani predsedajúca.").words ==
        std::vector<std::string>{"ďakujem", "pani", "predsedajúca"});
  CHECK(normalize("").empty());
  CHECK(normalize(" ... — ").empty());
  SUBCASE("em dash fuses its neighbours") {
    const auto expected = reference_normalize("A—B (x)");
    CHECK(expected == std::vector<std::string>{"ab", "x"});
    CHECK(normalize("A—B (x)").words == expected);
  }
  SUBCASE("numerals and symbols survive") {
    CHECK(normalize("€ 5, 12 % +3").words == std::vector<std::string>{"€", "5", "12", "+3"});
  }
}

TEST_CASE("normalize agrees with the character-class reference and is idempotent") {
  std::mt19937_64 rng(11);
  const std::vector<std::string> pieces = {"Ďakujem", ",", " ", ".", "—", "PÁN", "(", ")", " ",
                                           "x", "Ä", "„", "“", "12", "-", "\t", "Šťastie", "?!"};
  std::uniform_int_distribution<std::size_t> pick(0, pieces.size() - 1);
  for (int t = 0; t < 500; ++t) {
    std::string text;
    for (int k = 0; k < 12; ++k) text += pieces[pick(rng)];
    const auto n = normalize(text);
    CHECK(n.words == reference_normalize(text));
    CHECK(normalize(join(n)) == n);
    for (const auto& w : n.words) {
      CHECK_FALSE(w.empty());
      CHECK(w == unicode::fold_case(w));
    }
  }
}

TEST_CASE("levenshtein examples") {
  CHECK(levenshtein("pán", "pán") == 0);
  CHECK(oracle::char_distance("pán", "pätn") == 2);
  CHECK(levenshtein("pán", "pätn") == 2);
  CHECK(levenshtein("", "abc") == 3);
  CHECK(levenshtein("abc", "") == 3);
  CHECK(levenshtein("vlady", "vlády") == 1);
  CHECK(levenshtein("vlady", "vlade") == 1);
}

TEST_CASE("bounded distance agrees with the full DP") {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 3000; ++t) {
    const std::string a = synth::random_word(rng, 0, 7);
    const std::string b = (t % 3 == 0) ? synth::misspell(rng, a.empty() ? "ab" : a) : synth::random_word(rng, 0, 7);
    const std::size_t d = oracle::char_distance(a, b);
    CHECK(levenshtein(a, b) == d);
    const auto ua = unicode::decode(a), ub = unicode::decode(b);
    for (std::size_t bound = 0; bound <= 3; ++bound) CHECK(within_distance(ua, ub, bound) == (d <= bound));
  }
}

TEST_CASE("levenshtein metric axioms on random triples") {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 2000; ++t) {
    const auto a = synth::random_word(rng, 0, 6), b = synth::random_word(rng, 0, 6),
               c = synth::random_word(rng, 0, 6);
    CHECK((levenshtein(a, b) == 0) == (a == b));
    CHECK(levenshtein(a, b) == levenshtein(b, a));
    CHECK(levenshtein(a, c) <= levenshtein(a, b) + levenshtein(b, c));
  }
}

TEST_CASE("wer examples") {
  const auto same = wer(words({"a", "b", "c"}), words({"a", "b", "c"}));
  CHECK(same.value == 0.0);

  const auto mixed = wer(words({"a", "b", "c", "d"}), words({"a", "x", "c"}));
  CHECK(oracle::edit_distance(std::vector<std::string>{"a", "b", "c", "d"},
                              std::vector<std::string>{"a", "x", "c"}) == 2);
  CHECK(mixed.substitutions == 1);
  CHECK(mixed.deletions == 1);
  CHECK(mixed.insertions == 0);
  CHECK(mixed.value == 0.5);

  const auto over = wer(words({"a"}), words({"a", "b", "c"}));
  CHECK(over.insertions == 2);
  CHECK(over.value == 2.0);

  CHECK_THROWS_AS(wer(NormalizedWords{}, words({"a"})), ValidationError);
  CHECK(wer(words({"a", "b"}), NormalizedWords{}).deletions == 2);
}

TEST_CASE("wer prefers substitutions over delete+insert pairs") {
  const auto s = wer(words({"a", "b"}), words({"x", "y"}));
  CHECK(s.substitutions == 2);
  CHECK(s.deletions + s.insertions == 0);
}

TEST_CASE("wer decomposition is consistent with the quadratic DP") {
  std::mt19937_64 rng(3);
  const std::vector<std::string> vocab = {"a", "b", "c", "d", "e"};
  std::uniform_int_distribution<std::size_t> pick(0, vocab.size() - 1), len(1, 20), hl(0, 20);
  for (int t = 0; t < 400; ++t) {
    NormalizedWords r, h;
    for (std::size_t k = len(rng); k > 0; --k) r.words.push_back(vocab[pick(rng)]);
    for (std::size_t k = hl(rng); k > 0; --k) h.words.push_back(vocab[pick(rng)]);
    const auto s = wer(r, h);
    const std::size_t d = oracle::edit_distance(r.words, h.words);
    CHECK(s.errors() == d);
    CHECK(r.size() - s.deletions + s.insertions == h.size());
    CHECK(s.value == static_cast<double>(d) / static_cast<double>(r.size()));
    CHECK(wer(r, r).value == 0.0);
  }
}
