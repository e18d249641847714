#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "recbias/errors.hpp"
#include "recbias/protocol.hpp"

using namespace recbias;

namespace {

std::vector<WindowItem> window_of(const std::vector<std::string>& texts) {
  std::vector<WindowItem> items;
  for (std::size_t i = 0; i < texts.size(); ++i)
    items.push_back(WindowItem{"d" + std::to_string(i + 1), texts[i], texts[i], std::nullopt});
  return items;
}

Errc code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected recbias::Error");
  return Errc::IoError;
}

}  // namespace

TEST_CASE("listwise prompt carries the template slots") {
  Topic topic{"q1", "test"};
  auto prompt = build_listwise_prompt(topic, window_of({"first passage", "second passage"}));
  CHECK(prompt.system_text.find("You are RankLLM") == 0);
  CHECK(prompt.user_text.find("I will provide you with 2 passages") != std::string::npos);
  CHECK(prompt.user_text.find("Search Query: test") != std::string::npos);
  CHECK(prompt.user_text.find("[1] first passage") != std::string::npos);
  CHECK(prompt.user_text.find("[2] second passage") != std::string::npos);
  CHECK(prompt.user_text.find("Rank the 2 passages above") != std::string::npos);
  CHECK(prompt.user_text.find("The output format should be [] > [], e.g., [4] > [2].") !=
        std::string::npos);
  CHECK(prompt.user_text.find("Only respond with the ranking results") != std::string::npos);
  CHECK(prompt.window_size == 2);
  CHECK(prompt.passage_ids == std::vector<std::string>{"d1", "d2"});

  // determinism: identical inputs give byte-identical prompts
  auto again = build_listwise_prompt(topic, window_of({"first passage", "second passage"}));
  CHECK(again.user_text == prompt.user_text);
  CHECK(again.system_text == prompt.system_text);
}

TEST_CASE("listwise prompt over an injected window starts slots with the date prefix") {
  Topic topic{"q1", "test"};
  auto items = window_of({"plain body", "other body"});
  items[0].text = "Published on 2024/01/01. plain body";
  items[0].year = 2024;
  auto prompt = build_listwise_prompt(topic, items);
  CHECK(prompt.user_text.find("[1] Published on 2024/01/01. plain body") != std::string::npos);
}

TEST_CASE("listwise prompt preconditions") {
  Topic topic{"q1", "test"};
  CHECK(code_of([&] { build_listwise_prompt(topic, {}); }) == Errc::EmptyInput);
  CHECK(code_of([&] { build_listwise_prompt(topic, window_of({"only one"})); }) ==
        Errc::InvalidArgument);
}

TEST_CASE("pairwise prompt layout and slot order") {
  Topic topic{"q1", "which tea is healthiest"};
  auto items = window_of({"green tea text", "black tea text"});
  auto prompt = build_pairwise_prompt(topic, items[0], items[1]);
  CHECK(prompt.system_text.find("You are an expert relevance assessor") == 0);
  CHECK(prompt.system_text.find("Answer with a single letter: 'A' or 'B'.") != std::string::npos);
  auto pos_a = prompt.user_text.find("Passage A: green tea text");
  auto pos_b = prompt.user_text.find("Passage B: black tea text");
  REQUIRE(pos_a != std::string::npos);
  REQUIRE(pos_b != std::string::npos);
  CHECK(pos_a < pos_b);
  CHECK(prompt.user_text.find("Which passage is more relevant? (A/B)") != std::string::npos);

  auto swapped = build_pairwise_prompt(topic, items[1], items[0]);
  CHECK(swapped.user_text.find("Passage A: black tea text") != std::string::npos);

  CHECK(code_of([&] { build_pairwise_prompt(topic, items[0], items[0]); }) == Errc::IdenticalIds);
}

TEST_CASE("parse_ranking: strict grammar") {
  auto perm = parse_ranking("[4] > [2] > [1] > [3]", 4, ParseMode::strict);
  CHECK(perm.order == std::vector<int>{4, 2, 1, 3});
  CHECK(perm.complete(4));

  CHECK(parse_ranking(" [1] ", 1, ParseMode::strict).order == std::vector<int>{1});
  CHECK(parse_ranking("[2]>[1]", 2, ParseMode::strict).order == std::vector<int>{2, 1});
  CHECK(parse_ranking("\n[1] > [2]\n", 2, ParseMode::strict).order == std::vector<int>{1, 2});

  CHECK(code_of([&] { parse_ranking("[1] > [3]", 4, ParseMode::strict); }) == Errc::Incomplete);
  CHECK(code_of([&] { parse_ranking("[1] > [1]", 2, ParseMode::strict); }) == Errc::DuplicateId);
  CHECK(code_of([&] { parse_ranking("[1] > [5]", 4, ParseMode::strict); }) == Errc::OutOfRange);
  CHECK(code_of([&] { parse_ranking("ranking: [1] > [2]", 2, ParseMode::strict); }) == Errc::NoMatch);
  CHECK(code_of([&] { parse_ranking("[1] >", 2, ParseMode::strict); }) == Errc::NoMatch);
  CHECK(code_of([&] { parse_ranking("", 2, ParseMode::strict); }) == Errc::NoMatch);
}

TEST_CASE("parse_ranking: repair policy") {
  // dedupe first occurrence, drop out-of-range, append missing ascending
  CHECK(parse_ranking("[2] > [2] > [5]", 4, ParseMode::repair).order ==
        std::vector<int>{2, 1, 3, 4});
  CHECK(parse_ranking("I think [3] is best, then [1]. Hope this helps!", 4, ParseMode::repair).order ==
        std::vector<int>{3, 1, 2, 4});
  CHECK(parse_ranking("[ 2 ] > [1]", 2, ParseMode::repair).order == std::vector<int>{2, 1});
  CHECK(parse_ranking("[99999999999999999999] [2]", 3, ParseMode::repair).order ==
        std::vector<int>{2, 1, 3});
  CHECK(code_of([&] { parse_ranking("no identifiers at all", 3, ParseMode::repair); }) ==
        Errc::NoIdentifiersFound);
  CHECK(code_of([&] { parse_ranking("[9] [12]", 3, ParseMode::repair); }) ==
        Errc::NoIdentifiersFound);
}

TEST_CASE("parse_ranking round-trip property") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 300; ++trial) {
    int n = 1 + static_cast<int>(rng() % 12);
    auto ranks = testutil::random_permutation(n, rng);
    Permutation perm{std::vector<int>(ranks.begin(), ranks.end())};
    std::string rendered = render_ranking(perm);
    CHECK(parse_ranking(rendered, n, ParseMode::strict).order == perm.order);
    CHECK(parse_ranking(rendered, n, ParseMode::repair).order == perm.order);
    // trailing prose after a complete match is tolerated in repair mode
    CHECK(parse_ranking("  " + rendered + "  \nThat is my answer.", n, ParseMode::repair).order ==
          perm.order);
  }
}

TEST_CASE("parse_ranking repair completeness on fuzzed text") {
  std::mt19937_64 rng(17);
  const std::string alphabet = "[]>0123456789 abc\n,.";
  for (int trial = 0; trial < 500; ++trial) {
    int n = 2 + static_cast<int>(rng() % 9);
    std::string text;
    int len = static_cast<int>(rng() % 60);
    for (int i = 0; i < len; ++i) text.push_back(alphabet[rng() % alphabet.size()]);
    try {
      auto perm = parse_ranking(text, n, ParseMode::repair);
      CHECK(perm.complete(n));
    } catch (const Error& e) {
      CHECK(e.code() == Errc::NoIdentifiersFound);
    }
  }
}

TEST_CASE("parse_preference: strict and repair") {
  CHECK(parse_preference("B", ParseMode::strict) == Preference::B);
  CHECK(parse_preference("  A \n", ParseMode::strict) == Preference::A);
  CHECK(code_of([&] { parse_preference("a", ParseMode::strict); }) == Errc::NoPreferenceFound);
  CHECK(code_of([&] { parse_preference("A or B", ParseMode::strict); }) ==
        Errc::AmbiguousPreference);
  CHECK(code_of([&] { parse_preference("", ParseMode::strict); }) == Errc::NoPreferenceFound);
  CHECK(code_of([&] { parse_preference("", ParseMode::repair); }) == Errc::NoPreferenceFound);

  CHECK(parse_preference("Answer: A.", ParseMode::repair) == Preference::A);
  CHECK(parse_preference("passage b is more relevant", ParseMode::repair) == Preference::B);
  CHECK(parse_preference("'B'", ParseMode::repair) == Preference::B);
  CHECK(parse_preference("A or B", ParseMode::repair) == Preference::A);  // first token wins
  CHECK(code_of([&] { parse_preference("passage one", ParseMode::repair); }) ==
        Errc::NoPreferenceFound);
}
