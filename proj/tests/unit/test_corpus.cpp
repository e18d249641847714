#include <doctest.h>

#include <random>
#include <sstream>

#include "helpers.hpp"
#include "recbias/corpus.hpp"
#include "recbias/errors.hpp"

using namespace recbias;
using testutil::TempDir;
using testutil::write_file;

namespace {

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

TEST_CASE("load_run maps fields and recomputes ranks from scores") {
  TempDir dir("run");
  auto path = write_file(dir.path(), "run.txt",
                         "2082 Q0 msmarco_passage_01_100 1 15.2 bm25\n"
                         "2082 Q0 msmarco_passage_01_200 2 14.8 bm25\n");
  auto runs = load_run(path);
  REQUIRE(runs.size() == 1);
  const auto& list = runs.at("2082");
  CHECK(list.entries[0].passage_id == "msmarco_passage_01_100");
  CHECK(list.entries[0].rank == 1);
  CHECK(list.entries[0].score == doctest::Approx(15.2));
  CHECK(list.entries[1].rank == 2);
}

TEST_CASE("load_run ignores the advisory rank column") {
  TempDir dir("run");
  // ranks listed 1,2,2 but scores disagree; docids distinct so no duplicate
  auto path = write_file(dir.path(), "run.txt",
                         "q1 Q0 d_low 1 1.0 tag\n"
                         "q1 Q0 d_high 2 9.0 tag\n"
                         "q1 Q0 d_mid 2 5.0 tag\n");
  auto list = load_run(path).at("q1");
  CHECK(list.entries[0].passage_id == "d_high");
  CHECK(list.entries[1].passage_id == "d_mid");
  CHECK(list.entries[2].passage_id == "d_low");
  for (std::size_t i = 0; i < list.entries.size(); ++i)
    CHECK(list.entries[i].rank == static_cast<int>(i) + 1);
}

TEST_CASE("load_run ties break by ascending docid") {
  TempDir dir("run");
  auto path = write_file(dir.path(), "run.txt",
                         "q1 Q0 zz 1 5.0 tag\n"
                         "q1 Q0 aa 2 5.0 tag\n");
  auto list = load_run(path).at("q1");
  CHECK(list.entries[0].passage_id == "aa");
  CHECK(list.entries[1].passage_id == "zz");
}

TEST_CASE("load_run error paths") {
  TempDir dir("run");
  CHECK(code_of([&] { load_run(write_file(dir.path(), "a.txt", "q1 Q0 d1 1 bad_score tag\n")); }) ==
        Errc::MalformedLine);
  CHECK(code_of([&] { load_run(write_file(dir.path(), "b.txt", "q1 Q0 d1 1 1.0\n")); }) ==
        Errc::MalformedLine);
  CHECK(code_of([&] {
          load_run(write_file(dir.path(), "c.txt", "q1 Q0 d1 1 1.0 t\nq1 Q0 d1 2 0.5 t\n"));
        }) == Errc::DuplicateEntry);
  CHECK(code_of([&] { load_run(write_file(dir.path(), "d.txt", "\n\n")); }) == Errc::EmptyInput);
}

TEST_CASE("load_run reports the offending line number") {
  TempDir dir("run");
  try {
    load_run(write_file(dir.path(), "run.txt", "q1 Q0 d1 1 1.0 t\nq1 Q0 d2 oops 2.0 t\n"));
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("run.txt:2") != std::string::npos);
  }
}

TEST_CASE("interleaved topics come back rank-contiguous") {
  // Oracle: sort each topic's lines by score descending and compare ids.
  TempDir dir("run");
  std::mt19937_64 rng(7);
  std::ostringstream file;
  std::vector<std::pair<double, std::string>> t1, t2;
  for (int i = 0; i < 20; ++i) {
    double s1 = static_cast<double>(rng() % 10000) / 100.0;
    double s2 = static_cast<double>(rng() % 10000) / 100.0;
    t1.emplace_back(s1, "a" + std::to_string(i));
    t2.emplace_back(s2, "b" + std::to_string(i));
    file << "t1 Q0 a" << i << " " << (i + 1) << " " << s1 << " x\n";
    file << "t2 Q0 b" << i << " " << (i + 1) << " " << s2 << " x\n";
  }
  auto runs = load_run(write_file(dir.path(), "run.txt", file.str()));
  REQUIRE(runs.size() == 2);
  auto check_topic = [&](const std::string& qid, std::vector<std::pair<double, std::string>> lines) {
    std::sort(lines.begin(), lines.end(), [](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first > b.first;
      return a.second < b.second;
    });
    const auto& list = runs.at(qid);
    validate_ranked_list(list);
    for (std::size_t i = 0; i < lines.size(); ++i)
      CHECK(list.entries[i].passage_id == lines[i].second);
  };
  check_topic("t1", t1);
  check_topic("t2", t2);
}

TEST_CASE("load_run round-trips through write_run") {
  TempDir dir("run");
  auto path = write_file(dir.path(), "run.txt",
                         "q2 Q0 d3 1 3.5 t\nq2 Q0 d1 2 2.25 t\nq1 Q0 d9 1 1.125 t\n");
  auto runs = load_run(path);
  write_run(runs, dir.path() / "copy.txt", "t");
  auto reloaded = load_run(dir.path() / "copy.txt");
  REQUIRE(reloaded.size() == runs.size());
  for (const auto& [qid, list] : runs) {
    const auto& other = reloaded.at(qid);
    REQUIRE(other.entries.size() == list.entries.size());
    for (std::size_t i = 0; i < list.entries.size(); ++i) {
      CHECK(other.entries[i].passage_id == list.entries[i].passage_id);
      CHECK(other.entries[i].rank == list.entries[i].rank);
      CHECK(other.entries[i].score == doctest::Approx(list.entries[i].score));
    }
  }
}

TEST_CASE("qrels: mapping, duplicates, grade bounds") {
  TempDir dir("qrels");
  auto qrels = load_qrels(write_file(dir.path(), "q.txt", "2082 0 d7 2\n2082 0 d8 3\n"));
  CHECK(qrels.grade("2082", "d7") == 2);
  CHECK(qrels.grade("2082", "d8") == 3);  // boundary of the default 0..3 scale
  CHECK(!qrels.grade("2082", "nope").has_value());

  CHECK(code_of([&] {
          load_qrels(write_file(dir.path(), "dup.txt", "q 0 d 1\nq 0 d 2\n"));
        }) == Errc::DuplicateJudgment);
  CHECK(code_of([&] { load_qrels(write_file(dir.path(), "oob.txt", "q 0 d 4\n")); }) ==
        Errc::GradeOutOfRange);
  CHECK(code_of([&] { load_qrels(write_file(dir.path(), "neg.txt", "q 0 d -1\n")); }) ==
        Errc::MalformedLine);
  CHECK(code_of([&] { load_qrels(write_file(dir.path(), "short.txt", "q 0 d\n")); }) ==
        Errc::MalformedLine);
}

TEST_CASE("passages: tab split, duplicates, utf-8") {
  TempDir dir("pass");
  auto store = load_passages(
      write_file(dir.path(), "p.tsv", "d1\thello world\nd2\ttext\twith\tinternal tabs\n"));
  CHECK(store.at("d1").text == "hello world");
  CHECK(store.at("d2").text == "text\twith\tinternal tabs");  // verbatim after first tab

  CHECK(code_of([&] { load_passages(write_file(dir.path(), "no_tab.tsv", "d1 no tab here\n")); }) ==
        Errc::MalformedLine);
  CHECK(code_of([&] {
          load_passages(write_file(dir.path(), "dup.tsv", "d1\ta\nd1\tb\n"));
        }) == Errc::DuplicatePassage);
  CHECK(code_of([&] {
          load_passages(write_file(dir.path(), "bad.tsv", std::string("d1\t") + char(0xC0) + "\n"));
        }) == Errc::InvalidUtf8);
  CHECK(code_of([&] { load_passages(write_file(dir.path(), "empty.tsv", "")); }) == Errc::EmptyInput);

  // multi-byte utf-8 passes
  auto utf = load_passages(write_file(dir.path(), "utf.tsv", "d1\tcaf\xC3\xA9 r\xC3\xA9sum\xC3\xA9\n"));
  CHECK(utf.at("d1").text == "caf\xC3\xA9 r\xC3\xA9sum\xC3\xA9");
}

TEST_CASE("topics loader") {
  TempDir dir("topics");
  auto topics = load_topics(write_file(dir.path(), "t.tsv", "q1\twhat is foo\nq2\tbar baz\n"));
  CHECK(topics.at("q1").text == "what is foo");
  CHECK(code_of([&] { load_topics(write_file(dir.path(), "dup.tsv", "q1\ta\nq1\tb\n")); }) ==
        Errc::DuplicateEntry);
}

TEST_CASE("filter_judged_topics is set intersection") {
  RunMap runs;
  for (const std::string& qid : {"a", "b", "c"}) {
    RankedList list;
    list.topic_id = qid;
    list.entries.push_back(RunEntry{"d1", 1, 1.0});
    runs[qid] = list;
  }
  Qrels qrels(3);
  qrels.add("b", "d1", 1);
  qrels.add("c", "d1", 0);
  qrels.add("d", "d1", 2);

  auto kept = filter_judged_topics(runs, qrels);
  CHECK(kept.size() == 2);
  CHECK(kept.count("b") == 1);
  CHECK(kept.count("c") == 1);

  // qrels covering all run topics -> identity
  Qrels all(3);
  for (const std::string& qid : {"a", "b", "c"}) all.add(qid, "d1", 1);
  CHECK(filter_judged_topics(runs, all).size() == runs.size());

  Qrels disjoint(3);
  disjoint.add("zz", "d1", 1);
  CHECK(code_of([&] { filter_judged_topics(runs, disjoint); }) == Errc::EmptyIntersection);
}

TEST_CASE("judged-topic selection on a DL21-shaped fixture: 60 run topics, 53 judged") {
  TempDir dir("dl21");
  std::ostringstream run_file, qrels_file;
  for (int t = 1; t <= 60; ++t) {
    run_file << "q" << t << " Q0 d" << t << " 1 1.0 bm25\n";
    if (t <= 53) qrels_file << "q" << t << " 0 d" << t << " 1\n";
  }
  auto runs = load_run(write_file(dir.path(), "run.txt", run_file.str()));
  auto qrels = load_qrels(write_file(dir.path(), "qrels.txt", qrels_file.str()));
  CHECK(filter_judged_topics(runs, qrels).size() == 53);
}

TEST_CASE("truncate_top_k") {
  RankedList list;
  list.topic_id = "q";
  for (int i = 1; i <= 200; ++i) list.entries.push_back(RunEntry{"d" + std::to_string(i), i, 200.0 - i});

  auto top100 = truncate_top_k(list, 100);
  CHECK(top100.entries.size() == 100);
  CHECK(top100.entries.back().rank == 100);

  RankedList short_list;
  short_list.topic_id = "q";
  for (int i = 1; i <= 50; ++i) short_list.entries.push_back(RunEntry{"d" + std::to_string(i), i, 1.0});
  CHECK(truncate_top_k(short_list, 100).entries.size() == 50);

  CHECK(truncate_top_k(list, 1).entries.size() == 1);
  CHECK(truncate_top_k(list, 1).entries[0].passage_id == "d1");
  CHECK(code_of([&] { truncate_top_k(list, 0); }) == Errc::InvalidArgument);
}

TEST_CASE("every corpus operation yields contiguous ranks (random property)") {
  std::mt19937_64 rng(42);
  TempDir dir("prop");
  for (int trial = 0; trial < 25; ++trial) {
    int n = 1 + static_cast<int>(rng() % 40);
    std::ostringstream file;
    for (int i = 0; i < n; ++i)
      file << "q Q0 d" << i << " " << (i + 1) << " " << (rng() % 1000) / 10.0 << " t\n";
    auto runs = load_run(write_file(dir.path(), "r" + std::to_string(trial) + ".txt", file.str()));
    for (const auto& [qid, list] : runs) {
      validate_ranked_list(list);
      auto truncated = truncate_top_k(list, 1 + rng() % 50);
      validate_ranked_list(truncated);
    }
  }
}
