#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "recbias/errors.hpp"
#include "recbias/metrics.hpp"

using namespace recbias;
using testutil::RankPermutation;
using testutil::serps_from_permutation;

namespace {

RankedList list_from_ids(const std::vector<std::string>& ids) {
  RankedList list;
  list.topic_id = "t";
  for (std::size_t i = 0; i < ids.size(); ++i)
    list.entries.push_back(RunEntry{ids[i], static_cast<int>(i) + 1, 0.0});
  return list;
}

}  // namespace

TEST_CASE("rank_shifts: identity, small example, full reversal") {
  auto before = list_from_ids({"a", "b", "c"});
  auto shifts_id = rank_shifts(before, before);
  for (const auto& s : shifts_id) CHECK(s.delta == 0);

  // before=(a,b,c), after=(c,a,b): a +1, b +1, c -2 (hand traced)
  auto after = list_from_ids({"c", "a", "b"});
  auto shifts = rank_shifts(before, after);
  REQUIRE(shifts.size() == 3);
  CHECK(shifts[0].passage_id == "a");
  CHECK(shifts[0].delta == +1);
  CHECK(shifts[1].delta == +1);
  CHECK(shifts[2].delta == -2);
  CHECK(aars(shifts) == doctest::Approx(4.0 / 3.0));
  CHECK(alrs(shifts) == 2);

  // full reversal N=100: delta at before-rank i is 101-2i
  std::vector<std::string> ids, rev;
  for (int i = 1; i <= 100; ++i) ids.push_back("p" + std::to_string(i));
  rev.assign(ids.rbegin(), ids.rend());
  auto shifts_rev = rank_shifts(list_from_ids(ids), list_from_ids(rev));
  for (int i = 1; i <= 100; ++i)
    CHECK(shifts_rev[static_cast<std::size_t>(i - 1)].delta == 101 - 2 * i);
  CHECK(aars(shifts_rev) == doctest::Approx(50.0));
  CHECK(alrs(shifts_rev) == 99);
}

TEST_CASE("rank_shifts rejects mismatched id sets") {
  CHECK_THROWS_AS(rank_shifts(list_from_ids({"a", "b"}), list_from_ids({"a", "c"})), Error);
  CHECK_THROWS_AS(rank_shifts(list_from_ids({"a", "b"}), list_from_ids({"a"})), Error);
}

TEST_CASE("aars/alrs invariant under id relabeling") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    int n = 2 + static_cast<int>(rng() % 30);
    auto perm = testutil::random_permutation(n, rng);
    std::vector<std::string> before_ids, after_ids(static_cast<std::size_t>(n));
    std::vector<std::string> relabeled_before, relabeled_after(static_cast<std::size_t>(n));
    for (int i = 1; i <= n; ++i) {
      before_ids.push_back("p" + std::to_string(i));
      relabeled_before.push_back("zz" + std::to_string(i * 7));
      after_ids[static_cast<std::size_t>(perm[static_cast<std::size_t>(i - 1)] - 1)] =
          "p" + std::to_string(i);
      relabeled_after[static_cast<std::size_t>(perm[static_cast<std::size_t>(i - 1)] - 1)] =
          "zz" + std::to_string(i * 7);
    }
    auto s1 = rank_shifts(list_from_ids(before_ids), list_from_ids(after_ids));
    auto s2 = rank_shifts(list_from_ids(relabeled_before), list_from_ids(relabeled_after));
    CHECK(aars(s1) == aars(s2));
    CHECK(alrs(s1) == alrs(s2));
  }
}

TEST_CASE("maars and alrs_all") {
  CHECK(maars({2.0, 4.0}) == doctest::Approx(3.0));
  CHECK(alrs_all({10, 95, 3}) == 95);
  CHECK_THROWS_AS(maars({}), Error);
  CHECK_THROWS_AS(alrs_all({}), Error);
}

TEST_CASE("year shift: identity and full reversal closed forms") {
  auto identity = serps_from_permutation([] {
    RankPermutation p(100);
    for (int i = 0; i < 100; ++i) p[static_cast<std::size_t>(i)] = i + 1;
    return p;
  }());
  for (int k : {1, 10, 50, 100}) CHECK(year_shift_topk(identity, k) == doctest::Approx(0.0));
  for (double g : year_shift_groups(identity)) CHECK(g == doctest::Approx(0.0));

  auto reversed = serps_from_permutation(testutil::reversal(100));
  CHECK(year_shift_topk(reversed, 10) == doctest::Approx(90.0));
  auto groups = year_shift_groups(reversed);
  REQUIRE(groups.size() == 10);
  std::vector<double> expected{90, 70, 50, 30, 10, -10, -30, -50, -70, -90};
  for (std::size_t g = 0; g < 10; ++g) CHECK(groups[g] == doctest::Approx(expected[g]));
}

TEST_CASE("year shift matches the brute-force oracle on random permutations") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 50; ++trial) {
    int n = 10 + static_cast<int>(rng() % 91);
    auto perm = testutil::random_permutation(n, rng);
    auto serps = serps_from_permutation(perm);
    int k = 1 + static_cast<int>(rng() % n);
    CHECK(year_shift_topk(serps, k) == testutil::oracle::year_shift_topk(perm, k));
    auto lib = year_shift_groups(serps);
    auto orc = testutil::oracle::year_shift_groups(perm);
    REQUIRE(lib.size() == orc.size());
    for (std::size_t g = 0; g < lib.size(); ++g) CHECK(lib[g] == orc[g]);
  }
}

TEST_CASE("year conservation across groups and whole list") {
  std::mt19937_64 rng(37);
  for (int trial = 0; trial < 30; ++trial) {
    auto perm = testutil::random_permutation(100, rng);
    auto serps = serps_from_permutation(perm);
    auto groups = year_shift_groups(serps);
    auto sizes = decile_group_sizes(100);
    double total = 0;
    for (std::size_t g = 0; g < groups.size(); ++g) total += sizes[g] * groups[g];
    CHECK(total == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(year_shift_topk(serps, 100) == doctest::Approx(0.0).epsilon(1e-12));
    // first decile coincides with top-10
    CHECK(groups[0] == year_shift_topk(serps, 10));
  }
  // partial final group still conserves years
  for (int n : {73, 95, 101 - 7}) {
    auto perm = testutil::random_permutation(n, rng);
    auto serps = serps_from_permutation(perm);
    auto groups = year_shift_groups(serps);
    auto sizes = decile_group_sizes(n);
    REQUIRE(groups.size() == sizes.size());
    double total = 0;
    for (std::size_t g = 0; g < groups.size(); ++g) total += sizes[g] * groups[g];
    CHECK(total == doctest::Approx(0.0).epsilon(1e-12));
  }
}

TEST_CASE("year shift bounds checking") {
  auto serps = serps_from_permutation(testutil::reversal(20));
  CHECK_THROWS_AS(year_shift_topk(serps, 0), Error);
  CHECK_THROWS_AS(year_shift_topk(serps, 21), Error);
  auto tiny = serps_from_permutation(testutil::reversal(9));
  CHECK_THROWS_AS(year_shift_groups(tiny), Error);
}

TEST_CASE("kendall tau: closed forms and the O(n^2) oracle") {
  auto abc = list_from_ids({"a", "b", "c"});
  CHECK(kendall_tau(abc, abc) == doctest::Approx(1.0));
  CHECK(kendall_tau(abc, list_from_ids({"c", "b", "a"})) == doctest::Approx(-1.0));
  // (a,b,c) vs (b,a,c): one discordant pair of three -> 1/3
  CHECK(kendall_tau(abc, list_from_ids({"b", "a", "c"})) == doctest::Approx(1.0 / 3.0));

  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 60; ++trial) {
    int n = 2 + static_cast<int>(rng() % 99);
    auto perm = testutil::random_permutation(n, rng);
    auto serps = serps_from_permutation(perm);
    double lib = kendall_tau(serps.before, serps.after);
    double orc = testutil::oracle::kendall_tau(perm);
    CHECK(lib == doctest::Approx(orc).epsilon(1e-13));
    // symmetry
    CHECK(kendall_tau(serps.after, serps.before) == doctest::Approx(lib).epsilon(1e-13));
  }
}

TEST_CASE("t-test: reference fixture, symmetry, error paths") {
  // frozen from an independent statistics package
  auto result = t_test_one_sample({1, 2, 3, 4, 5}, 0.0);
  CHECK(result.t == doctest::Approx(4.242640687119285).epsilon(1e-12));
  CHECK(result.df == 4);
  CHECK(result.p == doctest::Approx(0.013235599563682695).epsilon(1e-9));

  auto symmetric = t_test_one_sample({-1.0, 1.0}, 0.0);
  CHECK(symmetric.t == doctest::Approx(0.0));
  CHECK(symmetric.p == doctest::Approx(1.0));

  try {
    t_test_one_sample({2.0, 2.0, 2.0}, 2.0);
    FAIL("expected ZeroVariance");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::ZeroVariance);
  }
  try {
    t_test_one_sample({1.0}, 0.0);
    FAIL("expected TooFewSamples");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::TooFewSamples);
  }
}

namespace {

PairTrial trial_of(const std::string& topic, int level, bool reversed, bool excluded = false) {
  static int counter = 0;
  PairTrial trial;
  trial.topic_id = topic;
  trial.level = level;
  trial.passage_a = "a" + std::to_string(counter);
  trial.passage_b = "b" + std::to_string(counter);
  ++counter;
  trial.round1 = Preference::A;
  trial.round2 = reversed ? Preference::B : Preference::A;
  trial.reversed = reversed;
  trial.excluded = excluded;
  return trial;
}

}  // namespace

TEST_CASE("reversal rates: counting, means, maxima, exclusions") {
  // one topic, 4 trials, 1 reversed -> RR 0.25
  std::vector<PairTrial> trials;
  for (int i = 0; i < 3; ++i) trials.push_back(trial_of("t1", 0, false));
  trials.push_back(trial_of("t1", 0, true));
  auto summary = reversal_rates(trials);
  CHECK(summary.by_level.at(0).mean_rr.value == doctest::Approx(0.25));
  CHECK(summary.pooled.mean_rr.value == doctest::Approx(0.25));

  // two topics with RR 0.2 and 0.4 -> mean 0.3, max 0.4
  trials.clear();
  for (int i = 0; i < 5; ++i) trials.push_back(trial_of("t1", 1, i < 1));
  for (int i = 0; i < 5; ++i) trials.push_back(trial_of("t2", 1, i < 2));
  summary = reversal_rates(trials);
  CHECK(summary.by_level.at(1).mean_rr.value == doctest::Approx(0.3));
  CHECK(summary.by_level.at(1).max_rr == doctest::Approx(0.4));
  CHECK(summary.by_level.at(1).mean_rr.n == 2);

  // excluded trials leave the denominator but stay in raw counts
  trials.push_back(trial_of("t1", 1, false, true));
  summary = reversal_rates(trials);
  CHECK(summary.by_level.at(1).mean_rr.value == doctest::Approx(0.3));
  CHECK(summary.by_level.at(1).raw == 11);
  CHECK(summary.by_level.at(1).evaluated == 10);

  // a level with zero evaluated pairs reports no mean (n = 0)
  trials.clear();
  trials.push_back(trial_of("t1", 2, false, true));
  summary = reversal_rates(trials);
  CHECK(summary.by_level.at(2).mean_rr.n == 0);
  CHECK(summary.by_level.at(2).evaluated == 0);
}

TEST_CASE("collection aggregation and metrics JSON round-trip") {
  std::mt19937_64 rng(53);
  std::vector<ListwiseTopicMetrics> topics;
  std::vector<PairTrial> trials;
  for (int t = 0; t < 4; ++t) {
    int n = 20 + t * 5;
    auto perm = testutil::random_permutation(n, rng);
    auto serps = serps_from_permutation(perm);
    serps.topic_id = "t" + std::to_string(t);
    topics.push_back(compute_listwise_topic_metrics(serps, {10, 20}));
    for (int i = 0; i < 6; ++i)
      trials.push_back(trial_of("t" + std::to_string(t), i % 3, (i + t) % 2 == 0));
  }
  CollectionMetrics collection = aggregate_listwise(topics);
  collection.rr = reversal_rates(trials);
  CHECK(collection.topic_count == 4);
  CHECK(collection.m_ys.count(10) == 1);
  CHECK(collection.m_ys.at(10).n == 4);

  auto json = to_json(collection);
  auto back = collection_metrics_from_json(json);
  CHECK(back == collection);
  // serialized bytes are stable too
  CHECK(to_json(back).dump() == json.dump());
}
