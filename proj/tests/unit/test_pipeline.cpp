#include <doctest.h>

#include <cmath>
#include <fstream>

#include "helpers.hpp"
#include "recbias/errors.hpp"
#include "recbias/pipeline.hpp"

using namespace recbias;
using testutil::TempDir;

namespace {

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

RunConfig small_demo(const std::filesystem::path& out, const std::string& kind = "identity") {
  RunConfig config = demo_config(RECBIAS_DEMO_DATA_DIR, out);
  config.backend.kind = kind;
  config.backend.lambda = 0;
  config.model_label = kind;
  return config;
}

}  // namespace

TEST_CASE("load_corpus wires the demo collection together") {
  TempDir out("corpus");
  RunConfig config = small_demo(out.path() / "run");
  LoadedCorpus corpus = load_corpus(config);
  CHECK(corpus.topics.size() == 5);
  CHECK(corpus.judged_runs.size() == 5);
  CHECK(corpus.passages.size() == 500);
  CHECK(corpus.qrels.size() == 150);
  CHECK(corpus.judged_runs.at("101").entries.size() == 100);
  CHECK(corpus.judged_runs.at("105").entries.size() == 80);
}

TEST_CASE("config JSON round-trip preserves the semantic hash") {
  TempDir out("cfg");
  RunConfig config = demo_config(RECBIAS_DEMO_DATA_DIR, out.path() / "run", 0.25, 9);
  auto json = config.to_json();
  RunConfig back = RunConfig::from_json(json);
  CHECK(back.hash() == config.hash());
  CHECK(back.backend.kind == "recency_greedy");
  CHECK(back.pairwise_choice().kind == "coin_flip");
  CHECK(back.metrics.ys_k == std::vector<int>{10, 20, 30, 50});

  // the hash ignores where inputs live, but not experiment parameters
  RunConfig moved = config;
  moved.paths.output = out.path() / "elsewhere";
  CHECK(moved.hash() == config.hash());
  RunConfig hotter = config;
  hotter.window.stride = 2;
  CHECK(hotter.hash() != config.hash());
}

TEST_CASE("config validation rejects bad values") {
  TempDir out("badcfg");
  RunConfig config = small_demo(out.path() / "run");
  config.metrics.ys_k = {30, 10};
  CHECK_THROWS_AS(config.validate(), Error);
  config = small_demo(out.path() / "run");
  config.backend.kind = "remote";  // remote without endpoint/model
  CHECK_THROWS_AS(config.validate(), Error);
  config = small_demo(out.path() / "run");
  config.paths.qrels = out.path() / "missing.txt";
  CHECK_THROWS_AS(config.validate_paths(), Error);
}

TEST_CASE("end-to-end identity run: pipeline files, null metrics, idempotent recompute") {
  TempDir out("identity");
  RunConfig config = small_demo(out.path() / "run");
  config.experiments.pairwise = false;  // listwise only, keep it quick
  RunPaths paths{config.paths.output};

  auto outcome = run_experiments(config, paths);
  CHECK(!outcome.interrupted);
  CHECK(outcome.failed_topics.empty());
  CHECK(outcome.completed_topics.size() == 5);
  compute_metrics(paths);
  render_report(paths);

  CHECK(std::filesystem::exists(paths.config_snapshot()));
  CHECK(std::filesystem::exists(paths.transcripts()));
  CHECK(std::filesystem::exists(paths.metrics_json()));
  CHECK(std::filesystem::exists(paths.report_md()));
  CHECK(std::filesystem::exists(paths.tau_svg()));
  CHECK(std::filesystem::exists(paths.dir / "tables.md"));

  auto metrics = nlohmann::json::parse(slurp(paths.metrics_json()));
  // identity backend: no shifts, tau 1, zero year movement everywhere
  CHECK(metrics["collection"]["maars"]["value"].get<double>() == 0.0);
  CHECK(metrics["collection"]["alrs_all"].get<int>() == 0);
  CHECK(metrics["collection"]["m_tau"]["value"].get<double>() == 1.0);
  for (const auto& [k, stat] : metrics["collection"]["m_ys"].items())
    CHECK(stat["value"].get<double>() == 0.0);

  // metrics recomputation is byte-stable
  auto first = slurp(paths.metrics_json());
  compute_metrics(paths);
  CHECK(slurp(paths.metrics_json()) == first);

  // a second run over the finished directory issues zero backend calls
  auto again = run_experiments(config, paths);
  CHECK(again.transport_calls == 0);
}

TEST_CASE("run directory rejects a different config") {
  TempDir out("mismatch");
  RunConfig config = small_demo(out.path() / "run");
  config.experiments.pairwise = false;
  RunPaths paths{config.paths.output};
  run_experiments(config, paths);

  RunConfig other = config;
  other.window.stride = 3;
  try {
    run_experiments(other, paths);
    FAIL("expected InvalidConfig");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::InvalidConfig);
  }
}

TEST_CASE("interrupted run resumes to the uninterrupted result") {
  TempDir out("resume");

  // uninterrupted reference
  RunConfig reference = small_demo(out.path() / "ref", "recency_greedy");
  reference.backend.lambda = 0.5;
  reference.model_label = "recency-greedy-0.50";
  auto ref_outcome = run_demo(reference);
  CHECK(!ref_outcome.interrupted);
  const auto total_calls = ref_outcome.transport_calls;
  CHECK(total_calls > 0);

  // same config, budget at half, then resume
  RunConfig budgeted = reference;
  budgeted.paths.output = out.path() / "cut";
  auto cut = run_demo(budgeted, total_calls / 2);
  CHECK(cut.interrupted);
  CHECK(cut.transport_calls == total_calls / 2);
  CHECK(!std::filesystem::exists(RunPaths{budgeted.paths.output}.metrics_json()));

  auto resumed = resume_run(RunPaths{budgeted.paths.output});
  CHECK(!resumed.interrupted);
  CHECK(resumed.transport_calls == total_calls - total_calls / 2);

  CHECK(slurp(RunPaths{budgeted.paths.output}.metrics_json()) ==
        slurp(RunPaths{reference.paths.output}.metrics_json()));
  CHECK(slurp(RunPaths{budgeted.paths.output}.dir / "tables.md") ==
        slurp(RunPaths{reference.paths.output}.dir / "tables.md"));
}

TEST_CASE("remote backend without credentials aborts before any work") {
  unsetenv("RECBIAS_API_KEY");
  TempDir out("nocred");
  RunConfig config = small_demo(out.path() / "run", "remote");
  config.backend.kind = "remote";
  config.backend.remote.endpoint = "http://localhost:9/v1/chat/completions";
  config.backend.remote.model = "some-model";
  config.experiments.pairwise = false;
  RunPaths paths{config.paths.output};
  try {
    run_experiments(config, paths);
    FAIL("expected AuthFailure");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::AuthFailure);
  }
  CHECK(!std::filesystem::exists(paths.transcripts()));
}

TEST_CASE("rendered table values agree with metrics.json at printed precision") {
  TempDir out("precision");
  RunConfig config = small_demo(out.path() / "run", "recency_greedy");
  config.backend.lambda = 0.5;
  config.model_label = "rg";
  auto outcome = run_demo(config);
  REQUIRE(!outcome.interrupted);
  RunPaths paths{config.paths.output};
  auto metrics = nlohmann::json::parse(slurp(paths.metrics_json()));

  // tables.csv prints 6-decimal values straight from the same aggregates
  std::ifstream csv(paths.dir / "tables.csv");
  std::string line;
  std::getline(csv, line);  // header
  std::map<std::string, double> csv_values;
  while (std::getline(csv, line)) {
    std::vector<std::string> cells;
    std::stringstream row(line);
    std::string cell;
    while (std::getline(row, cell, ',')) cells.push_back(cell);
    if (cells.size() >= 5 && !cells[4].empty())
      csv_values[cells[0] + "/" + cells[3]] = std::stod(cells[4]);
  }
  auto close_to = [&](const std::string& key, double expected) {
    REQUIRE(csv_values.count(key) == 1);
    // printed at 6 decimals, so agreement within half an ulp of that
    CHECK(std::fabs(csv_values.at(key) - expected) <= 5e-7);
  };
  close_to("rank_shift/maars", metrics["collection"]["maars"]["value"].get<double>());
  close_to("year_shift_topk/K=10", metrics["collection"]["m_ys"]["10"]["value"].get<double>());
  close_to("kendall_tau/mean_tau", metrics["collection"]["m_tau"]["value"].get<double>());
  close_to("reversal_rate/all", metrics["collection"]["rr"]["all"]["mean"]["value"].get<double>());
}

TEST_CASE("results are independent of worker count") {
  TempDir out("workers");
  RunConfig serial = small_demo(out.path() / "serial", "recency_greedy");
  serial.backend.lambda = 0.5;
  serial.workers = 1;
  RunConfig threaded = serial;
  threaded.paths.output = out.path() / "threaded";
  threaded.workers = 4;
  REQUIRE(!run_demo(serial).interrupted);
  REQUIRE(!run_demo(threaded).interrupted);
  CHECK(slurp(RunPaths{serial.paths.output}.metrics_json()) ==
        slurp(RunPaths{threaded.paths.output}.metrics_json()));
  CHECK(slurp(RunPaths{serial.paths.output}.dir / "tables.md") ==
        slurp(RunPaths{threaded.paths.output}.dir / "tables.md"));
}
