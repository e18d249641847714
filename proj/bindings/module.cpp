// Python bindings for the core audit operations: the date-injection
// schedule, prompt construction, model-output parsing, and the rank/year
// shift metric suite.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "recbias/errors.hpp"
#include "recbias/injection.hpp"
#include "recbias/metrics.hpp"
#include "recbias/protocol.hpp"

namespace py = pybind11;
using namespace recbias;

namespace {

ParseMode mode_from(const std::string& mode) {
  if (mode == "strict") return ParseMode::strict;
  if (mode == "repair") return ParseMode::repair;
  raise(Errc::InvalidArgument, "mode must be 'strict' or 'repair'");
}

DateSchedule schedule_of(int newest_year, int step_years, const std::string& template_text,
                         const std::string& month_day) {
  DateSchedule schedule;
  schedule.newest_year = newest_year;
  schedule.step_years = step_years;
  schedule.template_text = template_text;
  schedule.month_day = month_day;
  schedule.validate();
  return schedule;
}

RankedList list_of(const std::vector<std::string>& ids) {
  RankedList list;
  list.topic_id = "py";
  for (std::size_t i = 0; i < ids.size(); ++i)
    list.entries.push_back(RunEntry{ids[i], static_cast<int>(i) + 1, 0.0});
  validate_ranked_list(list);
  return list;
}

/// Orderings plus the canonical year schedule applied to `before`.
PairedSerps serps_of(const std::vector<std::string>& before, const std::vector<std::string>& after,
                     int newest_year, int step_years) {
  PairedSerps serps;
  serps.topic_id = "py";
  serps.before = list_of(before);
  serps.after = list_of(after);
  const int n = static_cast<int>(before.size());
  DateSchedule schedule;
  schedule.newest_year = newest_year;
  schedule.step_years = step_years;
  for (int i = 1; i <= n; ++i)
    serps.injected_year[before[static_cast<std::size_t>(i - 1)]] = assigned_year(i, n, schedule);
  return serps;
}

std::vector<WindowItem> window_of(const std::vector<std::string>& texts) {
  std::vector<WindowItem> items;
  for (std::size_t i = 0; i < texts.size(); ++i)
    items.push_back(WindowItem{"p" + std::to_string(i + 1), texts[i], texts[i], std::nullopt});
  return items;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Recency-bias audit primitives: date-injection schedule, reranking prompts, "
            "model-output parsing, and rank/year shift metrics.";

  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    }
  });

  m.attr("__version__") = "0.1.0";
  m.attr("PROMPT_TEMPLATE_VERSION") = std::string(kPromptTemplateVersion);

  m.def(
      "assigned_year",
      [](int rank, int n, int newest_year, int step_years) {
        return assigned_year(rank, n, schedule_of(newest_year, step_years,
                                                  "Published on {DATE}. ", "01/01"));
      },
      py::arg("rank"), py::arg("n"), py::arg("newest_year") = 2025, py::arg("step_years") = 1,
      "Publication year injected at `rank` in a list of length n (deepest rank is newest).");

  m.def(
      "injected_years",
      [](int n, int newest_year, int step_years) {
        auto schedule =
            schedule_of(newest_year, step_years, "Published on {DATE}. ", "01/01");
        std::vector<int> years;
        for (int rank = 1; rank <= n; ++rank) years.push_back(assigned_year(rank, n, schedule));
        return years;
      },
      py::arg("n"), py::arg("newest_year") = 2025, py::arg("step_years") = 1,
      "Year per rank, 1..n.");

  m.def(
      "render_date_prefix",
      [](int year, const std::string& template_text, const std::string& month_day) {
        return render_prefix(year, schedule_of(year, 1, template_text, month_day));
      },
      py::arg("year"), py::arg("template_text") = "Published on {DATE}. ",
      py::arg("month_day") = "01/01", "The rendered passage prefix for a year.");

  m.def(
      "build_listwise_prompt",
      [](const std::string& query, const std::vector<std::string>& passages) {
        auto prompt = build_listwise_prompt(Topic{"py", query}, window_of(passages));
        return py::make_tuple(prompt.system_text, prompt.user_text);
      },
      py::arg("query"), py::arg("passages"),
      "(system, user) texts of the listwise reranking prompt.");

  m.def(
      "build_pairwise_prompt",
      [](const std::string& query, const std::string& passage_a, const std::string& passage_b) {
        auto items = window_of({passage_a, passage_b});
        auto prompt = build_pairwise_prompt(Topic{"py", query}, items[0], items[1]);
        return py::make_tuple(prompt.system_text, prompt.user_text);
      },
      py::arg("query"), py::arg("passage_a"), py::arg("passage_b"),
      "(system, user) texts of the A/B preference prompt.");

  m.def(
      "parse_ranking",
      [](const std::string& text, int n, const std::string& mode) {
        return parse_ranking(text, n, mode_from(mode)).order;
      },
      py::arg("text"), py::arg("n"), py::arg("mode") = "repair",
      "Window identifiers in preference order; repair mode always completes the permutation.");

  m.def(
      "parse_preference",
      [](const std::string& text, const std::string& mode) {
        return std::string(1, preference_letter(parse_preference(text, mode_from(mode))));
      },
      py::arg("text"), py::arg("mode") = "repair", "'A' or 'B'.");

  m.def(
      "render_ranking",
      [](const std::vector<int>& order) { return render_ranking(Permutation{order}); },
      py::arg("order"), "Render identifiers as '[i] > [j] > ...'.");

  m.def(
      "rank_shifts",
      [](const std::vector<std::string>& before, const std::vector<std::string>& after) {
        std::vector<std::pair<std::string, int>> out;
        for (const auto& s : rank_shifts(list_of(before), list_of(after)))
          out.emplace_back(s.passage_id, s.delta);
        return out;
      },
      py::arg("before"), py::arg("after"),
      "Per-passage rank delta (after minus before), ordered by before-rank.");

  m.def(
      "aars",
      [](const std::vector<std::string>& before, const std::vector<std::string>& after) {
        return aars(rank_shifts(list_of(before), list_of(after)));
      },
      py::arg("before"), py::arg("after"), "Absolute average rank shift.");

  m.def(
      "alrs",
      [](const std::vector<std::string>& before, const std::vector<std::string>& after) {
        return alrs(rank_shifts(list_of(before), list_of(after)));
      },
      py::arg("before"), py::arg("after"), "Absolute largest rank shift.");

  m.def(
      "kendall_tau",
      [](const std::vector<std::string>& before, const std::vector<std::string>& after) {
        return kendall_tau(list_of(before), list_of(after));
      },
      py::arg("before"), py::arg("after"), "No-ties Kendall rank correlation of two orderings.");

  m.def(
      "year_shift_topk",
      [](const std::vector<std::string>& before, const std::vector<std::string>& after, int k,
         int newest_year, int step_years) {
        return year_shift_topk(serps_of(before, after, newest_year, step_years), k);
      },
      py::arg("before"), py::arg("after"), py::arg("k"), py::arg("newest_year") = 2025,
      py::arg("step_years") = 1,
      "Mean injected-year change over the top-k after-reranking positions.");

  m.def(
      "year_shift_groups",
      [](const std::vector<std::string>& before, const std::vector<std::string>& after,
         int newest_year, int step_years) {
        return year_shift_groups(serps_of(before, after, newest_year, step_years));
      },
      py::arg("before"), py::arg("after"), py::arg("newest_year") = 2025,
      py::arg("step_years") = 1, "Year shift per rank decile.");

  m.def(
      "t_test_one_sample",
      [](const std::vector<double>& values, double mu0) {
        auto result = t_test_one_sample(values, mu0);
        return py::make_tuple(result.t, result.p, result.df);
      },
      py::arg("values"), py::arg("mu0") = 0.0,
      "Two-sided one-sample t-test: (t, p, df).");
}
