#include "recbias/injection.hpp"

#include <cctype>
#include <cstdio>

#include "recbias/errors.hpp"

namespace recbias {

namespace {
constexpr std::string_view kPlaceholder = "{DATE}";

std::size_t count_placeholders(std::string_view tpl) {
  std::size_t count = 0;
  std::size_t pos = 0;
  while ((pos = tpl.find(kPlaceholder, pos)) != std::string_view::npos) {
    ++count;
    pos += kPlaceholder.size();
  }
  return count;
}
}  // namespace

void DateSchedule::validate() const {
  if (step_years < 1) raise(Errc::InvalidArgument, "step_years must be positive");
  if (count_placeholders(template_text) != 1)
    raise(Errc::BadTemplate, "template must contain exactly one {DATE} placeholder");
  if (month_day.size() != 5 || month_day[2] != '/' || !isdigit(month_day[0]) ||
      !isdigit(month_day[1]) || !isdigit(month_day[3]) || !isdigit(month_day[4]))
    raise(Errc::InvalidArgument, "month_day must look like MM/DD");
}

int assigned_year(int rank, int n, const DateSchedule& schedule) {
  if (rank < 1 || rank > n)
    raise(Errc::RankOutOfBounds,
          "rank " + std::to_string(rank) + " outside 1.." + std::to_string(n));
  long year = static_cast<long>(schedule.newest_year) -
              static_cast<long>(n - rank) * schedule.step_years;
  if (year <= 0)
    raise(Errc::NonPositiveYear, "assigned year " + std::to_string(year) + " for rank " +
                                     std::to_string(rank) + " of " + std::to_string(n));
  return static_cast<int>(year);
}

std::string render_date(int year, const DateSchedule& schedule) {
  if (year <= 0) raise(Errc::NonPositiveYear, "year must be positive");
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d/%s", year, schedule.month_day.c_str());
  return buf;
}

std::string render_prefix(int year, const DateSchedule& schedule) {
  schedule.validate();
  std::string out = schedule.template_text;
  auto pos = out.find(kPlaceholder);
  out.replace(pos, kPlaceholder.size(), render_date(year, schedule));
  return out;
}

InjectedPassage inject_passage(const Passage& passage, int year, const DateSchedule& schedule) {
  std::string prefix = render_prefix(year, schedule);
  InjectedPassage out;
  out.passage = passage;
  out.year = year;
  out.prefix_length = prefix.size();
  out.rendered_text = std::move(prefix) + passage.text;
  return out;
}

std::vector<InjectedPassage> inject_listwise(const RankedList& list, const PassageStore& passages,
                                             const DateSchedule& schedule) {
  const int n = static_cast<int>(list.entries.size());
  std::vector<InjectedPassage> out;
  out.reserve(list.entries.size());
  for (const auto& entry : list.entries) {
    const Passage& passage = passages.at(entry.passage_id);
    out.push_back(inject_passage(passage, assigned_year(entry.rank, n, schedule), schedule));
  }
  return out;
}

std::pair<InjectedPassage, InjectedPassage> inject_pairwise(const Passage& preferred,
                                                            const Passage& other,
                                                            const DateSchedule& schedule,
                                                            int old_year, int fresh_year) {
  if (preferred.id == other.id)
    raise(Errc::IdenticalIds, "pairwise injection needs two distinct passages");
  return {inject_passage(preferred, old_year, schedule),
          inject_passage(other, fresh_year, schedule)};
}

Passage strip_prefix(const InjectedPassage& injected) {
  if (injected.prefix_length > injected.rendered_text.size() ||
      injected.rendered_text.substr(injected.prefix_length) != injected.passage.text)
    raise(Errc::PrefixMismatch, "rendered text does not carry the expected prefix for passage " +
                                    injected.passage.id);
  Passage out = injected.passage;
  out.text = injected.rendered_text.substr(injected.prefix_length);
  return out;
}

}  // namespace recbias
