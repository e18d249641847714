#pragma once

#include <string>
#include <utility>
#include <vector>

#include "recbias/corpus.hpp"

namespace recbias {

/// Rank -> publication-year assignment rule plus the rendered prefix
/// template. The deepest rank carries newest_year; each higher rank is
/// step_years older.
struct DateSchedule {
  int newest_year = 2025;
  std::string month_day = "01/01";
  int step_years = 1;
  std::string template_text = "Published on {DATE}. ";

  void validate() const;
};

struct InjectedPassage {
  Passage passage;  // original, untouched
  int year = 0;
  std::string rendered_text;   // prefix + original text
  std::size_t prefix_length = 0;
};

/// Year for `rank` in a list of length n: newest_year - (n - rank) * step.
int assigned_year(int rank, int n, const DateSchedule& schedule);

/// `YYYY/MM/DD`, zero-padded.
std::string render_date(int year, const DateSchedule& schedule);

/// Template with {DATE} filled in.
std::string render_prefix(int year, const DateSchedule& schedule);

InjectedPassage inject_passage(const Passage& passage, int year, const DateSchedule& schedule);

/// Date every passage of the list in rank order: rank 1 oldest, rank N
/// newest.
std::vector<InjectedPassage> inject_listwise(const RankedList& list, const PassageStore& passages,
                                             const DateSchedule& schedule);

/// The preferred passage gets old_year, the other fresh_year.
std::pair<InjectedPassage, InjectedPassage> inject_pairwise(const Passage& preferred,
                                                            const Passage& other,
                                                            const DateSchedule& schedule,
                                                            int old_year = 1980,
                                                            int fresh_year = 2025);

/// Recover the original passage; the prefix length is known, not searched,
/// so passages that themselves start with the template text survive.
Passage strip_prefix(const InjectedPassage& injected);

}  // namespace recbias
