#include "recbias/report.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "recbias/errors.hpp"

namespace recbias {

std::string format_fixed(double value, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, value);
  // Avoid the "-0.0000" artifact.
  if (buf[0] == '-') {
    bool all_zero = true;
    for (const char* c = buf + 1; *c; ++c)
      if (*c != '0' && *c != '.') all_zero = false;
    if (all_zero) return buf + 1;
  }
  return buf;
}

std::string format_signed(double value, int decimals) {
  std::string body = format_fixed(value, decimals);
  if (!body.empty() && body[0] != '-') return "+" + body;
  return body;
}

namespace {

std::string star(const MeanStat& stat) { return stat.significant() ? "*" : ""; }

/// Year-shift cell: sign-explicit, bold when positive, `*` when p < 0.05.
std::string year_cell(const MeanStat& stat) {
  std::string value = format_signed(stat.value, 3);
  bool positive = stat.value > 0;
  std::string cell = positive ? "**" + value + "**" : value;
  return cell + star(stat);
}

std::string md_row(const std::vector<std::string>& cells) {
  std::string out = "|";
  for (const auto& cell : cells) out += " " + cell + " |";
  return out + "\n";
}

std::string md_separator(std::size_t n) {
  std::string out = "|";
  for (std::size_t i = 0; i < n; ++i) out += " --- |";
  return out + "\n";
}

std::vector<std::string> sorted_collections(const std::vector<ReportRow>& rows) {
  std::vector<std::string> out;
  for (const auto& row : rows)
    if (std::find(out.begin(), out.end(), row.collection) == out.end())
      out.push_back(row.collection);
  return out;
}

std::vector<std::string> ordered_models(const std::vector<ReportRow>& rows) {
  std::vector<std::string> out;
  for (const auto& row : rows)
    if (std::find(out.begin(), out.end(), row.model) == out.end()) out.push_back(row.model);
  return out;
}

const ReportRow* find_row(const std::vector<ReportRow>& rows, const std::string& model,
                          const std::string& collection) {
  for (const auto& row : rows)
    if (row.model == model && row.collection == collection) return &row;
  return nullptr;
}

std::string group_header(std::size_t g) {
  return std::to_string(10 * g + 1) + "-" + std::to_string(10 * g + 10);
}

}  // namespace

std::string render_rank_shift_table(const std::vector<ReportRow>& rows) {
  auto collections = sorted_collections(rows);
  std::vector<std::string> header{"Model"};
  for (const auto& c : collections) {
    header.push_back("mAARS (" + c + ")");
    header.push_back("ALRS_all (" + c + ")");
  }
  std::string out = md_row(header) + md_separator(header.size());
  for (const auto& model : ordered_models(rows)) {
    std::vector<std::string> cells{model};
    for (const auto& c : collections) {
      const ReportRow* row = find_row(rows, model, c);
      if (!row) {
        cells.push_back("-");
        cells.push_back("-");
        continue;
      }
      cells.push_back(format_fixed(row->metrics.maars_stat.value, 4) + star(row->metrics.maars_stat));
      cells.push_back(std::to_string(row->metrics.alrs_all_value));
    }
    out += md_row(cells);
  }
  return out;
}

std::string render_year_shift_topk_table(const std::vector<ReportRow>& rows) {
  std::vector<int> ks;
  for (const auto& row : rows)
    for (const auto& [k, _] : row.metrics.m_ys)
      if (std::find(ks.begin(), ks.end(), k) == ks.end()) ks.push_back(k);
  std::sort(ks.begin(), ks.end());

  std::vector<std::string> header{"Model", "Collection"};
  for (std::size_t i = 0; i < ks.size(); ++i)
    header.push_back(i == 0 ? "K = " + std::to_string(ks[i]) : std::to_string(ks[i]));
  std::string out = md_row(header) + md_separator(header.size());
  for (const auto& row : rows) {
    std::vector<std::string> cells{row.model, row.collection};
    for (int k : ks) {
      auto it = row.metrics.m_ys.find(k);
      if (it == row.metrics.m_ys.end()) {
        cells.push_back("-");
      } else {
        cells.push_back(format_fixed(it->second.value, 3) + star(it->second));
      }
    }
    out += md_row(cells);
  }
  return out;
}

std::string render_year_shift_groups_table(const std::vector<ReportRow>& rows) {
  std::size_t groups = 0;
  for (const auto& row : rows) groups = std::max(groups, row.metrics.m_ysg.size());
  std::vector<std::string> header{"Model", "Collection"};
  for (std::size_t g = 0; g < groups; ++g) header.push_back(group_header(g));
  std::string out = md_row(header) + md_separator(header.size());
  for (const auto& row : rows) {
    std::vector<std::string> cells{row.model, row.collection};
    for (std::size_t g = 0; g < groups; ++g) {
      if (g < row.metrics.m_ysg.size())
        cells.push_back(year_cell(row.metrics.m_ysg[g]));
      else
        cells.push_back("-");
    }
    out += md_row(cells);
  }
  return out;
}

std::string render_reversal_rate_table(const std::vector<ReportRow>& rows) {
  std::vector<std::string> header{"Model", "Collection", "Relevance", "Mean RR", "Max RR"};
  std::string out = md_row(header) + md_separator(header.size());
  for (const auto& row : rows) {
    if (!row.metrics.rr) continue;
    const RRSummary& rr = *row.metrics.rr;
    auto emit = [&](const std::string& label, const RRLevelStat& stat) {
      out += md_row({row.model, row.collection, label,
                     format_fixed(stat.mean_rr.value, 4) + star(stat.mean_rr),
                     format_fixed(stat.max_rr, 4)});
    };
    for (const auto& [level, stat] : rr.by_level) emit(std::to_string(level), stat);
    emit("All", rr.pooled);
  }
  return out;
}

std::string render_tables_markdown(const std::vector<ReportRow>& rows) {
  std::string out;
  out += "## Rank shift (mAARS / ALRS_all)\n\n";
  out += render_rank_shift_table(rows);
  out += "\n## Mean year shift in top-K (mYS^K)\n\n";
  out += render_year_shift_topk_table(rows);
  out += "\n## Mean year shift by rank group (mYSG)\n\n";
  out += render_year_shift_groups_table(rows);
  bool any_rr = std::any_of(rows.begin(), rows.end(),
                            [](const ReportRow& r) { return r.metrics.rr.has_value(); });
  if (any_rr) {
    out += "\n## Preference reversal rate (RR)\n\n";
    out += render_reversal_rate_table(rows);
  }
  out += "\nCells marked * are statistically significant (two-sided one-sample t-test, p < 0.05);"
         " positive year shifts are bold.\n";
  return out;
}

namespace {

void csv_stat_line(std::ostringstream& os, const std::string& table, const ReportRow& row,
                   const std::string& key, const MeanStat& stat) {
  os << table << "," << row.model << "," << row.collection << "," << key << ","
     << format_fixed(stat.value, 6) << ",";
  if (stat.ttest)
    os << format_fixed(stat.ttest->t, 6) << "," << format_fixed(stat.ttest->p, 6) << ","
       << stat.ttest->df;
  else
    os << ",,";
  os << "," << stat.n << "\n";
}

}  // namespace

std::string render_tables_csv(const std::vector<ReportRow>& rows) {
  std::ostringstream os;
  os << "table,model,collection,key,value,t,p,df,n_topics\n";
  for (const auto& row : rows) {
    csv_stat_line(os, "rank_shift", row, "maars", row.metrics.maars_stat);
    os << "rank_shift," << row.model << "," << row.collection << ",alrs_all,"
       << row.metrics.alrs_all_value << ",,,," << row.metrics.topic_count << "\n";
    for (const auto& [k, stat] : row.metrics.m_ys)
      csv_stat_line(os, "year_shift_topk", row, "K=" + std::to_string(k), stat);
    for (std::size_t g = 0; g < row.metrics.m_ysg.size(); ++g)
      csv_stat_line(os, "year_shift_group", row, group_header(g), row.metrics.m_ysg[g]);
    csv_stat_line(os, "kendall_tau", row, "mean_tau", row.metrics.m_tau);
    if (row.metrics.rr) {
      for (const auto& [level, stat] : row.metrics.rr->by_level) {
        csv_stat_line(os, "reversal_rate", row, "level=" + std::to_string(level), stat.mean_rr);
        os << "reversal_rate," << row.model << "," << row.collection << ",level="
           << level << "_max," << format_fixed(stat.max_rr, 6) << ",,,," << stat.mean_rr.n << "\n";
      }
      csv_stat_line(os, "reversal_rate", row, "all", row.metrics.rr->pooled.mean_rr);
      os << "reversal_rate," << row.model << "," << row.collection << ",all_max,"
         << format_fixed(row.metrics.rr->pooled.max_rr, 6) << ",,,,"
         << row.metrics.rr->pooled.mean_rr.n << "\n";
    }
  }
  return os.str();
}

nlohmann::json render_tables_json(const std::vector<ReportRow>& rows) {
  nlohmann::json out{{"schema_version", kSchemaVersion}, {"rows", nlohmann::json::array()}};
  for (const auto& row : rows)
    out["rows"].push_back(
        {{"model", row.model}, {"collection", row.collection}, {"metrics", to_json(row.metrics)}});
  return out;
}

std::vector<ReportRow> report_rows_from_json(const nlohmann::json& json) {
  std::vector<ReportRow> rows;
  for (const auto& entry : json.at("rows")) {
    ReportRow row;
    row.model = entry.at("model").get<std::string>();
    row.collection = entry.at("collection").get<std::string>();
    row.metrics = collection_metrics_from_json(entry.at("metrics"));
    rows.push_back(std::move(row));
  }
  return rows;
}

void emit_tables(const std::vector<ReportRow>& rows, const std::set<TableFormat>& formats,
                 const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  auto write_file = [&](const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) raise(Errc::IoError, "cannot write " + path.string());
    out << content;
  };
  if (formats.count(TableFormat::markdown)) write_file(dir / "tables.md", render_tables_markdown(rows));
  if (formats.count(TableFormat::csv)) write_file(dir / "tables.csv", render_tables_csv(rows));
  if (formats.count(TableFormat::json))
    write_file(dir / "tables.json", render_tables_json(rows).dump(2) + "\n");
}

std::string render_report_markdown(const ReportProvenance& provenance,
                                   const std::vector<ReportRow>& rows) {
  std::ostringstream os;
  os << "# Date-injection audit report\n\n";
  os << "- config hash: `" << provenance.config_hash << "`\n";
  os << "- prompt templates: `" << provenance.template_version << "`\n";
  if (!provenance.backend_description.empty())
    os << "- listwise backend: " << provenance.backend_description << "\n";
  if (!provenance.pairwise_backend_description.empty())
    os << "- pairwise backend: " << provenance.pairwise_backend_description << "\n";
  if (!provenance.schedule_description.empty())
    os << "- date schedule: " << provenance.schedule_description << "\n";
  if (!provenance.window_description.empty())
    os << "- sliding window: " << provenance.window_description << "\n";
  os << "- strict-parse fallbacks: " << provenance.parse_events.strict_failures
     << " (retries " << provenance.parse_events.retries << ", repaired "
     << provenance.parse_events.repairs << ")\n";
  os << "- excluded pairwise trials: " << provenance.excluded_trials << "\n";
  if (provenance.failed_topics.empty()) {
    os << "- failed topics: none\n";
  } else {
    os << "- failed topics (excluded from aggregates):";
    for (const auto& topic : provenance.failed_topics) os << " " << topic;
    os << "\n";
  }
  os << "\n" << render_tables_markdown(rows);
  return os.str();
}

}  // namespace recbias
