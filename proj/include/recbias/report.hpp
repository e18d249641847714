#pragma once

#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "recbias/backend.hpp"
#include "recbias/metrics.hpp"

namespace recbias {

/// One (model, collection) pair's aggregated metrics — one table row group.
struct ReportRow {
  std::string model;
  std::string collection;
  CollectionMetrics metrics;
};

enum class TableFormat { markdown, csv, json };

/// Fixed-precision cell renderers; 4 decimals for rank-shift and RR values,
/// 3 (sign-explicit) for year shifts.
std::string format_fixed(double value, int decimals);
std::string format_signed(double value, int decimals);

std::string render_rank_shift_table(const std::vector<ReportRow>& rows);
std::string render_year_shift_topk_table(const std::vector<ReportRow>& rows);
std::string render_year_shift_groups_table(const std::vector<ReportRow>& rows);
std::string render_reversal_rate_table(const std::vector<ReportRow>& rows);

std::string render_tables_markdown(const std::vector<ReportRow>& rows);
std::string render_tables_csv(const std::vector<ReportRow>& rows);
nlohmann::json render_tables_json(const std::vector<ReportRow>& rows);
std::vector<ReportRow> report_rows_from_json(const nlohmann::json& json);

/// Write tables.<ext> per requested format into `dir`.
void emit_tables(const std::vector<ReportRow>& rows, const std::set<TableFormat>& formats,
                 const std::filesystem::path& dir);

struct TauPoint {
  std::string model;
  std::string topic;
  double tau = 0.0;
};

/// Linear-interpolation quantile of sorted values, q in [0, 1].
double quantile(const std::vector<double>& sorted_values, double q);

/// Box plot (median, quartiles, 1.5*IQR whiskers, outlier points) per model,
/// plus a CSV of every (model, topic, tau) point.
void emit_tau_plot(const std::vector<TauPoint>& points, const std::filesystem::path& svg_path,
                   const std::filesystem::path& csv_path);

std::string render_tau_plot_svg(const std::vector<TauPoint>& points);

/// Run-level provenance rendered at the top of report.md. Deliberately free
/// of wall-clock values so reports are reproducible byte-for-byte; creation
/// time lives in config.snapshot.
struct ReportProvenance {
  std::string config_hash;
  std::string template_version = std::string(kPromptTemplateVersion);
  std::string backend_description;
  std::string pairwise_backend_description;
  std::string schedule_description;
  std::string window_description;
  std::vector<std::string> failed_topics;
  long excluded_trials = 0;
  ParseEvents parse_events;
};

std::string render_report_markdown(const ReportProvenance& provenance,
                                   const std::vector<ReportRow>& rows);

}  // namespace recbias
