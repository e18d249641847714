#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <tuple>

#include "recbias/errors.hpp"
#include "recbias/report.hpp"

namespace recbias {

double quantile(const std::vector<double>& sorted_values, double q) {
  if (sorted_values.empty()) raise(Errc::EmptyMetricInput, "quantile of empty sample");
  if (q < 0.0 || q > 1.0) raise(Errc::InvalidArgument, "quantile q must be in [0, 1]");
  const std::size_t n = sorted_values.size();
  if (n == 1) return sorted_values[0];
  double h = q * static_cast<double>(n - 1);
  std::size_t lo = static_cast<std::size_t>(std::floor(h));
  if (lo >= n - 1) return sorted_values[n - 1];
  double frac = h - static_cast<double>(lo);
  return sorted_values[lo] + frac * (sorted_values[lo + 1] - sorted_values[lo]);
}

namespace {

struct BoxStats {
  double median = 0, q1 = 0, q3 = 0, whisker_lo = 0, whisker_hi = 0;
  std::vector<double> outliers;
  std::size_t n = 0;
};

BoxStats box_stats(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  BoxStats stats;
  stats.n = values.size();
  stats.median = quantile(values, 0.5);
  stats.q1 = quantile(values, 0.25);
  stats.q3 = quantile(values, 0.75);
  double iqr = stats.q3 - stats.q1;
  double lo_fence = stats.q1 - 1.5 * iqr;
  double hi_fence = stats.q3 + 1.5 * iqr;
  // Whiskers clamp to the most extreme data points inside the fences.
  stats.whisker_lo = stats.q1;
  stats.whisker_hi = stats.q3;
  bool any_lo = false, any_hi = false;
  for (double v : values) {
    if (v >= lo_fence && (!any_lo || v < stats.whisker_lo)) {
      stats.whisker_lo = v;
      any_lo = true;
    }
    if (v <= hi_fence && (!any_hi || v > stats.whisker_hi)) {
      stats.whisker_hi = v;
      any_hi = true;
    }
    if (v < lo_fence || v > hi_fence) stats.outliers.push_back(v);
  }
  return stats;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

}  // namespace

std::string render_tau_plot_svg(const std::vector<TauPoint>& points) {
  if (points.empty()) raise(Errc::EmptyMetricInput, "no tau values to plot");

  std::map<std::string, std::vector<double>> by_model;
  for (const auto& p : points) by_model[p.model].push_back(p.tau);

  const double margin_left = 60, margin_top = 30, margin_bottom = 60;
  const double box_slot = 110, box_width = 46, plot_height = 300;
  const double width = margin_left + box_slot * static_cast<double>(by_model.size()) + 30;
  const double height = margin_top + plot_height + margin_bottom;
  // tau in [-1, 1] -> y pixel
  auto y_of = [&](double tau) { return margin_top + (1.0 - tau) * plot_height / 2.0; };

  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width) << "\" height=\""
     << num(height) << "\" viewBox=\"0 0 " << num(width) << " " << num(height) << "\">\n";
  os << "  <desc>Kendall tau distribution per model (whiskers: 1.5 IQR, linear-interpolation "
        "quantiles)</desc>\n";
  // axis + gridlines
  os << "  <line x1=\"" << num(margin_left) << "\" y1=\"" << num(y_of(1)) << "\" x2=\""
     << num(margin_left) << "\" y2=\"" << num(y_of(-1)) << "\" stroke=\"black\"/>\n";
  for (double tick = -1.0; tick <= 1.0 + 1e-9; tick += 0.5) {
    os << "  <line x1=\"" << num(margin_left - 4) << "\" y1=\"" << num(y_of(tick)) << "\" x2=\""
       << num(width - 20) << "\" y2=\"" << num(y_of(tick))
       << "\" stroke=\"#cccccc\" stroke-width=\"0.5\"/>\n";
    os << "  <text x=\"" << num(margin_left - 8) << "\" y=\"" << num(y_of(tick) + 4)
       << "\" font-size=\"11\" text-anchor=\"end\">" << num(tick) << "</text>\n";
  }
  os << "  <text x=\"14\" y=\"" << num(margin_top + plot_height / 2)
     << "\" font-size=\"12\" transform=\"rotate(-90 14 " << num(margin_top + plot_height / 2)
     << ")\" text-anchor=\"middle\">Kendall tau</text>\n";

  std::size_t slot = 0;
  for (const auto& [model, values] : by_model) {
    BoxStats stats = box_stats(values);
    double cx = margin_left + box_slot * (static_cast<double>(slot) + 0.5);
    double x0 = cx - box_width / 2, x1 = cx + box_width / 2;
    os << "  <g class=\"box\" data-model=\"" << xml_escape(model) << "\" data-n=\"" << stats.n
       << "\" data-median=\"" << num(stats.median) << "\" data-q1=\"" << num(stats.q1)
       << "\" data-q3=\"" << num(stats.q3) << "\" data-whisker-lo=\"" << num(stats.whisker_lo)
       << "\" data-whisker-hi=\"" << num(stats.whisker_hi) << "\">\n";
    // whisker stem + caps
    os << "    <line x1=\"" << num(cx) << "\" y1=\"" << num(y_of(stats.whisker_lo)) << "\" x2=\""
       << num(cx) << "\" y2=\"" << num(y_of(stats.whisker_hi)) << "\" stroke=\"black\"/>\n";
    for (double w : {stats.whisker_lo, stats.whisker_hi})
      os << "    <line x1=\"" << num(cx - 12) << "\" y1=\"" << num(y_of(w)) << "\" x2=\""
         << num(cx + 12) << "\" y2=\"" << num(y_of(w)) << "\" stroke=\"black\"/>\n";
    // interquartile box and median
    os << "    <rect x=\"" << num(x0) << "\" y=\"" << num(y_of(stats.q3)) << "\" width=\""
       << num(x1 - x0) << "\" height=\"" << num(y_of(stats.q1) - y_of(stats.q3))
       << "\" fill=\"#9ecae1\" stroke=\"black\"/>\n";
    os << "    <line x1=\"" << num(x0) << "\" y1=\"" << num(y_of(stats.median)) << "\" x2=\""
       << num(x1) << "\" y2=\"" << num(y_of(stats.median))
       << "\" stroke=\"black\" stroke-width=\"1.5\"/>\n";
    for (double o : stats.outliers)
      os << "    <circle cx=\"" << num(cx) << "\" cy=\"" << num(y_of(o))
         << "\" r=\"2.5\" fill=\"none\" stroke=\"black\"/>\n";
    os << "    <text x=\"" << num(cx) << "\" y=\"" << num(margin_top + plot_height + 20)
       << "\" font-size=\"11\" text-anchor=\"middle\">" << xml_escape(model) << "</text>\n";
    os << "  </g>\n";
    ++slot;
  }
  os << "</svg>\n";
  return os.str();
}

void emit_tau_plot(const std::vector<TauPoint>& points, const std::filesystem::path& svg_path,
                   const std::filesystem::path& csv_path) {
  std::string svg = render_tau_plot_svg(points);
  std::ofstream svg_out(svg_path, std::ios::binary);
  if (!svg_out) raise(Errc::IoError, "cannot write " + svg_path.string());
  svg_out << svg;

  std::ofstream csv_out(csv_path, std::ios::binary);
  if (!csv_out) raise(Errc::IoError, "cannot write " + csv_path.string());
  csv_out << "model,topic,tau\n";
  std::vector<TauPoint> sorted = points;
  std::stable_sort(sorted.begin(), sorted.end(), [](const TauPoint& a, const TauPoint& b) {
    return std::tie(a.model, a.topic) < std::tie(b.model, b.topic);
  });
  for (const auto& p : sorted)
    csv_out << p.model << "," << p.topic << "," << format_fixed(p.tau, 6) << "\n";
}

}  // namespace recbias
