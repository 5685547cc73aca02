#include "kcport/svg.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace kcport {
namespace {

constexpr double kWidth = 800;
constexpr double kHeight = 480;
constexpr double kLeft = 80;
constexpr double kRight = 170;
constexpr double kTop = 40;
constexpr double kBottom = 60;

constexpr std::array<const char*, 8> kPalette = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                                 "#9467bd", "#8c564b", "#e377c2", "#17becf"};

std::string escape(const std::string& text)
{
  std::string out;
  for (char c : text) {
    switch (c) {
    case '&': out += "&amp;"; break;
    case '<': out += "&lt;"; break;
    case '>': out += "&gt;"; break;
    case '"': out += "&quot;"; break;
    default: out += c;
    }
  }
  return out;
}

} // namespace

std::string line_chart_svg(const std::string& title, const std::string& x_label,
                           const std::string& y_label, const std::vector<ChartSeries>& series,
                           int max_points)
{
  double y_min = std::numeric_limits<double>::infinity();
  double y_max = -y_min;
  Eigen::Index x_max = 1;
  for (const auto& s : series) {
    for (Eigen::Index i = 0; i < s.values.size(); ++i)
      if (std::isfinite(s.values(i))) {
        y_min = std::min(y_min, s.values(i));
        y_max = std::max(y_max, s.values(i));
      }
    x_max = std::max(x_max, s.values.size());
  }
  if (!std::isfinite(y_min)) {
    y_min = 0;
    y_max = 1;
  }
  if (y_max - y_min < 1e-12) {
    y_min -= 0.5;
    y_max += 0.5;
  }

  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - 1.0) / std::max<double>(1.0, x_max - 1.0) * plot_w; };
  auto py = [&](double y) { return kTop + (y_max - y) / (y_max - y_min) * plot_h; };

  std::string out = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" "
      "viewBox=\"0 0 {0} {1}\" font-family=\"sans-serif\" font-size=\"12\">\n"
      "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      "<text x=\"{2}\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">{3}</text>\n",
      kWidth, kHeight, kLeft + plot_w / 2, escape(title));
  out += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" "
                     "stroke=\"#444\"/>\n",
                     kLeft, kTop, plot_w, plot_h);
  for (int tick = 0; tick <= 4; ++tick) {
    const double y = y_min + (y_max - y_min) * tick / 4.0;
    out += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"end\">{:.4g}</text>\n",
                       kLeft - 6, py(y) + 4, y);
    const double x = 1.0 + (x_max - 1.0) * tick / 4.0;
    out += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\">{:.0f}</text>\n",
                       px(x), kTop + plot_h + 18, x);
  }
  out += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\">{}</text>\n",
                     kLeft + plot_w / 2, kHeight - 14, escape(x_label));
  out += fmt::format("<text x=\"18\" y=\"{0:.1f}\" text-anchor=\"middle\" "
                     "transform=\"rotate(-90 18 {0:.1f})\">{1}</text>\n",
                     kTop + plot_h / 2, escape(y_label));

  for (std::size_t s = 0; s < series.size(); ++s) {
    const auto& values = series[s].values;
    const char* colour = kPalette[s % kPalette.size()];
    const Eigen::Index stride = std::max<Eigen::Index>(1, values.size() / std::max(1, max_points));
    std::string points;
    for (Eigen::Index i = 0; i < values.size(); i += stride) {
      if (!std::isfinite(values(i)))
        continue;
      points += fmt::format("{:.1f},{:.1f} ", px(static_cast<double>(i + 1)), py(values(i)));
    }
    if (values.size() > 0 && (values.size() - 1) % stride != 0 && std::isfinite(values(values.size() - 1)))
      points += fmt::format("{:.1f},{:.1f}", px(static_cast<double>(values.size())),
                            py(values(values.size() - 1)));
    out += fmt::format("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\" points=\"{}\"/>\n",
                       colour, points);
    const double ly = kTop + 14 + 18 * static_cast<double>(s);
    out += fmt::format("<line x1=\"{0:.1f}\" y1=\"{1:.1f}\" x2=\"{2:.1f}\" y2=\"{1:.1f}\" "
                       "stroke=\"{3}\" stroke-width=\"2\"/>\n"
                       "<text x=\"{4:.1f}\" y=\"{5:.1f}\">{6}</text>\n",
                       kLeft + plot_w + 12, ly, kLeft + plot_w + 32, colour,
                       kLeft + plot_w + 38, ly + 4, escape(series[s].name));
  }
  out += "</svg>\n";
  return out;
}

} // namespace kcport
