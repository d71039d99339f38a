#include "catlab/plot.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>

#include <fmt/format.h>

#include "catlab/core.hpp"
#include "catlab/csv.hpp"

namespace catlab {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 420.0;
constexpr double kMargin = 60.0;
const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"};

double parse_number(const std::string& s, const std::string& overlay) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw ArgumentError(fmt::format("bad number '{}' in overlay '{}'", s, overlay));
}

std::string escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += ch;
    }
  }
  return out;
}

}  // namespace

double evaluate_overlay(const std::string& overlay, const PlotSpec& spec, double T) {
  if (overlay == "2LKT/g^2") {
    const double g = std::ceil(std::pow(T, spec.c) - 1e-9);
    return 2.0 * spec.L * spec.K * T / (g * g);
  }
  if (overlay == "(diam+4)T^c") return (spec.diam + 4.0) * std::pow(T, spec.c);
  if (overlay == "LT/8f") {
    const double f = std::max(1.0, std::ceil(std::sqrt(spec.hint * T) - 1e-9));
    return spec.L * T / (8.0 * f);
  }
  if (overlay.rfind("power:", 0) == 0) {
    const std::string rest = overlay.substr(6);
    const auto colon = rest.find(':');
    if (colon == std::string::npos) throw ArgumentError(fmt::format("overlay '{}' needs power:<a>:<b>", overlay));
    const double a = parse_number(rest.substr(0, colon), overlay);
    const double b = parse_number(rest.substr(colon + 1), overlay);
    return a * std::pow(T, b);
  }
  throw ArgumentError(
      fmt::format("unknown overlay '{}'; valid: 2LKT/g^2, (diam+4)T^c, LT/8f, power:<a>:<b>", overlay));
}

std::string render_svg(const std::vector<Series>& series, PlotScale scale, const std::string& x_label) {
  const bool log = scale == PlotScale::kLogLog;
  const auto tx = [log](double v) { return log ? std::log10(v) : v; };
  double x0 = std::numeric_limits<double>::infinity();
  double x1 = -x0;
  double y0 = x0;
  double y1 = -x0;
  for (const Series& s : series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (log && (!(s.x[i] > 0.0) || !(s.y[i] > 0.0))) continue;
      if (!std::isfinite(s.y[i])) continue;
      x0 = std::min(x0, tx(s.x[i]));
      x1 = std::max(x1, tx(s.x[i]));
      y0 = std::min(y0, tx(s.y[i]));
      y1 = std::max(y1, tx(s.y[i]));
    }
  }
  if (!std::isfinite(x0)) {
    x0 = y0 = 0.0;
    x1 = y1 = 1.0;
  }
  if (x1 == x0) x1 = x0 + 1.0;
  if (y1 == y0) y1 = y0 + 1.0;
  const auto px = [&](double v) { return kMargin + (tx(v) - x0) / (x1 - x0) * (kWidth - 2 * kMargin); };
  const auto py = [&](double v) { return kHeight - kMargin - (tx(v) - y0) / (y1 - y0) * (kHeight - 2 * kMargin); };

  std::string svg = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" viewBox=\"0 0 {0} {1}\">\n"
      "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n",
      kWidth, kHeight);
  svg += fmt::format("<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"black\"/>\n", kMargin,
                     kHeight - kMargin, kWidth - kMargin);
  svg += fmt::format("<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"black\"/>\n", kMargin, kMargin,
                     kHeight - kMargin);
  for (int k = 0; k <= 4; ++k) {
    const double xv = x0 + (x1 - x0) * k / 4.0;
    const double yv = y0 + (y1 - y0) * k / 4.0;
    const double sx = kMargin + (kWidth - 2 * kMargin) * k / 4.0;
    const double sy = kHeight - kMargin - (kHeight - 2 * kMargin) * k / 4.0;
    svg += fmt::format("<text x=\"{}\" y=\"{}\" font-size=\"11\" text-anchor=\"middle\">{:.3g}</text>\n", sx,
                       kHeight - kMargin + 16, log ? std::pow(10.0, xv) : xv);
    svg += fmt::format("<text x=\"{}\" y=\"{}\" font-size=\"11\" text-anchor=\"end\">{:.3g}</text>\n", kMargin - 4,
                       sy + 4, log ? std::pow(10.0, yv) : yv);
  }
  svg += fmt::format("<text x=\"{}\" y=\"{}\" font-size=\"12\" text-anchor=\"middle\">{}</text>\n", kWidth / 2,
                     kHeight - 12, escape(x_label + (log ? " (log)" : "")));
  for (std::size_t k = 0; k < series.size(); ++k) {
    const Series& s = series[k];
    const char* color = kColors[k % std::size(kColors)];
    std::string points;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (log && (!(s.x[i] > 0.0) || !(s.y[i] > 0.0))) continue;
      if (!std::isfinite(s.y[i])) continue;
      points += fmt::format("{:.2f},{:.2f} ", px(s.x[i]), py(s.y[i]));
    }
    svg += fmt::format("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\" points=\"{}\"/>\n", color, points);
    svg += fmt::format("<text x=\"{}\" y=\"{}\" font-size=\"12\" fill=\"{}\">{}</text>\n", kMargin + 8,
                       kMargin + 14 * static_cast<double>(k), color, escape(s.label));
  }
  svg += "</svg>\n";
  return svg;
}

std::vector<std::string> render_plot(const PlotSpec& spec) {
  if (spec.y.empty()) throw ArgumentError("plot needs at least one y column");
  if (spec.out.empty()) throw ArgumentError("plot needs an output path");
  const CsvTable table = read_csv(spec.csv);
  const std::vector<double> xs = table.numbers(spec.x);

  // One series per (algo, column) when the CSV carries an algo column.
  std::vector<std::string> groups(xs.size());
  if (std::find(table.header.begin(), table.header.end(), "algo") != table.header.end()) {
    const std::size_t c = table.column("algo");
    for (std::size_t i = 0; i < xs.size(); ++i) groups[i] = c < table.rows[i].size() ? table.rows[i][c] : "";
  }
  std::vector<std::string> names = groups;
  std::sort(names.begin(), names.end());
  names.erase(std::unique(names.begin(), names.end()), names.end());

  std::vector<Series> series;
  for (const std::string& col : spec.y) {
    const std::vector<double> ys = table.numbers(col);
    for (const std::string& group : names) {
      std::vector<std::size_t> order;
      for (std::size_t i = 0; i < xs.size(); ++i) {
        if (groups[i] == group) order.push_back(i);
      }
      std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
      Series s{group.empty() ? col : fmt::format("{} {}", group, col), {}, {}};
      for (std::size_t i : order) {
        s.x.push_back(xs[i]);
        s.y.push_back(ys[i]);
      }
      series.push_back(std::move(s));
    }
  }
  std::vector<double> grid = xs;
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  for (const std::string& ov : spec.overlays) {
    Series s{ov, grid, {}};
    for (double T : grid) s.y.push_back(evaluate_overlay(ov, spec, T));
    series.push_back(std::move(s));
  }

  const auto parent = std::filesystem::path(spec.out).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  std::ofstream svg(spec.out);
  if (!svg) throw ArgumentError(fmt::format("cannot write {}", spec.out));
  svg << render_svg(series, spec.scale, spec.x);

  const std::string dat_path = std::filesystem::path(spec.out).replace_extension(".dat").string();
  std::ofstream dat(dat_path);
  if (!dat) throw ArgumentError(fmt::format("cannot write {}", dat_path));
  dat << "# series x y\n";
  for (const Series& s : series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) dat << fmt::format("\"{}\" {} {}\n", s.label, s.x[i], s.y[i]);
  }
  return {spec.out, dat_path};
}

}  // namespace catlab
