#pragma once

#include <string>
#include <vector>

namespace catlab {

enum class PlotScale { kLinear, kLogLog };

// Reference curves drawn alongside the data, evaluated at each x (= T):
//   "2LKT/g^2"     2 L K T / g(T)^2 with g(T) = ceil(T^c)
//   "(diam+4)T^c"  (diam + 4) T^c
//   "LT/8f"        L T / (8 f) with f = ceil(sqrt(hint T))
//   "power:<a>:<b>" a T^b
struct PlotSpec {
  std::string csv;
  std::string x = "T";
  std::vector<std::string> y;
  PlotScale scale = PlotScale::kLogLog;
  std::vector<std::string> overlays;
  std::string out;  // .svg path; a .dat twin is written beside it
  double L = 1.0;
  double K = 2.0;
  double c = 0.75;
  double diam = 1.0;
  double hint = 64.0;
};

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

double evaluate_overlay(const std::string& overlay, const PlotSpec& spec, double T);

// Renders the plot; returns the paths written (svg, dat).
std::vector<std::string> render_plot(const PlotSpec& spec);

std::string render_svg(const std::vector<Series>& series, PlotScale scale, const std::string& x_label);

}  // namespace catlab
