#include "sslmseg/svg_plot.hpp"

#include <cstdio>

namespace sslmseg {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 420.0;
constexpr double kLeft = 60.0;
constexpr double kRight = 20.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 50.0;

double px(double x) { return kLeft + x * (kWidth - kLeft - kRight); }
double py(double y) { return kHeight - kBottom - y * (kHeight - kTop - kBottom); }

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string printf_str(const char* fmt, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), fmt, a, b, c, d);
  return buf;
}

}  // namespace

std::string sweep_svg(const SweepResult& result, const std::string& title) {
  std::string s;
  s += printf_str(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.0f\" height=\"%.0f\" "
      "viewBox=\"0 0 %.0f %.0f\" font-family=\"sans-serif\" font-size=\"12\">\n",
      kWidth, kHeight, kWidth, kHeight);
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s += "<text x=\"" + printf_str("%.1f", kWidth / 2) + "\" y=\"22\" text-anchor=\"middle\">" +
       escape(title) + "</text>\n";

  // Axes span [0, 1] x [0, 1].
  s += "<g id=\"axes\" stroke=\"black\" fill=\"none\">\n";
  s += printf_str("<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\"/>\n", px(0), py(0), px(1), py(0));
  s += printf_str("<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\"/>\n", px(0), py(0), px(0), py(1));
  s += "</g>\n<g id=\"ticks\" text-anchor=\"middle\">\n";
  for (int k = 0; k <= 10; ++k) {
    const double v = k / 10.0;
    s += printf_str("<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"#ccc\"/>\n", px(v),
                    py(0), px(v), py(1));
    s += printf_str("<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"#ccc\"/>\n", px(0),
                    py(v), px(1), py(v));
    s += printf_str("<text x=\"%.1f\" y=\"%.1f\">%.1f</text>\n", px(v), py(0) + 16, v);
    s += printf_str("<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"end\">%.1f</text>\n", px(0) - 6,
                    py(v) + 4, v);
  }
  s += "</g>\n";
  s += printf_str("<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"middle\">threshold</text>\n",
                  px(0.5), kHeight - 12);
  s += printf_str(
      "<text x=\"16\" y=\"%.1f\" text-anchor=\"middle\" transform=\"rotate(-90 16 %.1f)\">score</text>\n",
      py(0.5), py(0.5));

  struct Series {
    const char* name;
    const char* color;
    double SweepRow::*field;
  };
  const Series series[] = {{"precision", "#1f77b4", &SweepRow::precision},
                           {"recall", "#2ca02c", &SweepRow::recall},
                           {"F", "#d62728", &SweepRow::f_beta}};
  int legend = 0;
  for (const auto& ser : series) {
    std::string points;
    for (const auto& row : result.table) {
      points += printf_str("%.2f,%.2f ", px(row.threshold), py(row.*ser.field));
    }
    s += std::string("<polyline id=\"") + ser.name + "\" fill=\"none\" stroke=\"" + ser.color +
         "\" stroke-width=\"1.5\" points=\"" + points + "\"/>\n";
    const double ly = kTop + 14.0 * legend++;
    s += printf_str("<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" ", px(0.78), ly, px(0.83), ly);
    s += std::string("stroke=\"") + ser.color + "\" stroke-width=\"2\"/>\n";
    s += printf_str("<text x=\"%.1f\" y=\"%.1f\">", px(0.85), ly + 4) + ser.name + "</text>\n";
  }
  s += printf_str(
      "<circle cx=\"%.1f\" cy=\"%.1f\" r=\"4\" fill=\"#d62728\"/>\n<text x=\"%.1f\" y=\"%.1f\">",
      px(result.best_threshold), py(result.best_f), px(result.best_threshold) + 6,
      py(result.best_f) - 6);
  s += printf_str("t = %.3f, F = %.3f</text>\n", result.best_threshold, result.best_f);
  s += "</svg>\n";
  return s;
}

}  // namespace sslmseg
