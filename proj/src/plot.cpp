#include "percodiff/plot.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <vector>

#include "percodiff/errors.hpp"

namespace percodiff {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 420.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 20.0;
constexpr double kTop = 20.0;
constexpr double kBottom = 50.0;

const char* const kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"};

struct Sample {
  double x = 0.0;  // log10(1/epsilon)
  double y = 0.0;  // log10(value)
  double lo = 0.0;
  double hi = 0.0;
  bool bars = false;
};

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double number(const std::string& s) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw ConfigError("bad number in CSV: " + s);
    return v;
  } catch (const std::logic_error&) {
    throw ConfigError("bad number in CSV: " + s);
  }
}

}  // namespace

std::string emit_plot(std::string_view csv) {
  const std::string criteria_header = "criterion,epsilon,value,verdict,model,params";
  const std::string escape_header = "epsilon,mean,stderr,min,max,fraction_positive,realizations,blocked,censored,paths";
  std::stringstream in{std::string(csv)};
  std::string line;
  std::string header;
  std::map<std::string, std::vector<Sample>> series;
  std::vector<std::string> order;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    if (header.empty()) {
      if (line != criteria_header && line != escape_header) throw ConfigError("unknown CSV columns: " + line);
      header = line;
      continue;
    }
    const auto cells = split(line);
    Sample s;
    std::string key;
    double eps = 0.0;
    double value = 0.0;
    if (header == criteria_header) {
      if (cells.size() != 6) throw ConfigError("malformed criteria row: " + line);
      key = cells[0];
      eps = number(cells[1]);
      value = number(cells[2]);
    } else {
      if (cells.size() != 10) throw ConfigError("malformed escape row: " + line);
      key = "escape";
      eps = number(cells[0]);
      value = number(cells[1]);
      const double se = number(cells[2]);
      s.bars = true;
      s.lo = value - se;
      s.hi = value + se;
    }
    if (!(eps > 0.0) || !(value > 0.0)) continue;  // not representable on log axes
    s.x = std::log10(1.0 / eps);
    s.y = std::log10(value);
    if (s.bars) {
      s.lo = std::log10(std::max(s.lo, value * 1e-3));
      s.hi = std::log10(s.hi);
    }
    if (!series.count(key)) order.push_back(key);
    series[key].push_back(s);
  }

  double x0 = 0.0, x1 = 3.0, y0 = -3.0, y1 = 0.0;
  bool any = false;
  for (const auto& [key, pts] : series) {
    for (const auto& p : pts) {
      const double lo = p.bars ? p.lo : p.y;
      const double hi = p.bars ? p.hi : p.y;
      if (!any) {
        x0 = x1 = p.x;
        y0 = lo;
        y1 = hi;
        any = true;
      }
      x0 = std::min(x0, p.x);
      x1 = std::max(x1, p.x);
      y0 = std::min(y0, lo);
      y1 = std::max(y1, hi);
    }
  }
  x0 = std::floor(x0);
  x1 = std::max(std::ceil(x1), x0 + 1.0);
  y0 = std::floor(y0);
  y1 = std::max(std::ceil(y1), y0 + 1.0);

  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - x0) / (x1 - x0) * pw; };
  auto py = [&](double y) { return kTop + (y1 - y) / (y1 - y0) * ph; };

  std::string svg;
  svg += fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{:.0f}\" height=\"{:.0f}\" viewBox=\"0 0 {:.0f} {:.0f}\">\n",
      kWidth, kHeight, kWidth, kHeight);
  svg += fmt::format("<rect x=\"0\" y=\"0\" width=\"{:.0f}\" height=\"{:.0f}\" fill=\"white\"/>\n", kWidth, kHeight);
  svg += fmt::format("<g id=\"axes\" stroke=\"black\" fill=\"none\">\n");
  svg += fmt::format("<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\"/>\n", px(x0), py(y0), px(x1), py(y0));
  svg += fmt::format("<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\"/>\n", px(x0), py(y0), px(x0), py(y1));
  for (double t = x0; t <= x1 + 1e-9; t += 1.0) {
    svg += fmt::format("<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\"/>\n", px(t), py(y0), px(t),
                       py(y0) + 5.0);
  }
  for (double t = y0; t <= y1 + 1e-9; t += 1.0) {
    svg += fmt::format("<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\"/>\n", px(x0) - 5.0, py(t), px(x0),
                       py(t));
  }
  svg += "</g>\n<g id=\"labels\" font-family=\"sans-serif\" font-size=\"11\">\n";
  for (double t = x0; t <= x1 + 1e-9; t += 1.0) {
    svg += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\">1e{:.0f}</text>\n", px(t),
                       py(y0) + 18.0, -t);
  }
  for (double t = y0; t <= y1 + 1e-9; t += 1.0) {
    svg += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"end\">1e{:.0f}</text>\n", px(x0) - 8.0,
                       py(t) + 4.0, t);
  }
  svg += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\">epsilon</text>\n", kLeft + 0.5 * pw,
                     kHeight - 8.0);
  svg += "</g>\n";

  for (std::size_t k = 0; k < order.size(); ++k) {
    const auto& pts = series[order[k]];
    const char* color = kColors[k % std::size(kColors)];
    svg += fmt::format("<g id=\"series-{}\" stroke=\"{}\" fill=\"none\">\n", k, color);
    std::string points;
    for (const auto& p : pts) points += fmt::format("{}{:.2f},{:.2f}", points.empty() ? "" : " ", px(p.x), py(p.y));
    svg += fmt::format("<polyline points=\"{}\"/>\n", points);
    for (const auto& p : pts) {
      if (p.bars) {
        svg += fmt::format("<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\"/>\n", px(p.x), py(p.lo),
                           px(p.x), py(p.hi));
      }
    }
    svg += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" fill=\"{}\" stroke=\"none\" font-family=\"sans-serif\" "
                       "font-size=\"11\">{}</text>\n",
                       kLeft + 10.0, kTop + 14.0 * static_cast<double>(k + 1), color, order[k]);
    svg += "</g>\n";
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace percodiff
