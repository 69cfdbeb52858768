#include "kflow/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "kflow/verify.hpp"

namespace kflow::plot {

namespace {

constexpr double kWidth = 640, kHeight = 400;
constexpr double kLeft = 80, kRight = 170, kTop = 40, kBottom = 50;
const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string px(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

bool usable(double x, double y, bool log_y) {
  return std::isfinite(x) && std::isfinite(y) && (!log_y || y > 0.0);
}

double nice_step(double span) {
  const double raw = span / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double f = raw / mag;
  return (f < 1.5 ? 1.0 : f < 3.5 ? 2.0 : f < 7.5 ? 5.0 : 10.0) * mag;
}

}  // namespace

std::string render_svg(const Figure& fig) {
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& s : fig.series)
    for (std::size_t i = 0; i < s.xs.size() && i < s.ys.size(); ++i) {
      if (!usable(s.xs[i], s.ys[i], fig.log_y)) continue;
      const double y = fig.log_y ? std::log10(s.ys[i]) : s.ys[i];
      x0 = std::min(x0, s.xs[i]);
      x1 = std::max(x1, s.xs[i]);
      y0 = std::min(y0, y);
      y1 = std::max(y1, y);
    }
  if (!(x0 <= x1)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (x1 - x0 < 1e-300) x1 = x0 + 1.0;
  if (y1 - y0 < 1e-12 * std::max(1.0, std::abs(y0))) {
    const double pad = fig.log_y ? 0.5 : std::max(1.0, 0.1 * std::abs(y0));
    y0 -= pad;
    y1 += pad;
  }
  if (fig.log_y) {
    y0 = std::floor(y0);
    y1 = std::ceil(y1);
  } else {
    const double step = nice_step(y1 - y0);
    y0 = std::floor(y0 / step) * step;
    y1 = std::ceil(y1 / step) * step;
  }

  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  auto sx = [&](double x) { return kLeft + (x - x0) / (x1 - x0) * pw; };
  auto sy = [&](double y) { return kTop + (y1 - y) / (y1 - y0) * ph; };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
     << kHeight << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << px(kLeft + pw / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
     << escape(fig.title) << "</text>\n";

  // Axes and ticks.
  os << "<rect x=\"" << px(kLeft) << "\" y=\"" << px(kTop) << "\" width=\"" << px(pw)
     << "\" height=\"" << px(ph) << "\" fill=\"none\" stroke=\"black\"/>\n";
  const double xstep = nice_step(x1 - x0);
  for (double x = std::ceil(x0 / xstep) * xstep; x <= x1 + 1e-9 * xstep; x += xstep) {
    os << "<line x1=\"" << px(sx(x)) << "\" y1=\"" << px(kTop + ph) << "\" x2=\"" << px(sx(x))
       << "\" y2=\"" << px(kTop + ph + 5) << "\" stroke=\"black\"/>";
    os << "<text x=\"" << px(sx(x)) << "\" y=\"" << px(kTop + ph + 18)
       << "\" text-anchor=\"middle\">" << num(std::abs(x) < 1e-12 * xstep ? 0.0 : x) << "</text>\n";
  }
  const double ystep = fig.log_y ? std::max(1.0, std::ceil((y1 - y0) / 8.0)) : nice_step(y1 - y0);
  for (double y = y0; y <= y1 + 1e-9 * ystep; y += ystep) {
    const double shown = std::abs(y) < 1e-12 * ystep ? 0.0 : y;
    os << "<line x1=\"" << px(kLeft - 5) << "\" y1=\"" << px(sy(y)) << "\" x2=\"" << px(kLeft + pw)
       << "\" y2=\"" << px(sy(y)) << "\" stroke=\"#dddddd\"/>";
    os << "<text x=\"" << px(kLeft - 8) << "\" y=\"" << px(sy(y) + 4) << "\" text-anchor=\"end\">"
       << (fig.log_y ? "1e" + num(shown) : num(shown)) << "</text>\n";
  }
  os << "<text x=\"" << px(kLeft + pw / 2) << "\" y=\"" << px(kHeight - 10)
     << "\" text-anchor=\"middle\">" << escape(fig.xlabel) << "</text>\n";
  os << "<text transform=\"translate(16," << px(kTop + ph / 2)
     << ") rotate(-90)\" text-anchor=\"middle\">" << escape(fig.ylabel)
     << (fig.log_y ? " (log scale)" : "") << "</text>\n";

  for (std::size_t k = 0; k < fig.series.size(); ++k) {
    const auto& s = fig.series[k];
    os << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\""
       << (s.dashed ? " stroke-dasharray=\"6,4\"" : "") << " points=\"";
    bool first = true;
    for (std::size_t i = 0; i < s.xs.size() && i < s.ys.size(); ++i) {
      if (!usable(s.xs[i], s.ys[i], fig.log_y)) continue;
      const double y = fig.log_y ? std::log10(s.ys[i]) : s.ys[i];
      os << (first ? "" : " ") << px(sx(s.xs[i])) << ',' << px(sy(y));
      first = false;
    }
    os << "\"/>\n";
    const double ly = kTop + 14 + 18 * static_cast<double>(k);
    os << "<line x1=\"" << px(kLeft + pw + 10) << "\" y1=\"" << px(ly - 4) << "\" x2=\""
       << px(kLeft + pw + 30) << "\" y2=\"" << px(ly - 4) << "\" stroke=\"" << s.color
       << "\" stroke-width=\"1.5\"" << (s.dashed ? " stroke-dasharray=\"6,4\"" : "") << "/>";
    os << "<text x=\"" << px(kLeft + pw + 34) << "\" y=\"" << px(ly) << "\">" << escape(s.label)
       << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::vector<std::pair<std::string, std::string>> figures_from_csv(const io::CsvTable& table) {
  for (const auto& c : io::csv_columns())
    if (!table.has(c)) throw std::invalid_argument("plot: missing column '" + c + "'");
  const auto t = table.column("t");
  auto series = [&](const std::string& col, std::size_t color, bool dashed = false) {
    return Series{col, t, table.column(col), kPalette[color % std::size(kPalette)], dashed};
  };

  std::vector<std::pair<std::string, std::string>> out;

  Figure u{"potential u(t)", "t", "u", false,
           {series("max_u", 0), series("min_u", 1), series("mean_u", 2)}};
  // Late-time slope of mean_u, drawn over the fitting window.
  const double t_end = t.empty() ? 0.0 : t.back();
  if (t_end >= 4.0) {
    std::vector<double> ts, ys;
    const auto mean_u = table.column("mean_u");
    for (std::size_t i = 0; i < t.size(); ++i)
      if (t[i] >= t_end - 4.0 && std::isfinite(mean_u[i])) {
        ts.push_back(t[i]);
        ys.push_back(mean_u[i]);
      }
    if (ts.size() >= 2) {
      const double slope = verify::fit_slope(ts, ys);
      double tm = 0, ym = 0;
      for (std::size_t i = 0; i < ts.size(); ++i) tm += ts[i], ym += ys[i];
      tm /= static_cast<double>(ts.size());
      ym /= static_cast<double>(ts.size());
      char label[64];
      std::snprintf(label, sizeof label, "fit slope %.4f", slope);
      u.series.push_back(Series{label, {t.front(), t_end},
                                {ym + slope * (t.front() - tm), ym + slope * (t_end - tm)},
                                "#7f7f7f", true});
    }
  }
  out.emplace_back("u.svg", render_svg(u));

  Figure vol{"volume collapse", "t", "volume", true,
             {series("class_volume", 0), series("volume_integral", 1, true)}};
  out.emplace_back("volume.svg", render_svg(vol));

  Figure est{"estimate quantities", "t", "value", false,
             {series("uddot_plus_udot_max", 0), series("min_udot", 1), series("thm13_min", 2),
              series("min_eig_metric", 3)}};
  out.emplace_back("estimates.svg", render_svg(est));

  for (const auto& c : io::csv_columns()) {
    if (c == "t") continue;
    const bool log_y = c == "class_volume" || c == "volume_integral";
    out.emplace_back(c + ".svg", render_svg(Figure{c, "t", c, log_y, {series(c, 0)}}));
  }
  return out;
}

}  // namespace kflow::plot
