#include "coxgp/plots.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "coxgp/error.hpp"
#include "coxgp/io.hpp"

namespace coxgp {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 400.0;
constexpr double kMargin = 50.0;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

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

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void finish() {
    if (!(lo <= hi)) {
      lo = 0.0;
      hi = 1.0;
    }
    if (hi == lo) {
      lo -= 0.5;
      hi += 0.5;
    }
  }
};

struct Frame {
  double x0, y0, w, h;
  Range xr, yr;
  double px(double x) const { return x0 + (x - xr.lo) / (xr.hi - xr.lo) * w; }
  double py(double y) const { return y0 + h - (y - yr.lo) / (yr.hi - yr.lo) * h; }
};

void axes(std::ostringstream& o, const Frame& f) {
  o << "<rect x=\"" << num(f.x0) << "\" y=\"" << num(f.y0) << "\" width=\"" << num(f.w) << "\" height=\"" << num(f.h)
    << "\" fill=\"none\" stroke=\"#444\"/>\n";
  o << "<text x=\"" << num(f.x0) << "\" y=\"" << num(f.y0 + f.h + 16) << "\" font-size=\"11\">" << label(f.xr.lo)
    << "</text>\n";
  o << "<text x=\"" << num(f.x0 + f.w) << "\" y=\"" << num(f.y0 + f.h + 16)
    << "\" font-size=\"11\" text-anchor=\"end\">" << label(f.xr.hi) << "</text>\n";
  o << "<text x=\"" << num(f.x0 - 4) << "\" y=\"" << num(f.y0 + f.h)
    << "\" font-size=\"11\" text-anchor=\"end\">" << label(f.yr.lo) << "</text>\n";
  o << "<text x=\"" << num(f.x0 - 4) << "\" y=\"" << num(f.y0 + 10)
    << "\" font-size=\"11\" text-anchor=\"end\">" << label(f.yr.hi) << "</text>\n";
}

void polyline(std::ostringstream& o, const Frame& f, std::span<const double> x, std::span<const double> y,
              const std::string& color, bool dashed, const std::string& name) {
  o << "<polyline class=\"series\" data-name=\"" << escape(name) << "\" fill=\"none\" stroke=\"" << color
    << "\" stroke-width=\"1.5\"" << (dashed ? " stroke-dasharray=\"5,3\"" : "") << " points=\"";
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(y[i])) continue;
    o << num(f.px(x[i])) << ',' << num(f.py(y[i])) << ' ';
  }
  o << "\"/>\n";
}

std::string header(double w, double h) {
  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(w) << "\" height=\"" << num(h)
    << "\" viewBox=\"0 0 " << num(w) << ' ' << num(h) << "\">\n"
    << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  return o.str();
}

// Five-stop palette, interpolated linearly in RGB.
std::string color_at(double t) {
  static constexpr std::array<std::array<double, 3>, 5> stops{{{68, 1, 84}, {59, 82, 139}, {33, 145, 140},
                                                               {94, 201, 98}, {253, 231, 37}}};
  t = std::clamp(t, 0.0, 1.0) * 4.0;
  const auto i = std::min<std::size_t>(static_cast<std::size_t>(t), 3);
  const double u = t - static_cast<double>(i);
  char buf[8];
  const auto c = [&](std::size_t k) {
    return static_cast<int>(std::lround(stops[i][k] + u * (stops[i + 1][k] - stops[i][k])));
  };
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", c(0), c(1), c(2));
  return buf;
}

}  // namespace

std::string line_plot_svg(std::span<const double> x, std::span<const Series> lines,
                          const std::optional<BandSeries>& band, const std::string& title) {
  for (const auto& s : lines) require(s.y.size() == x.size(), "line plot: series length mismatch");
  Frame f{kMargin, kMargin, kWidth - 2 * kMargin, kHeight - 2 * kMargin, {}, {}};
  for (double v : x) f.xr.add(v);
  for (const auto& s : lines) {
    for (double v : s.y) f.yr.add(v);
  }
  if (band) {
    require(band->lower.size() == x.size() && band->upper.size() == x.size(), "line plot: band length mismatch");
    for (double v : band->lower) f.yr.add(v);
    for (double v : band->upper) f.yr.add(v);
  }
  f.xr.finish();
  f.yr.finish();

  std::ostringstream o;
  o << header(kWidth, kHeight);
  o << "<text x=\"" << num(kWidth / 2) << "\" y=\"24\" font-size=\"14\" text-anchor=\"middle\">" << escape(title)
    << "</text>\n";
  if (band) {
    o << "<polygon class=\"series\" data-name=\"" << escape(band->name) << "\" fill=\"" << band->color
      << "\" fill-opacity=\"0.25\" stroke=\"none\" points=\"";
    for (std::size_t i = 0; i < x.size(); ++i) o << num(f.px(x[i])) << ',' << num(f.py(band->upper[i])) << ' ';
    for (std::size_t i = x.size(); i-- > 0;) o << num(f.px(x[i])) << ',' << num(f.py(band->lower[i])) << ' ';
    o << "\"/>\n";
  }
  for (const auto& s : lines) polyline(o, f, x, s.y, s.color, s.dashed, s.name);
  axes(o, f);
  double ly = kMargin + 14;
  auto legend = [&](const std::string& name, const std::string& color) {
    o << "<rect x=\"" << num(kWidth - kMargin - 130) << "\" y=\"" << num(ly - 9) << "\" width=\"10\" height=\"10\" fill=\""
      << color << "\"/>\n<text x=\"" << num(kWidth - kMargin - 115) << "\" y=\"" << num(ly)
      << "\" font-size=\"11\">" << escape(name) << "</text>\n";
    ly += 15;
  };
  if (band) legend(band->name, band->color);
  for (const auto& s : lines) legend(s.name, s.color);
  o << "</svg>\n";
  return o.str();
}

std::string estimate_plot_svg(const IntensityEstimate& estimate, std::span<const double> truth,
                              std::span<const double> baseline, const std::string& title) {
  require(estimate.grid.dim() == 1, "estimate plot: only 1-d estimates are drawn as lines");
  std::vector<double> x(estimate.grid.size());
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = estimate.grid.coordinate(i);
  std::vector<Series> lines;
  lines.push_back({"posterior mean", estimate.mean, "#1f5fbf", false});
  if (!truth.empty()) lines.push_back({"truth", std::vector<double>(truth.begin(), truth.end()), "#000000", false});
  if (!baseline.empty()) {
    lines.push_back({"kernel", std::vector<double>(baseline.begin(), baseline.end()), "#c0392b", true});
  }
  const BandSeries band{label(100.0 * estimate.level) + "% band", estimate.lower, estimate.upper, "#1f5fbf"};
  return line_plot_svg(x, lines, band, title);
}

std::string heatmap_svg(const EvalGrid& grid, std::span<const double> values, const std::string& title) {
  require(grid.dim() == 2, "heatmap: grid must be 2-d");
  require(values.size() == grid.size(), "heatmap: values do not match the grid");
  Range r;
  for (double v : values) r.add(v);
  r.finish();
  const std::size_t m = grid.points_per_axis();
  const double size = kHeight - 2 * kMargin;
  const double cell = size / static_cast<double>(m);
  std::ostringstream o;
  o << header(kWidth, kHeight);
  o << "<text x=\"" << num(kWidth / 2) << "\" y=\"24\" font-size=\"14\" text-anchor=\"middle\">" << escape(title)
    << "</text>\n<g class=\"heatmap\">\n";
  // Row-major with z1 varying slowest: z1 runs along x, z2 upwards.
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const double v = values[i * m + j];
      const double t = (v - r.lo) / (r.hi - r.lo);
      o << "<rect x=\"" << num(kMargin + static_cast<double>(i) * cell) << "\" y=\""
        << num(kMargin + size - static_cast<double>(j + 1) * cell) << "\" width=\"" << num(cell + 0.05)
        << "\" height=\"" << num(cell + 0.05) << "\" fill=\"" << color_at(t) << "\"/>\n";
    }
  }
  o << "</g>\n";
  const double bx = kMargin + size + 30;
  o << "<g class=\"colorbar\">\n";
  constexpr int kSteps = 50;
  for (int s = 0; s < kSteps; ++s) {
    const double t = (s + 0.5) / kSteps;
    o << "<rect x=\"" << num(bx) << "\" y=\"" << num(kMargin + size * (1.0 - static_cast<double>(s + 1) / kSteps))
      << "\" width=\"16\" height=\"" << num(size / kSteps + 0.05) << "\" fill=\"" << color_at(t) << "\"/>\n";
  }
  o << "</g>\n<text x=\"" << num(bx + 22) << "\" y=\"" << num(kMargin + 10) << "\" font-size=\"11\">" << label(r.hi)
    << "</text>\n<text x=\"" << num(bx + 22) << "\" y=\"" << num(kMargin + size) << "\" font-size=\"11\">"
    << label(r.lo) << "</text>\n";
  o << "<text class=\"range\" x=\"" << num(kMargin) << "\" y=\"" << num(kHeight - 15)
    << "\" font-size=\"12\">linear scale, range [" << label(r.lo) << ", " << label(r.hi) << "]</text>\n";
  o << "<text x=\"" << num(kMargin + size / 2) << "\" y=\"" << num(kMargin + size + 16)
    << "\" font-size=\"11\" text-anchor=\"middle\">z1</text>\n";
  o << "</svg>\n";
  return o.str();
}

std::optional<std::string> trace_plot_svg(std::span<const SweepRecord> sweeps, const std::string& title) {
  if (sweeps.size() < 2) return std::nullopt;
  const std::size_t d = sweeps.front().ell.size();
  // Keep at most ~2000 points per panel.
  const std::size_t stride = std::max<std::size_t>(1, sweeps.size() / 2000);
  std::vector<double> x;
  std::vector<std::vector<double>> panels(d + 2);
  for (std::size_t i = 0; i < sweeps.size(); i += stride) {
    x.push_back(static_cast<double>(sweeps[i].sweep));
    panels[0].push_back(sweeps[i].rho_star);
    for (std::size_t j = 0; j < d; ++j) panels[1 + j].push_back(sweeps[i].ell[j]);
    panels[d + 1].push_back(sweeps[i].loglik);
  }
  std::vector<std::string> names{"rho*"};
  for (std::size_t j = 0; j < d; ++j) names.push_back("ell_" + std::to_string(j + 1));
  names.push_back("loglik");

  const double panel_h = 140.0;
  const double height = kMargin + static_cast<double>(panels.size()) * (panel_h + 30.0);
  std::ostringstream o;
  o << header(kWidth, height);
  o << "<text x=\"" << num(kWidth / 2) << "\" y=\"24\" font-size=\"14\" text-anchor=\"middle\">" << escape(title)
    << "</text>\n";
  for (std::size_t p = 0; p < panels.size(); ++p) {
    Frame f{kMargin + 20, kMargin + static_cast<double>(p) * (panel_h + 30.0), kWidth - 2 * kMargin - 20, panel_h, {}, {}};
    for (double v : x) f.xr.add(v);
    for (double v : panels[p]) f.yr.add(v);
    f.xr.finish();
    f.yr.finish();
    polyline(o, f, x, panels[p], "#1f5fbf", false, names[p]);
    axes(o, f);
    o << "<text x=\"" << num(f.x0 + 6) << "\" y=\"" << num(f.y0 + 14) << "\" font-size=\"12\">" << escape(names[p])
      << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

}  // namespace coxgp
