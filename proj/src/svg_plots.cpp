#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <fmt/format.h>

#include "cutquad/reporting.hpp"

namespace cutquad {

namespace fs = std::filesystem;

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                    "#9467bd", "#8c564b", "#e377c2", "#17becf"};

const char* color(std::size_t i) { return kPalette[i % std::size(kPalette)]; }

std::string g17(double v) { return fmt::format("{:.17g}", v); }

std::string escape_xml(const std::string& s) {
  std::string out;
  for (char c : s) {
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

// Pixel frame for the chart plots.
struct Frame {
  double width = 720, height = 480;
  double left = 80, right = 180, top = 40, bottom = 60;

  double x0() const { return left; }
  double x1() const { return width - right; }
  double y0() const { return height - bottom; }
  double y1() const { return top; }
};

struct Axis {
  double lo = 0.0, hi = 1.0;
  bool log = false;

  double t(double v) const {
    const double a = log ? std::log10(v) : v;
    return hi == lo ? 0.5 : (a - lo) / (hi - lo);
  }
};

Axis log_axis(double vmin, double vmax) {
  Axis a;
  a.log = true;
  a.lo = std::floor(std::log10(vmin));
  a.hi = std::ceil(std::log10(vmax));
  if (a.hi <= a.lo) a.hi = a.lo + 1.0;
  return a;
}

std::string header(const Frame& f, const std::string& title) {
  std::string s = fmt::format(
      "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" viewBox=\"0 0 {0} {1}\" "
      "font-family=\"sans-serif\" font-size=\"12\">\n",
      f.width, f.height);
  s += fmt::format("<rect x=\"0\" y=\"0\" width=\"{}\" height=\"{}\" fill=\"white\"/>\n", f.width, f.height);
  s += fmt::format("<text x=\"{}\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">{}</text>\n",
                   (f.x0() + f.x1()) / 2, escape_xml(title));
  s += fmt::format(
      "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n", f.x0(),
      f.y1(), f.x1() - f.x0(), f.y0() - f.y1());
  return s;
}

std::string log_ticks_y(const Frame& f, const Axis& a) {
  std::string s;
  for (int e = static_cast<int>(a.lo); e <= static_cast<int>(a.hi); ++e) {
    const double y = f.y0() - a.t(std::pow(10.0, e)) * (f.y0() - f.y1());
    s += fmt::format("<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"#ddd\"/>\n", f.x0(),
                     y, f.x1(), y);
    s += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"end\">1e{}</text>\n", f.x0() - 6, y + 4, e);
  }
  return s;
}

std::string legend(const Frame& f, const std::vector<std::string>& names) {
  std::string s = "<g class=\"legend\">\n";
  for (std::size_t i = 0; i < names.size(); ++i) {
    const double y = f.y1() + 10 + 18 * static_cast<double>(i);
    s += fmt::format("<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"{}\" stroke-width=\"2\"/>\n",
                     f.x1() + 10, y, f.x1() + 30, y, color(i));
    s += fmt::format("<text class=\"legend-entry\" x=\"{:.2f}\" y=\"{:.2f}\">{}</text>\n", f.x1() + 36, y + 4,
                     escape_xml(names[i]));
  }
  return s + "</g>\n";
}

}  // namespace

// Quadrature points ---------------------------------------------------------------

std::string points_svg_text(const TestCase& tc, const CartesianMesh& mesh, const QuadratureData& q) {
  if (mesh.dim() != 2 || tc.dim != 2) throw std::invalid_argument("point plots are 2D only");
  if (q.dim != 2 && !q.points.empty()) throw std::invalid_argument("point plots need a 2D rule");
  const Box& b = mesh.bounds;
  const double w = b.width(0), h = b.width(1);
  const double arm = 0.006 * std::max(w, h);

  std::string s = fmt::format(
      "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"600\" height=\"{}\" viewBox=\"{} {} {} {}\">\n",
      std::lround(600.0 * h / w), g17(b.lo[0]), g17(b.lo[1]), g17(w), g17(h));
  // Flip y so model coordinates appear verbatim below.
  s += fmt::format("<g transform=\"matrix(1 0 0 -1 0 {})\">\n", g17(b.lo[1] + b.hi[1]));
  s += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"white\"/>\n", g17(b.lo[0]),
                   g17(b.lo[1]), g17(w), g17(h));

  s += "<g class=\"grid\" stroke=\"#999\" stroke-width=\"1\" vector-effect=\"non-scaling-stroke\">\n";
  for (int i = 0; i <= mesh.divisions[0]; ++i) {
    const double x = i == mesh.divisions[0] ? b.hi[0] : b.lo[0] + i * mesh.cell_width(0);
    s += fmt::format("<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" vector-effect=\"non-scaling-stroke\"/>\n",
                     g17(x), g17(b.lo[1]), g17(b.hi[1]));
  }
  for (int j = 0; j <= mesh.divisions[1]; ++j) {
    const double y = j == mesh.divisions[1] ? b.hi[1] : b.lo[1] + j * mesh.cell_width(1);
    s += fmt::format("<line x1=\"{1}\" y1=\"{0}\" x2=\"{2}\" y2=\"{0}\" vector-effect=\"non-scaling-stroke\"/>\n",
                     g17(y), g17(b.lo[0]), g17(b.hi[0]));
  }
  s += "</g>\n";

  // Each cross starts with an absolute move to the point itself.
  s += "<g class=\"points\" stroke=\"black\" stroke-width=\"1\">\n";
  const std::string a = g17(arm), a2 = g17(2 * arm);
  for (const Point& p : q.points) {
    s += fmt::format(
        "<path class=\"qp\" d=\"M {} {} m -{} -{} l {} {} m 0 -{} l -{} {}\" vector-effect=\"non-scaling-stroke\"/>\n",
        g17(p[0]), g17(p[1]), a, a, a2, a2, a2, a2, a2);
  }
  s += "</g>\n";

  const Point c = tc.level_set.effective_center();
  const Point& r = tc.level_set.radii();
  std::string pts;
  for (int k = 0; k < kInterfaceSamples; ++k) {
    const double t = 2.0 * std::numbers::pi * k / (kInterfaceSamples - 1);
    if (k) pts += ' ';
    pts += fmt::format("{:.10g},{:.10g}", c[0] + r[0] * std::cos(t), c[1] + r[1] * std::sin(t));
  }
  s += fmt::format(
      "<polyline class=\"interface\" points=\"{}\" fill=\"none\" stroke=\"red\" stroke-width=\"2\" "
      "stroke-dasharray=\"6 4\" vector-effect=\"non-scaling-stroke\"/>\n",
      pts);
  s += "</g>\n</svg>\n";
  return s;
}

void plot_points_svg(const TestCase& tc, const CartesianMesh& mesh, const QuadratureData& q,
                     const fs::path& path) {
  write_text_file(path, points_svg_text(tc, mesh, q));
}

// Convergence ------------------------------------------------------------------

std::string convergence_svg_text(const std::vector<ConvergenceTable>& tables) {
  const Frame f;
  double hmin = INFINITY, hmax = 0.0, emin = INFINITY, emax = 0.0;
  for (const auto& t : tables) {
    for (const auto& row : t.rows) {
      if (!row.measurement.rel_error) continue;
      const double e = std::max(*row.measurement.rel_error, kPlotErrorFloor);
      hmin = std::min(hmin, row.h);
      hmax = std::max(hmax, row.h);
      emin = std::min(emin, e);
      emax = std::max(emax, e);
    }
  }
  if (hmax == 0.0) {
    hmin = 0.1;
    hmax = 1.0;
    emin = kPlotErrorFloor;
    emax = 1.0;
  }
  const Axis ax = log_axis(hmin, hmax), ay = log_axis(emin, emax);
  auto px = [&](double h) { return f.x0() + ax.t(h) * (f.x1() - f.x0()); };
  auto py = [&](double e) { return f.y0() - ay.t(e) * (f.y0() - f.y1()); };

  std::string title = "relative error vs mesh size";
  if (!tables.empty()) title += " (" + tables.front().testcase_id + ", " + to_string(tables.front().operation) + ")";
  std::string s = header(f, title);
  s += log_ticks_y(f, ay);
  for (int e = static_cast<int>(ax.lo); e <= static_cast<int>(ax.hi); ++e) {
    const double x = px(std::pow(10.0, e));
    s += fmt::format("<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"#ddd\"/>\n", x, f.y0(),
                     x, f.y1());
    s += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\">1e{}</text>\n", x, f.y0() + 16, e);
  }
  s += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\">h</text>\n", (f.x0() + f.x1()) / 2,
                   f.height - 16);
  s += fmt::format(
      "<text x=\"20\" y=\"{:.2f}\" text-anchor=\"middle\" transform=\"rotate(-90 20 {:.2f})\">relative error</text>\n",
      (f.y0() + f.y1()) / 2, (f.y0() + f.y1()) / 2);

  std::vector<std::string> names;
  for (std::size_t i = 0; i < tables.size(); ++i) {
    const auto& t = tables[i];
    names.push_back(t.integrator_name + " (p = " + t.order_text() + ")");
    std::string pts, markers;
    for (const auto& row : t.rows) {
      if (!row.measurement.rel_error) continue;
      const double x = px(row.h), y = py(std::max(*row.measurement.rel_error, kPlotErrorFloor));
      if (!pts.empty()) pts += ' ';
      pts += fmt::format("{:.2f},{:.2f}", x, y);
      markers += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"3.5\" fill=\"{}\"/>\n", x, y, color(i));
      markers += fmt::format("<text class=\"npoints\" x=\"{:.2f}\" y=\"{:.2f}\" font-size=\"10\" fill=\"{}\">{}</text>\n",
                             x + 5, y - 5, color(i), row.measurement.n_points);
    }
    s += fmt::format("<g class=\"series\" data-integrator=\"{}\">\n", escape_xml(t.integrator_name));
    s += fmt::format("<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\"/>\n", pts, color(i));
    s += markers + "</g>\n";
  }
  s += legend(f, names);
  return s + "</svg>\n";
}

void plot_convergence_svg(const std::vector<ConvergenceTable>& tables, const fs::path& path) {
  write_text_file(path, convergence_svg_text(tables));
}

// Shift --------------------------------------------------------------------------

std::string shift_svg_text(const std::vector<ShiftSeries>& series) {
  const Frame f;
  double emin = INFINITY, emax = 0.0;
  std::size_t steps = 1;
  for (const auto& s : series) {
    steps = std::max(steps, s.measurements.size());
    for (const auto& m : s.measurements) {
      if (!m.rel_error) continue;
      const double e = std::max(*m.rel_error, kPlotErrorFloor);
      emin = std::min(emin, e);
      emax = std::max(emax, e);
    }
  }
  if (emax == 0.0) {
    emin = kPlotErrorFloor;
    emax = 1.0;
  }
  const Axis ay = log_axis(emin, emax);
  Axis ax;
  ax.lo = 0.0;
  ax.hi = static_cast<double>(std::max<std::size_t>(steps - 1, 1));
  auto px = [&](double k) { return f.x0() + ax.t(k) * (f.x1() - f.x0()); };
  auto py = [&](double e) { return f.y0() - ay.t(e) * (f.y0() - f.y1()); };

  std::string title = "relative error along the shift";
  if (!series.empty()) title += " (" + series.front().testcase_id + ", " + to_string(series.front().operation) + ")";
  std::string s = header(f, title);
  s += log_ticks_y(f, ay);
  for (int k = 0; k <= 4; ++k) {
    const double step = ax.hi * k / 4.0;
    const double x = px(step);
    s += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\">{}</text>\n", x, f.y0() + 16,
                     std::lround(step));
  }
  s += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\">step</text>\n", (f.x0() + f.x1()) / 2,
                   f.height - 16);

  std::vector<std::string> names;
  for (std::size_t i = 0; i < series.size(); ++i) {
    names.push_back(series[i].integrator_name);
    std::string pts;
    for (std::size_t k = 0; k < series[i].measurements.size(); ++k) {
      const auto& m = series[i].measurements[k];
      if (!m.rel_error) continue;
      if (!pts.empty()) pts += ' ';
      pts += fmt::format("{:.2f},{:.2f}", px(static_cast<double>(k)), py(std::max(*m.rel_error, kPlotErrorFloor)));
    }
    s += fmt::format(
        "<polyline class=\"series\" data-integrator=\"{}\" points=\"{}\" fill=\"none\" stroke=\"{}\" "
        "stroke-width=\"1\"/>\n",
        escape_xml(series[i].integrator_name), pts, color(i));
  }
  s += legend(f, names);
  return s + "</svg>\n";
}

void plot_shift_svg(const std::vector<ShiftSeries>& series, const fs::path& path) {
  write_text_file(path, shift_svg_text(series));
}

}  // namespace cutquad
