#include "vibronic/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "vibronic/csv.hpp"

namespace vibronic::plot {

namespace {

constexpr double kWidth = 640, kHeight = 420;
constexpr double kLeft = 70, kRight = 20, kTop = 36, kBottom = 50;

char const *const kColors[] = {"#1f4e9c", "#c0392b", "#2e8b57", "#8e44ad", "#d68910", "#17a589", "#5d6d7e"};

std::string fmt(double v)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick(double v)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", std::abs(v) < 1e-12 ? 0.0 : v);
  return buf;
}

std::string escape(std::string const &s)
{
  std::string out;
  for (char c : s) {
    if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else if (c == '&') out += "&amp;";
    else out += c;
  }
  return out;
}

struct Frame
{
  double x0, x1, y0, y1;

  double px(double x) const { return kLeft + (x - x0) / (x1 - x0) * (kWidth - kLeft - kRight); }
  double py(double y) const { return kHeight - kBottom - (y - y0) / (y1 - y0) * (kHeight - kTop - kBottom); }
};

std::pair<double, double> padded_range(double lo, double hi)
{
  if (!(hi > lo)) return {lo - 1.0, hi + 1.0};
  double const pad = 0.05 * (hi - lo);
  return {lo - pad, hi + pad};
}

std::string axes(Frame const &f, std::string const &title, std::string const &xl, std::string const &yl)
{
  std::string s;
  s += "<rect x='" + fmt(kLeft) + "' y='" + fmt(kTop) + "' width='" + fmt(kWidth - kLeft - kRight) + "' height='" +
       fmt(kHeight - kTop - kBottom) + "' fill='none' stroke='#333'/>\n";
  for (int i = 0; i <= 4; ++i) {
    double const xv = f.x0 + (f.x1 - f.x0) * i / 4.0, yv = f.y0 + (f.y1 - f.y0) * i / 4.0;
    s += "<text x='" + fmt(f.px(xv)) + "' y='" + fmt(kHeight - kBottom + 16) + "' font-size='11' text-anchor='middle'>" +
         tick(xv) + "</text>\n";
    s += "<text x='" + fmt(kLeft - 6) + "' y='" + fmt(f.py(yv) + 4) + "' font-size='11' text-anchor='end'>" + tick(yv) +
         "</text>\n";
  }
  s += "<text x='" + fmt(kWidth / 2) + "' y='20' font-size='14' text-anchor='middle'>" + escape(title) + "</text>\n";
  s += "<text x='" + fmt(kWidth / 2) + "' y='" + fmt(kHeight - 12) + "' font-size='12' text-anchor='middle'>" +
       escape(xl) + "</text>\n";
  s += "<text x='16' y='" + fmt(kHeight / 2) + "' font-size='12' text-anchor='middle' transform='rotate(-90 16 " +
       fmt(kHeight / 2) + ")'>" + escape(yl) + "</text>\n";
  return s;
}

std::string polyline(Frame const &f, std::vector<std::pair<double, double>> const &pts, std::string const &color,
                     bool dashed)
{
  std::string s = "<polyline fill='none' stroke='" + color + "' stroke-width='1.4'";
  if (dashed) s += " stroke-dasharray='5,3'";
  s += " points='";
  for (auto const &[x, y] : pts)
    if (std::isfinite(x) && std::isfinite(y)) s += fmt(f.px(x)) + "," + fmt(f.py(y)) + " ";
  return s + "'/>\n";
}

char const *header() { return "<svg xmlns='http://www.w3.org/2000/svg' width='640' height='420' viewBox='0 0 640 420'>\n"; }

} // namespace

std::string render(LinePlot const &p)
{
  if (p.x.empty()) throw std::invalid_argument("plot: empty x axis");
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (auto const &s : p.series) {
    if (s.y.size() != p.x.size()) throw std::invalid_argument("plot: series length differs from x");
    for (double v : s.y)
      if (std::isfinite(v)) lo = std::min(lo, v), hi = std::max(hi, v);
  }
  if (!std::isfinite(lo)) lo = 0.0, hi = 1.0;
  auto const [y0, y1] = padded_range(lo, hi);
  Frame const f{p.x.front(), p.x.back() > p.x.front() ? p.x.back() : p.x.front() + 1.0, y0, y1};

  std::string svg = header();
  svg += "<rect width='100%' height='100%' fill='white'/>\n";
  svg += axes(f, p.title, p.xlabel, p.ylabel);
  for (std::size_t k = 0; k < p.series.size(); ++k) {
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = 0; i < p.x.size(); ++i) pts.emplace_back(p.x[i], p.series[k].y[i]);
    std::string const color = kColors[k % std::size(kColors)];
    svg += polyline(f, pts, color, p.series[k].dashed);
    double const ly = kTop + 14.0 + 14.0 * double(k);
    svg += "<text x='" + fmt(kWidth - kRight - 8) + "' y='" + fmt(ly) + "' font-size='11' text-anchor='end' fill='" +
           color + "'>" + escape(p.series[k].name) + "</text>\n";
  }
  return svg + "</svg>\n";
}

std::string render(Heatmap const &h)
{
  if (h.x.size() < 2 || h.y.size() < 2) throw std::invalid_argument("plot: heatmap needs a 2-D grid");
  if (h.values.rows() != Eigen::Index(h.x.size()) || h.values.cols() != Eigen::Index(h.y.size()))
    throw std::invalid_argument("plot: heatmap values do not match the axes");
  Frame const  f{h.x.front(), h.x.back(), h.y.front(), h.y.back()};
  double const scale = std::max(h.values.cwiseAbs().maxCoeff(), 1e-300);
  double const cw = (kWidth - kLeft - kRight) / double(h.x.size()), ch = (kHeight - kTop - kBottom) / double(h.y.size());

  // Coarsen very fine grids so the file stays small.
  std::size_t const stride = std::max<std::size_t>(1, std::max(h.x.size(), h.y.size()) / 160);
  std::string       svg    = header();
  svg += "<rect width='100%' height='100%' fill='white'/>\n";
  for (std::size_t i = 0; i < h.x.size(); i += stride)
    for (std::size_t j = 0; j < h.y.size(); j += stride) {
      double const v = h.values(Eigen::Index(i), Eigen::Index(j)) / scale;
      if (std::abs(v) < 0.01) continue;
      int const    shade = int(255.0 * (1.0 - std::min(1.0, std::abs(v))));
      char         color[16];
      if (v > 0) std::snprintf(color, sizeof color, "#%02x%02xff", shade, shade);
      else std::snprintf(color, sizeof color, "#ff%02x%02x", shade, shade);
      svg += "<rect x='" + fmt(f.px(h.x[i]) - cw / 2) + "' y='" + fmt(f.py(h.y[j]) - ch * double(stride) + ch / 2) +
             "' width='" + fmt(cw * double(stride)) + "' height='" + fmt(ch * double(stride)) + "' fill='" + color +
             "'/>\n";
    }
  svg += axes(f, h.title, h.xlabel, h.ylabel);
  if (!h.path.empty()) svg += polyline(f, h.path, "#333", true);
  for (auto const &[x, y] : h.markers)
    svg += "<circle cx='" + fmt(f.px(x)) + "' cy='" + fmt(f.py(y)) + "' r='4' fill='none' stroke='#c0392b' stroke-width='1.5'/>\n";
  return svg + "</svg>\n";
}

bool save(std::filesystem::path const &path, LinePlot const &p) noexcept
{
  try {
    csv::write_atomic(path, render(p));
    return true;
  } catch (...) {
    return false;
  }
}

bool save(std::filesystem::path const &path, Heatmap const &h) noexcept
{
  try {
    csv::write_atomic(path, render(h));
    return true;
  } catch (...) {
    return false;
  }
}

} // namespace vibronic::plot
