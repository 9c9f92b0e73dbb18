#include "specshare/report.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "specshare/errors.hpp"
#include "specshare/sweep.hpp"

namespace specshare {

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 480.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 170.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 60.0;

constexpr std::array<const char*, kMaxCurves> kCurveColors{
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"};

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double parse_cell(const std::string& text, const std::string& column, std::size_t row) {
  if (text == "inf") return std::numeric_limits<double>::infinity();
  if (text == "-inf") return -std::numeric_limits<double>::infinity();
  if (text == "nan") return std::numeric_limits<double>::quiet_NaN();
  double v = 0.0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || end != text.data() + text.size()) {
    throw ConfigError(fmt::format("row {}: column '{}' has malformed value '{}'", row, column, text));
  }
  return v;
}

std::string label(double v) { return fmt::format("{:.3g}", v); }

struct Range {
  double lo = 0.0;
  double hi = 1.0;

  static Range of(const std::vector<double>& values) {
    Range r{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    for (double v : values) {
      if (!std::isfinite(v)) continue;
      r.lo = std::min(r.lo, v);
      r.hi = std::max(r.hi, v);
    }
    if (!std::isfinite(r.lo)) return {0.0, 1.0};
    if (r.hi - r.lo < 1e-12 * std::max(1.0, std::abs(r.hi))) {
      const double pad = std::max(0.5, std::abs(r.hi) * 0.1);
      return {r.lo - pad, r.hi + pad};
    }
    return r;
  }
  double frac(double v) const { return (v - lo) / (hi - lo); }
};

struct Frame {
  Range x, y;
  double px(double v) const { return kLeft + x.frac(v) * (kWidth - kLeft - kRight); }
  double py(double v) const { return kHeight - kBottom - y.frac(v) * (kHeight - kTop - kBottom); }
};

std::string escape(const std::string& s) {
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

std::string svg_open(const std::string& title) {
  return fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" viewBox=\"0 0 {0} {1}\" "
      "font-family=\"sans-serif\" font-size=\"12\">\n"
      "<rect width=\"{0}\" height=\"{1}\" fill=\"white\"/>\n"
      "<text x=\"{2}\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">{3}</text>\n",
      kWidth, kHeight, (kLeft + kWidth - kRight) / 2, escape(title));
}

// Tick values at 1, 2 or 5 times a power of ten, inside [lo, hi].
std::vector<double> nice_ticks(double lo, double hi) {
  const double raw = (hi - lo) / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    step = m * mag;
    if (step >= raw) break;
  }
  std::vector<double> ticks;
  for (double v = std::ceil(lo / step - 1e-9) * step; v <= hi + step * 1e-9; v += step) {
    ticks.push_back(std::abs(v) < step * 1e-9 ? 0.0 : v);
  }
  return ticks;
}

// Axis box, ticks and labels; tick values are drawn from `ticks` (defaults to the frame).
std::string axes(const Frame& f, const std::string& xname, const std::string& yname, bool grid_lines,
                 const Frame* ticks = nullptr) {
  const Frame& t = ticks ? *ticks : f;
  std::string out;
  const double x0 = kLeft, x1 = kWidth - kRight, y0 = kHeight - kBottom, y1 = kTop;
  out += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n",
                     x0, y1, x1 - x0, y0 - y1);
  for (double xv : nice_ticks(t.x.lo, t.x.hi)) {
    const double px = f.px(xv);
    out += fmt::format("<line x1=\"{0:.2f}\" y1=\"{1}\" x2=\"{0:.2f}\" y2=\"{2}\" stroke=\"black\"/>\n", px, y0, y0 + 5);
    out += fmt::format("<text x=\"{:.2f}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n", px, y0 + 20, label(xv));
  }
  for (double yv : nice_ticks(t.y.lo, t.y.hi)) {
    const double py = f.py(yv);
    out += fmt::format("<line x1=\"{0}\" y1=\"{1:.2f}\" x2=\"{2}\" y2=\"{1:.2f}\" stroke=\"black\"/>\n", x0 - 5, py, x0);
    if (grid_lines) {
      out += fmt::format("<line x1=\"{0}\" y1=\"{1:.2f}\" x2=\"{2}\" y2=\"{1:.2f}\" stroke=\"#dddddd\"/>\n", x0, py, x1);
    }
    out += fmt::format("<text x=\"{}\" y=\"{:.2f}\" text-anchor=\"end\">{}</text>\n", x0 - 8, py + 4, label(yv));
  }
  out += fmt::format("<text x=\"{:.2f}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n", (x0 + x1) / 2, kHeight - 15,
                     escape(xname));
  out += fmt::format(
      "<text x=\"20\" y=\"{0:.2f}\" text-anchor=\"middle\" transform=\"rotate(-90 20 {0:.2f})\">{1}</text>\n",
      (y0 + y1) / 2, escape(yname));
  return out;
}

// Five-stop viridis approximation.
std::string colormap(double t) {
  static constexpr std::array<std::array<double, 3>, 5> stops{{{68, 1, 84}, {59, 82, 139}, {33, 145, 140},
                                                                {94, 201, 98}, {253, 231, 37}}};
  t = std::clamp(t, 0.0, 1.0) * 4.0;
  const auto i = std::min<std::size_t>(static_cast<std::size_t>(t), 3);
  const double w = t - static_cast<double>(i);
  std::array<int, 3> c{};
  for (int k = 0; k < 3; ++k) c[k] = static_cast<int>(std::lround(stops[i][k] * (1 - w) + stops[i + 1][k] * w));
  return fmt::format("rgb({},{},{})", c[0], c[1], c[2]);
}

std::vector<double> distinct(const std::vector<double>& v) {
  std::set<double> s(v.begin(), v.end());
  return {s.begin(), s.end()};
}

std::size_t changes(const std::vector<double>& v) {
  std::size_t n = 0;
  for (std::size_t i = 1; i < v.size(); ++i) n += v[i] != v[i - 1];
  return n;
}

// Swept parameters ordered outer (slowest varying) first.
std::vector<std::string> varying_parameters(const SweepTable& t) {
  std::vector<std::string> out;
  for (const auto& name : sweep_parameters()) {
    if (distinct(t.values.at(name)).size() > 1) out.push_back(name);
  }
  std::stable_sort(out.begin(), out.end(), [&](const std::string& a, const std::string& b) {
    return changes(t.values.at(a)) < changes(t.values.at(b));
  });
  if (out.size() > 2) {
    throw ConfigError(fmt::format("cannot plot a sweep over {} parameters", out.size()));
  }
  return out;
}

bool has_values(const SweepTable& t, const std::string& column) {
  const auto& p = t.present.at(column);
  return std::any_of(p.begin(), p.end(), [](bool b) { return b; });
}

std::string render_lines(const SweepTable& t, const std::vector<std::string>& vary, const std::string& metric) {
  const std::string xname = vary.empty() ? "q1" : vary[0];
  const std::optional<std::string> series = vary.size() > 1 ? std::optional(vary[1]) : std::nullopt;
  const auto& xs = t.values.at(xname);
  const auto& ys = t.values.at(metric);
  // Simulated counterpart drawn as markers over the analytic curve.
  std::optional<std::string> overlay;
  if ((metric == "aoi1" || metric == "aoi2") && has_values(t, metric + "_sim")) overlay = metric + "_sim";

  std::vector<double> all_y = ys;
  if (overlay) all_y.insert(all_y.end(), t.values.at(*overlay).begin(), t.values.at(*overlay).end());
  Frame f{Range::of(xs), Range::of(all_y)};
  if (std::none_of(all_y.begin(), all_y.end(), [](double v) { return std::isfinite(v); })) {
    throw ConfigError(fmt::format("column '{}' has no finite values to plot", metric));
  }

  std::string out = svg_open(series ? fmt::format("{} vs {} by {}", metric, xname, *series)
                                    : fmt::format("{} vs {}", metric, xname));
  out += axes(f, xname, metric, true);
  const std::vector<double> keys = series ? distinct(t.values.at(*series)) : std::vector<double>{0.0};
  for (std::size_t c = 0; c < keys.size(); ++c) {
    const char* color = kCurveColors[c % kCurveColors.size()];
    std::vector<std::pair<double, std::size_t>> pts;
    for (std::size_t r = 0; r < t.rows; ++r) {
      if (!series || t.values.at(*series)[r] == keys[c]) pts.emplace_back(xs[r], r);
    }
    std::sort(pts.begin(), pts.end());
    // Break the polyline at non-finite values.
    std::string path;
    for (const auto& [x, r] : pts) {
      if (!std::isfinite(ys[r])) {
        if (!path.empty()) out += fmt::format("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"2\" points=\"{}\"/>\n", color, path);
        path.clear();
        continue;
      }
      path += fmt::format("{}{:.2f},{:.2f}", path.empty() ? "" : " ", f.px(x), f.py(ys[r]));
    }
    if (!path.empty()) out += fmt::format("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"2\" points=\"{}\"/>\n", color, path);
    if (overlay) {
      const auto& sim = t.values.at(*overlay);
      for (const auto& [x, r] : pts) {
        if (std::isfinite(sim[r])) {
          out += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"3\" fill=\"none\" stroke=\"{}\"/>\n", f.px(x), f.py(sim[r]), color);
        }
      }
    }
    if (series) {
      const double ly = kTop + 20.0 * static_cast<double>(c) + 10.0;
      const double lx = kWidth - kRight + 15.0;
      out += fmt::format("<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{}\" stroke-width=\"2\"/>\n", lx, ly, lx + 25, ly, color);
      out += fmt::format("<text x=\"{}\" y=\"{}\">{} = {}</text>\n", lx + 32, ly + 4, escape(*series), label(keys[c]));
    }
  }
  if (overlay) {
    const double ly = kHeight - kBottom - 10.0;
    out += fmt::format("<circle cx=\"{}\" cy=\"{}\" r=\"3\" fill=\"none\" stroke=\"black\"/>\n", kWidth - kRight + 27, ly);
    out += fmt::format("<text x=\"{}\" y=\"{}\">simulated</text>\n", kWidth - kRight + 47, ly + 4);
  }
  out += "</svg>\n";
  return out;
}

std::string render_heatmap(const SweepTable& t, const std::vector<std::string>& vary, const std::string& metric) {
  if (vary.size() != 2) throw ConfigError("a heatmap needs a sweep over two parameters");
  const auto& xs = t.values.at(vary[0]);
  const auto& ys = t.values.at(vary[1]);
  const auto& zs = t.values.at(metric);
  const std::vector<double> xk = distinct(xs), yk = distinct(ys);
  const Range z = Range::of(zs);
  if (std::none_of(zs.begin(), zs.end(), [](double v) { return std::isfinite(v); })) {
    throw ConfigError(fmt::format("column '{}' has no finite values to plot", metric));
  }

  // Cells centered on grid values; the frame spans half a cell beyond the extremes.
  auto padded = [](const std::vector<double>& k) {
    const double half = k.size() > 1 ? (k.back() - k.front()) / static_cast<double>(k.size() - 1) / 2 : 0.5;
    return Range{k.front() - half, k.back() + half};
  };
  Frame f{padded(xk), padded(yk)};
  const double cw = (kWidth - kLeft - kRight) / static_cast<double>(xk.size());
  const double ch = (kHeight - kTop - kBottom) / static_cast<double>(yk.size());

  std::string out = svg_open(fmt::format("{} over ({}, {})", metric, vary[0], vary[1]));
  for (std::size_t r = 0; r < t.rows; ++r) {
    const auto xi = static_cast<double>(std::lower_bound(xk.begin(), xk.end(), xs[r]) - xk.begin());
    const auto yi = static_cast<double>(std::lower_bound(yk.begin(), yk.end(), ys[r]) - yk.begin());
    const std::string fill = std::isfinite(zs[r]) ? colormap(z.frac(zs[r])) : std::string("#bbbbbb");
    out += fmt::format("<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" fill=\"{}\"/>\n",
                       kLeft + xi * cw, kHeight - kBottom - (yi + 1) * ch, cw + 0.3, ch + 0.3, fill);
  }
  const Frame data{Range::of(xk), Range::of(yk)};
  out += axes(f, vary[0], vary[1], false, &data);

  // Color bar.
  const double bx = kWidth - kRight + 30.0, bw = 20.0, bh = kHeight - kTop - kBottom;
  for (int i = 0; i < 50; ++i) {
    out += fmt::format("<rect x=\"{}\" y=\"{:.2f}\" width=\"{}\" height=\"{:.2f}\" fill=\"{}\"/>\n", bx,
                       kTop + bh * (49 - i) / 50.0, bw, bh / 50.0 + 0.3, colormap(i / 49.0));
  }
  out += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n", bx, kTop, bw, bh);
  for (int i = 0; i <= 4; ++i) {
    const double v = z.lo + (z.hi - z.lo) * i / 4.0;
    out += fmt::format("<text x=\"{}\" y=\"{:.2f}\">{}</text>\n", bx + bw + 6, kTop + bh * (1 - i / 4.0) + 4, label(v));
  }
  out += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n", bx + bw / 2, kTop - 8, escape(metric));
  out += "</svg>\n";
  return out;
}

}  // namespace

SweepTable parse_sweep_csv(const std::string& text) {
  std::stringstream ss(text);
  std::string line;
  if (!std::getline(ss, line)) throw ConfigError("sweep CSV is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  SweepTable t;
  t.columns = split_line(line);
  for (const auto& c : sweep_columns()) {
    if (std::find(t.columns.begin(), t.columns.end(), c) == t.columns.end()) {
      throw ConfigError(fmt::format("sweep CSV is missing column '{}'", c));
    }
  }
  for (const auto& c : t.columns) {
    if (std::find(sweep_columns().begin(), sweep_columns().end(), c) == sweep_columns().end()) {
      throw ConfigError(fmt::format("sweep CSV has unexpected column '{}'", c));
    }
    t.values[c];
    t.present[c];
  }
  while (std::getline(ss, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    ++t.rows;
    const auto cells = split_line(line);
    if (cells.size() != t.columns.size()) {
      throw ConfigError(fmt::format("row {}: expected {} cells, found {}", t.rows, t.columns.size(), cells.size()));
    }
    for (std::size_t i = 0; i < cells.size(); ++i) {
      const bool present = !cells[i].empty();
      t.present[t.columns[i]].push_back(present);
      t.values[t.columns[i]].push_back(present ? parse_cell(cells[i], t.columns[i], t.rows)
                                               : std::numeric_limits<double>::quiet_NaN());
    }
  }
  if (t.rows == 0) throw ConfigError("sweep CSV has a header but no rows");
  return t;
}

std::string render_report(const std::string& csv_text, const ReportOptions& options) {
  const SweepTable t = parse_sweep_csv(csv_text);
  const auto vary = varying_parameters(t);
  PlotKind kind = PlotKind::Line;
  if (options.kind) {
    kind = *options.kind;
  } else if (vary.size() == 2 && distinct(t.values.at(vary[1])).size() > kMaxCurves) {
    kind = PlotKind::Heatmap;
  }
  std::string metric;
  if (options.metric) {
    metric = *options.metric;
    if (!t.values.count(metric)) throw ConfigError(fmt::format("unknown metric column '{}'", metric));
  } else if (kind == PlotKind::Heatmap) {
    metric = "P3";
  } else {
    metric = has_values(t, "aoi2") ? "aoi2" : "aoi2_sim";
  }
  if (!has_values(t, metric)) throw ConfigError(fmt::format("column '{}' is empty", metric));
  return kind == PlotKind::Heatmap ? render_heatmap(t, vary, metric) : render_lines(t, vary, metric);
}

void write_report(const std::filesystem::path& csv, const std::filesystem::path& svg, const ReportOptions& options) {
  std::ifstream in(csv);
  if (!in) throw ConfigError(fmt::format("cannot read sweep CSV '{}'", csv.string()));
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string rendered = render_report(ss.str(), options);
  std::ofstream out(svg);
  if (!out) throw std::runtime_error(fmt::format("cannot write '{}'", svg.string()));
  out << rendered;
  if (!out) throw std::runtime_error(fmt::format("failed writing '{}'", svg.string()));
}

}  // namespace specshare
