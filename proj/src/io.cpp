#include "aqsim/io.hpp"

#include <fmt/format.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace aqsim::io {

std::string format_double(double v) {
  // shortest representation that round-trips
  for (int prec = 6; prec <= 17; ++prec) {
    std::string s = fmt::format("{:.{}g}", v, prec);
    if (std::stod(s) == v) return s;
  }
  return fmt::format("{:.17g}", v);
}

std::string csv_to_string(const CsvTable& table) {
  std::string a;
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    if (i) a += ',';
    a += table.header[i];
  }
  a += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) a += ',';
      a += format_double(row[i]);
    }
    a += '\n';
  }
  return a;
}

CsvTable csv_from_string(const std::string& text) {
  CsvTable t;
  std::istringstream in(text);
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string cell;
    if (first) {
      while (std::getline(ls, cell, ',')) t.header.push_back(cell);
      first = false;
    } else {
      std::vector<double> row;
      while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
      t.rows.push_back(std::move(row));
    }
  }
  return t;
}

void atomic_write(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::create_directories(path.parent_path());
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error(fmt::format("cannot write {}", tmp.string()));
    out << content;
  }
  std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(fmt::format("cannot read {}", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_csv(const std::filesystem::path& path, const CsvTable& table) {
  atomic_write(path, csv_to_string(table));
}

CsvTable read_csv(const std::filesystem::path& path) {
  return csv_from_string(read_file(path));
}

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                    "#9467bd", "#8c564b", "#17becf", "#7f7f7f"};

struct AxisMap {
  double lo, hi;
  bool log;
  double px0, px1;
  double map(double v) const {
    double u = log ? std::log10(v) : v;
    double a = log ? std::log10(lo) : lo;
    double b = log ? std::log10(hi) : hi;
    if (b <= a) b = a + 1;
    return px0 + (u - a) / (b - a) * (px1 - px0);
  }
};

std::string esc(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '<') {
      out += "&lt;";
    } else if (c == '>') {
      out += "&gt;";
    } else if (c == '&') {
      out += "&amp;";
    } else {
      out += c;
    }
  }
  return out;
}

}  // namespace

std::string svg_line_plot(const SvgPlotSpec& spec, std::span<const SvgSeries> series) {
  const int w = spec.width, h = spec.height;
  const double ml = 64, mr = 16, mt = 32, mb = 48;
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (spec.log_x && s.x[i] <= 0) continue;
      if (spec.log_y && s.y[i] <= 0) continue;
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      ymin = std::min(ymin, s.y[i]);
      ymax = std::max(ymax, s.y[i]);
    }
  }
  if (xmin > xmax) {
    xmin = 0;
    xmax = 1;
    ymin = 0;
    ymax = 1;
  }
  if (!spec.log_y) {
    const double pad = 0.05 * (ymax - ymin + 1e-12);
    ymin -= pad;
    ymax += pad;
    if (ymin > 0 && ymin < 0.3 * ymax) ymin = 0;
  }
  AxisMap xm{xmin, xmax, spec.log_x, ml, w - mr};
  AxisMap ym{ymin, ymax, spec.log_y, h - mb, mt};

  std::string svg = fmt::format(
      "<svg xmlns='http://www.w3.org/2000/svg' width='{}' height='{}' "
      "font-family='sans-serif' font-size='12'>\n",
      w, h);
  svg += fmt::format("<rect width='{}' height='{}' fill='white'/>\n", w, h);
  svg += fmt::format(
      "<text x='{}' y='18' text-anchor='middle' font-size='14'>{}</text>\n",
      (ml + w - mr) / 2, esc(spec.title));
  // frame
  svg += fmt::format(
      "<rect x='{}' y='{}' width='{}' height='{}' fill='none' stroke='black'/>\n",
      ml, mt, w - ml - mr, h - mt - mb);
  // ticks
  for (int k = 0; k <= 4; ++k) {
    const double fx = xmin + (xmax - xmin) * k / 4.0;
    const double vx = spec.log_x ? xmin * std::pow(xmax / xmin, k / 4.0) : fx;
    const double px = xm.map(vx);
    svg += fmt::format(
        "<line x1='{0:.1f}' y1='{1}' x2='{0:.1f}' y2='{2}' stroke='black'/>\n", px,
        h - mb, h - mb + 4);
    svg += fmt::format(
        "<text x='{:.1f}' y='{}' text-anchor='middle'>{:.3g}</text>\n", px,
        h - mb + 18, vx);
    const double fy = ymin + (ymax - ymin) * k / 4.0;
    const double vy = spec.log_y ? ymin * std::pow(ymax / ymin, k / 4.0) : fy;
    const double py = ym.map(vy);
    svg += fmt::format(
        "<line x1='{0}' y1='{1:.1f}' x2='{2}' y2='{1:.1f}' stroke='black'/>\n",
        ml - 4, py, ml);
    svg += fmt::format("<text x='{}' y='{:.1f}' text-anchor='end'>{:.3g}</text>\n",
                       ml - 8, py + 4, vy);
  }
  svg += fmt::format(
      "<text x='{}' y='{}' text-anchor='middle'>{}</text>\n", (ml + w - mr) / 2,
      h - 10, esc(spec.x_label));
  svg += fmt::format(
      "<text x='14' y='{}' text-anchor='middle' transform='rotate(-90 14 {})'>"
      "{}</text>\n",
      (mt + h - mb) / 2, (mt + h - mb) / 2, esc(spec.y_label));

  int ci = 0;
  double ly = mt + 14;
  for (const auto& s : series) {
    const std::string color =
        s.color.empty() ? kPalette[ci % (sizeof(kPalette) / sizeof(*kPalette))]
                        : s.color;
    ++ci;
    std::string pts;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (spec.log_x && s.x[i] <= 0) continue;
      if (spec.log_y && s.y[i] <= 0) continue;
      pts += fmt::format("{:.2f},{:.2f} ", xm.map(s.x[i]), ym.map(s.y[i]));
      if (!s.err.empty() && s.err[i] > 0) {
        const double y0 = s.y[i] - s.err[i];
        const double y1 = s.y[i] + s.err[i];
        if (!spec.log_y || y0 > 0) {
          svg += fmt::format(
              "<line x1='{0:.2f}' y1='{1:.2f}' x2='{0:.2f}' y2='{2:.2f}' "
              "stroke='{3}' stroke-width='1'/>\n",
              xm.map(s.x[i]), ym.map(std::max(y0, spec.log_y ? 1e-300 : y0)),
              ym.map(y1), color);
        }
      }
    }
    svg += fmt::format(
        "<polyline points='{}' fill='none' stroke='{}' stroke-width='1.5'/>\n", pts,
        color);
    if (!s.label.empty()) {
      svg += fmt::format(
          "<line x1='{}' y1='{}' x2='{}' y2='{}' stroke='{}' stroke-width='2'/>\n",
          w - mr - 120, ly - 4, w - mr - 100, ly - 4, color);
      svg += fmt::format("<text x='{}' y='{}'>{}</text>\n", w - mr - 94, ly,
                         esc(s.label));
      ly += 16;
    }
  }
  svg += "</svg>\n";
  return svg;
}

std::string svg_heatmap(const SvgPlotSpec& spec, int rows, int cols,
                        std::span<const double> values, double vmax) {
  const int w = spec.width, h = spec.height;
  const double ml = 64, mr = 16, mt = 32, mb = 48;
  const double cw = (w - ml - mr) / static_cast<double>(cols);
  const double ch = (h - mt - mb) / static_cast<double>(rows);
  std::string svg = fmt::format(
      "<svg xmlns='http://www.w3.org/2000/svg' width='{}' height='{}' "
      "font-family='sans-serif' font-size='12'>\n",
      w, h);
  svg += fmt::format("<rect width='{}' height='{}' fill='white'/>\n", w, h);
  svg += fmt::format(
      "<text x='{}' y='18' text-anchor='middle' font-size='14'>{}</text>\n",
      (ml + w - mr) / 2, esc(spec.title));
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const double v = values[static_cast<std::size_t>(r) * cols + c];
      const double u = vmax > 0 ? std::clamp(v / vmax, 0.0, 1.0) : 0.0;
      // white -> blue -> dark
      const int red = static_cast<int>(255 * (1.0 - u));
      const int green = static_cast<int>(255 * (1.0 - 0.7 * u));
      const int blue = static_cast<int>(255 * (1.0 - 0.25 * u));
      svg += fmt::format(
          "<rect x='{:.2f}' y='{:.2f}' width='{:.2f}' height='{:.2f}' "
          "fill='rgb({},{},{})'/>\n",
          ml + c * cw, mt + r * ch, cw + 0.5, ch + 0.5, red, green, blue);
    }
  }
  svg += fmt::format(
      "<rect x='{}' y='{}' width='{}' height='{}' fill='none' stroke='black'/>\n",
      ml, mt, w - ml - mr, h - mt - mb);
  svg += fmt::format("<text x='{}' y='{}' text-anchor='middle'>{}</text>\n",
                     (ml + w - mr) / 2, h - 10, esc(spec.x_label));
  svg += fmt::format(
      "<text x='14' y='{}' text-anchor='middle' transform='rotate(-90 14 {})'>"
      "{}</text>\n",
      (mt + h - mb) / 2, (mt + h - mb) / 2, esc(spec.y_label));
  svg += "</svg>\n";
  return svg;
}

}  // namespace aqsim::io
