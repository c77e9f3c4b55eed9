#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace aqsim::io {

// numbers print with enough digits to round-trip exactly, so artifact files
// are byte-stable across runs
std::string format_double(double v);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

std::string csv_to_string(const CsvTable& table);
CsvTable csv_from_string(const std::string& text);

// write-to-temp then rename, so partially written files never appear
void atomic_write(const std::filesystem::path& path, const std::string& content);
std::string read_file(const std::filesystem::path& path);

void write_csv(const std::filesystem::path& path, const CsvTable& table);
CsvTable read_csv(const std::filesystem::path& path);

// --- minimal static SVG plots -------------------------------------------

struct SvgSeries {
  std::string label;
  std::vector<double> x, y;
  std::vector<double> err;  // optional symmetric error bars
  std::string color;
};

struct SvgPlotSpec {
  std::string title, x_label, y_label;
  bool log_x = false, log_y = false;
  int width = 640, height = 440;
};

std::string svg_line_plot(const SvgPlotSpec& spec, std::span<const SvgSeries> series);

// row-major matrix heatmap (rows plotted top to bottom)
std::string svg_heatmap(const SvgPlotSpec& spec, int rows, int cols,
                        std::span<const double> values, double vmax);

}  // namespace aqsim::io
