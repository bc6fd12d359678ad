#pragma once

// Minimal SVG rendering for line series and phase-space maps.

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace vibronic::plot {

struct Series
{
  std::string         name;
  std::vector<double> y;
  bool                dashed = false;
};

struct LinePlot
{
  std::string         title, xlabel, ylabel;
  std::vector<double> x;
  std::vector<Series> series;
};

struct Heatmap
{
  std::string                            title, xlabel, ylabel;
  std::vector<double>                    x, y;
  Eigen::MatrixXd                        values; // values(i, j) at (x[i], y[j])
  std::vector<std::pair<double, double>> path;    // drawn as a polyline
  std::vector<std::pair<double, double>> markers;
};

std::string render(LinePlot const &p);
std::string render(Heatmap const &h);

// Best effort: returns false (and writes nothing) on any failure.
bool save(std::filesystem::path const &path, LinePlot const &p) noexcept;
bool save(std::filesystem::path const &path, Heatmap const &h) noexcept;

} // namespace vibronic::plot
