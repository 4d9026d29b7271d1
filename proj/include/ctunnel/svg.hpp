#pragma once

#include <string>
#include <vector>

namespace ctunnel::svg {

enum class Style { Markers, Line, Circles };

struct Series {
  std::string label;
  std::string color = "#1f77b4";
  Style style = Style::Markers;
  std::vector<double> x, y;
  std::vector<double> r;  ///< radii in data units, Circles only
};

struct Plot {
  std::string title;
  std::string xlabel;
  std::string ylabel;
  std::vector<Series> series;
  bool equal_aspect = false;
  std::vector<std::string> notes;  ///< extra lines printed under the title
};

/// Standalone SVG document; deterministic for identical input.
std::string render(const Plot& plot, int width = 720, int height = 480);

}  // namespace ctunnel::svg
