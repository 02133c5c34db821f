#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

namespace rlscape {

// Standalone SVG plot renderers with a fixed palette and layout, so a given
// input always produces identical bytes (golden-file stable). Every function
// validates its numeric inputs and throws std::invalid_argument on NaN or
// infinity. Coordinates are formatted with fixed precision; data annotations
// use shortest-round-trip formatting.
struct PlotOptions {
    int width = 640;
    int height = 480;
    std::string title;
    std::string x_label;
    std::string y_label;
};

// Row-major cell values; row 0 is drawn at the bottom (y increases upward).
// axis ranges give tick labels for the two axes.
std::string svg_heatmap(std::span<const double> values, std::size_t n_rows, std::size_t n_cols,
                        std::pair<double, double> x_range, std::pair<double, double> y_range,
                        const PlotOptions& opt);

// Equal-width bins between the sample min and max; a constant sample yields
// a single full-height bar.
std::string svg_histogram(std::span<const double> samples, int n_bins, const PlotOptions& opt);

// Empty input is valid and renders the axes frame only.
std::string svg_scatter(std::span<const double> xs, std::span<const double> ys,
                        const PlotOptions& opt);

// Mean line with a shaded lo..hi band (all spans of equal length).
std::string svg_line_band(std::span<const double> x, std::span<const double> y,
                          std::span<const double> lo, std::span<const double> hi,
                          const PlotOptions& opt);

// Cumulative-reward race curves; the first group draws in the success color,
// the second in the failure color.
struct RaceCurves {
    std::vector<std::vector<std::pair<double, double>>> success;
    std::vector<std::vector<std::pair<double, double>>> failure;
};
std::string svg_race(const RaceCurves& curves, const PlotOptions& opt);

// Before/after displacement plot: an empty circle at each starting point, a
// segment to the end point, and a filled dot there.
std::string svg_arrow_scatter(std::span<const double> x0, std::span<const double> y0,
                              std::span<const double> x1, std::span<const double> y1,
                              const PlotOptions& opt);

void save_svg(const std::string& path, const std::string& svg_text);

}  // namespace rlscape
