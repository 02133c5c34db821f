#include "rlscape/io/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "rlscape/io/format.hpp"

namespace rlscape {

namespace {

constexpr const char* kAxisColor = "#444444";
constexpr const char* kTextColor = "#222222";
constexpr const char* kSuccessColor = "#2266aa";
constexpr const char* kFailureColor = "#cc4433";
constexpr const char* kBandFill = "#2266aa";
constexpr const char* kFontFamily = "monospace";

constexpr double kMarginLeft = 64.0;
constexpr double kMarginRight = 24.0;
constexpr double kMarginTop = 40.0;
constexpr double kMarginBottom = 48.0;

// Dark-blue to yellow color ramp for heatmaps (low to high).
constexpr int kRamp[][3] = {
    {53, 42, 135},  {36, 84, 168},  {26, 124, 168}, {36, 160, 144},
    {90, 188, 102}, {170, 204, 62}, {249, 251, 14},
};
constexpr int kRampSize = static_cast<int>(sizeof(kRamp) / sizeof(kRamp[0]));

std::string fmt_px(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string fmt_tick(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

std::string escape_xml(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (const char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c; break;
        }
    }
    return out;
}

void require_finite(std::span<const double> xs, const char* what) {
    for (const double x : xs) {
        if (!std::isfinite(x))
            throw std::invalid_argument(std::string("svg: non-finite value in ") + what);
    }
}

std::string rgb(int r, int g, int b) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", r, g, b);
    return buf;
}

// t in [0,1] -> ramp color, piecewise-linear between stops.
std::string ramp_color(double t) {
    t = std::clamp(t, 0.0, 1.0);
    const double pos = t * (kRampSize - 1);
    const int lo = std::min(static_cast<int>(pos), kRampSize - 2);
    const double f = pos - lo;
    const auto mixc = [&](int c) {
        return static_cast<int>(std::lround(kRamp[lo][c] + f * (kRamp[lo + 1][c] - kRamp[lo][c])));
    };
    return rgb(mixc(0), mixc(1), mixc(2));
}

// Maps a data rectangle onto the plot area in pixel space (y inverted).
struct Frame {
    double x_lo = 0.0, x_hi = 1.0, y_lo = 0.0, y_hi = 1.0;
    double px_left = 0.0, px_right = 1.0, px_top = 0.0, px_bottom = 1.0;

    static Frame fit(double x_lo, double x_hi, double y_lo, double y_hi,
                     const PlotOptions& opt) {
        Frame f;
        if (x_lo == x_hi) { x_lo -= 0.5; x_hi += 0.5; }
        if (y_lo == y_hi) { y_lo -= 0.5; y_hi += 0.5; }
        f.x_lo = x_lo;
        f.x_hi = x_hi;
        f.y_lo = y_lo;
        f.y_hi = y_hi;
        f.px_left = kMarginLeft;
        f.px_right = opt.width - kMarginRight;
        f.px_top = kMarginTop;
        f.px_bottom = opt.height - kMarginBottom;
        return f;
    }

    double px(double x) const {
        return px_left + (x - x_lo) / (x_hi - x_lo) * (px_right - px_left);
    }
    double py(double y) const {
        return px_bottom - (y - y_lo) / (y_hi - y_lo) * (px_bottom - px_top);
    }
};

void open_svg(std::ostringstream& out, const PlotOptions& opt) {
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << opt.width << "\" height=\""
        << opt.height << "\" viewBox=\"0 0 " << opt.width << " " << opt.height << "\">\n";
    out << "<rect x=\"0\" y=\"0\" width=\"" << opt.width << "\" height=\"" << opt.height
        << "\" fill=\"#ffffff\"/>\n";
    if (!opt.title.empty()) {
        out << "<text x=\"" << fmt_px(opt.width / 2.0)
            << "\" y=\"24\" text-anchor=\"middle\" font-family=\"" << kFontFamily
            << "\" font-size=\"15\" fill=\"" << kTextColor << "\">" << escape_xml(opt.title)
            << "</text>\n";
    }
}

void close_svg(std::ostringstream& out) { out << "</svg>\n"; }

void draw_axes(std::ostringstream& out, const Frame& f, const PlotOptions& opt) {
    out << "<rect x=\"" << fmt_px(f.px_left) << "\" y=\"" << fmt_px(f.px_top) << "\" width=\""
        << fmt_px(f.px_right - f.px_left) << "\" height=\"" << fmt_px(f.px_bottom - f.px_top)
        << "\" fill=\"none\" stroke=\"" << kAxisColor << "\" stroke-width=\"1\"/>\n";
    constexpr int kTicks = 5;
    for (int i = 0; i < kTicks; ++i) {
        const double tx = f.x_lo + i * (f.x_hi - f.x_lo) / (kTicks - 1);
        const double ty = f.y_lo + i * (f.y_hi - f.y_lo) / (kTicks - 1);
        const double px = f.px(tx);
        const double py = f.py(ty);
        out << "<line x1=\"" << fmt_px(px) << "\" y1=\"" << fmt_px(f.px_bottom) << "\" x2=\""
            << fmt_px(px) << "\" y2=\"" << fmt_px(f.px_bottom + 4) << "\" stroke=\"" << kAxisColor
            << "\" stroke-width=\"1\"/>\n";
        out << "<text x=\"" << fmt_px(px) << "\" y=\"" << fmt_px(f.px_bottom + 17)
            << "\" text-anchor=\"middle\" font-family=\"" << kFontFamily
            << "\" font-size=\"11\" fill=\"" << kTextColor << "\">" << fmt_tick(tx) << "</text>\n";
        out << "<line x1=\"" << fmt_px(f.px_left - 4) << "\" y1=\"" << fmt_px(py) << "\" x2=\""
            << fmt_px(f.px_left) << "\" y2=\"" << fmt_px(py) << "\" stroke=\"" << kAxisColor
            << "\" stroke-width=\"1\"/>\n";
        out << "<text x=\"" << fmt_px(f.px_left - 7) << "\" y=\"" << fmt_px(py + 4)
            << "\" text-anchor=\"end\" font-family=\"" << kFontFamily
            << "\" font-size=\"11\" fill=\"" << kTextColor << "\">" << fmt_tick(ty) << "</text>\n";
    }
    if (!opt.x_label.empty()) {
        out << "<text x=\"" << fmt_px((f.px_left + f.px_right) / 2) << "\" y=\""
            << fmt_px(f.px_bottom + 36) << "\" text-anchor=\"middle\" font-family=\""
            << kFontFamily << "\" font-size=\"12\" fill=\"" << kTextColor << "\">"
            << escape_xml(opt.x_label) << "</text>\n";
    }
    if (!opt.y_label.empty()) {
        const double cx = f.px_left - 44;
        const double cy = (f.px_top + f.px_bottom) / 2;
        out << "<text x=\"" << fmt_px(cx) << "\" y=\"" << fmt_px(cy)
            << "\" text-anchor=\"middle\" font-family=\"" << kFontFamily
            << "\" font-size=\"12\" fill=\"" << kTextColor << "\" transform=\"rotate(-90 "
            << fmt_px(cx) << " " << fmt_px(cy) << ")\">" << escape_xml(opt.y_label)
            << "</text>\n";
    }
}

void polyline(std::ostringstream& out, const Frame& f,
              std::span<const std::pair<double, double>> pts, const char* color) {
    if (pts.empty()) return;
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (i) out << ' ';
        out << fmt_px(f.px(pts[i].first)) << ',' << fmt_px(f.py(pts[i].second));
    }
    out << "\"/>\n";
}

}  // namespace

std::string svg_heatmap(std::span<const double> values, std::size_t n_rows, std::size_t n_cols,
                        std::pair<double, double> x_range, std::pair<double, double> y_range,
                        const PlotOptions& opt) {
    if (n_rows == 0 || n_cols == 0 || values.size() != n_rows * n_cols)
        throw std::invalid_argument("svg_heatmap: values size must equal n_rows * n_cols");
    require_finite(values, "heatmap values");
    const double ranges[] = {x_range.first, x_range.second, y_range.first, y_range.second};
    require_finite(ranges, "heatmap ranges");

    const double v_lo = *std::min_element(values.begin(), values.end());
    const double v_hi = *std::max_element(values.begin(), values.end());

    std::ostringstream out;
    open_svg(out, opt);
    const Frame f = Frame::fit(x_range.first, x_range.second, y_range.first, y_range.second, opt);
    const double cell_w = (f.px_right - f.px_left) / static_cast<double>(n_cols);
    const double cell_h = (f.px_bottom - f.px_top) / static_cast<double>(n_rows);
    for (std::size_t r = 0; r < n_rows; ++r) {
        for (std::size_t c = 0; c < n_cols; ++c) {
            const double v = values[r * n_cols + c];
            const double t = v_hi == v_lo ? 0.5 : (v - v_lo) / (v_hi - v_lo);
            const double x = f.px_left + static_cast<double>(c) * cell_w;
            const double y = f.px_bottom - static_cast<double>(r + 1) * cell_h;
            out << "<rect x=\"" << fmt_px(x) << "\" y=\"" << fmt_px(y) << "\" width=\""
                << fmt_px(cell_w) << "\" height=\"" << fmt_px(cell_h) << "\" fill=\""
                << ramp_color(t) << "\"/>\n";
        }
    }
    draw_axes(out, f, opt);
    out << "<text x=\"" << fmt_px(f.px_right) << "\" y=\"" << fmt_px(kMarginTop - 6)
        << "\" text-anchor=\"end\" font-family=\"" << kFontFamily << "\" font-size=\"11\" fill=\""
        << kTextColor << "\">min " << format_double(v_lo) << "  max " << format_double(v_hi)
        << "</text>\n";
    close_svg(out);
    return out.str();
}

std::string svg_histogram(std::span<const double> samples, int n_bins, const PlotOptions& opt) {
    if (samples.empty()) throw std::invalid_argument("svg_histogram: no samples");
    if (n_bins < 1) throw std::invalid_argument("svg_histogram: n_bins must be >= 1");
    require_finite(samples, "histogram samples");

    const double lo = *std::min_element(samples.begin(), samples.end());
    const double hi = *std::max_element(samples.begin(), samples.end());
    std::vector<std::size_t> counts(static_cast<std::size_t>(n_bins), 0);
    if (lo == hi) {
        counts[0] = samples.size();  // single full-height bar
    } else {
        const double width = (hi - lo) / n_bins;
        for (const double x : samples) {
            auto bin = static_cast<std::size_t>((x - lo) / width);
            if (bin >= counts.size()) bin = counts.size() - 1;  // x == hi lands in the top bin
            ++counts[bin];
        }
    }
    const double peak = static_cast<double>(*std::max_element(counts.begin(), counts.end()));

    std::ostringstream out;
    open_svg(out, opt);
    const Frame f = lo == hi ? Frame::fit(lo - 0.5, hi + 0.5, 0.0, peak, opt)
                             : Frame::fit(lo, hi, 0.0, peak, opt);
    const std::size_t n_drawn = lo == hi ? 1 : counts.size();
    const double bar_w = (f.px_right - f.px_left) / static_cast<double>(n_drawn);
    for (std::size_t b = 0; b < n_drawn; ++b) {
        if (counts[b] == 0) continue;
        const double x = f.px_left + static_cast<double>(b) * bar_w;
        const double top = f.py(static_cast<double>(counts[b]));
        out << "<rect x=\"" << fmt_px(x) << "\" y=\"" << fmt_px(top) << "\" width=\""
            << fmt_px(bar_w) << "\" height=\"" << fmt_px(f.px_bottom - top) << "\" fill=\""
            << kSuccessColor << "\" stroke=\"#ffffff\" stroke-width=\"0.5\"/>\n";
    }
    draw_axes(out, f, opt);
    close_svg(out);
    return out.str();
}

std::string svg_scatter(std::span<const double> xs, std::span<const double> ys,
                        const PlotOptions& opt) {
    if (xs.size() != ys.size()) throw std::invalid_argument("svg_scatter: length mismatch");
    require_finite(xs, "scatter x");
    require_finite(ys, "scatter y");

    double x_lo = 0.0, x_hi = 1.0, y_lo = 0.0, y_hi = 1.0;
    if (!xs.empty()) {
        x_lo = *std::min_element(xs.begin(), xs.end());
        x_hi = *std::max_element(xs.begin(), xs.end());
        y_lo = *std::min_element(ys.begin(), ys.end());
        y_hi = *std::max_element(ys.begin(), ys.end());
    }
    std::ostringstream out;
    open_svg(out, opt);
    const Frame f = Frame::fit(x_lo, x_hi, y_lo, y_hi, opt);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        out << "<circle cx=\"" << fmt_px(f.px(xs[i])) << "\" cy=\"" << fmt_px(f.py(ys[i]))
            << "\" r=\"2.5\" fill=\"" << kSuccessColor << "\" fill-opacity=\"0.7\"/>\n";
    }
    draw_axes(out, f, opt);
    close_svg(out);
    return out.str();
}

std::string svg_line_band(std::span<const double> x, std::span<const double> y,
                          std::span<const double> lo, std::span<const double> hi,
                          const PlotOptions& opt) {
    if (x.empty()) throw std::invalid_argument("svg_line_band: empty input");
    if (x.size() != y.size() || x.size() != lo.size() || x.size() != hi.size())
        throw std::invalid_argument("svg_line_band: length mismatch");
    require_finite(x, "band x");
    require_finite(y, "band y");
    require_finite(lo, "band lo");
    require_finite(hi, "band hi");

    const double x_lo = *std::min_element(x.begin(), x.end());
    const double x_hi = *std::max_element(x.begin(), x.end());
    double y_lo = *std::min_element(lo.begin(), lo.end());
    double y_hi = *std::max_element(hi.begin(), hi.end());
    y_lo = std::min(y_lo, *std::min_element(y.begin(), y.end()));
    y_hi = std::max(y_hi, *std::max_element(y.begin(), y.end()));

    std::ostringstream out;
    open_svg(out, opt);
    const Frame f = Frame::fit(x_lo, x_hi, y_lo, y_hi, opt);
    out << "<polygon fill=\"" << kBandFill << "\" fill-opacity=\"0.18\" stroke=\"none\" points=\"";
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (i) out << ' ';
        out << fmt_px(f.px(x[i])) << ',' << fmt_px(f.py(hi[i]));
    }
    for (std::size_t i = x.size(); i-- > 0;) {
        out << ' ' << fmt_px(f.px(x[i])) << ',' << fmt_px(f.py(lo[i]));
    }
    out << "\"/>\n";
    std::vector<std::pair<double, double>> line(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) line[i] = {x[i], y[i]};
    polyline(out, f, line, kSuccessColor);
    draw_axes(out, f, opt);
    close_svg(out);
    return out.str();
}

std::string svg_race(const RaceCurves& curves, const PlotOptions& opt) {
    double x_lo = 0.0, x_hi = 1.0, y_lo = 0.0, y_hi = 1.0;
    bool any = false;
    const auto scan = [&](const std::vector<std::vector<std::pair<double, double>>>& group,
                          const char* what) {
        for (const auto& curve : group) {
            for (const auto& [px, py] : curve) {
                if (!std::isfinite(px) || !std::isfinite(py))
                    throw std::invalid_argument(std::string("svg_race: non-finite value in ") +
                                                what);
                if (!any) {
                    x_lo = x_hi = px;
                    y_lo = y_hi = py;
                    any = true;
                } else {
                    x_lo = std::min(x_lo, px);
                    x_hi = std::max(x_hi, px);
                    y_lo = std::min(y_lo, py);
                    y_hi = std::max(y_hi, py);
                }
            }
        }
    };
    scan(curves.success, "success curves");
    scan(curves.failure, "failure curves");

    std::ostringstream out;
    open_svg(out, opt);
    const Frame f = Frame::fit(x_lo, x_hi, y_lo, y_hi, opt);
    for (const auto& curve : curves.success) polyline(out, f, curve, kSuccessColor);
    for (const auto& curve : curves.failure) polyline(out, f, curve, kFailureColor);
    draw_axes(out, f, opt);
    out << "<text x=\"" << fmt_px(f.px_right - 4) << "\" y=\"" << fmt_px(f.px_top + 16)
        << "\" text-anchor=\"end\" font-family=\"" << kFontFamily << "\" font-size=\"11\" fill=\""
        << kSuccessColor << "\">successful</text>\n";
    out << "<text x=\"" << fmt_px(f.px_right - 4) << "\" y=\"" << fmt_px(f.px_top + 30)
        << "\" text-anchor=\"end\" font-family=\"" << kFontFamily << "\" font-size=\"11\" fill=\""
        << kFailureColor << "\">failing</text>\n";
    close_svg(out);
    return out.str();
}

std::string svg_arrow_scatter(std::span<const double> x0, std::span<const double> y0,
                              std::span<const double> x1, std::span<const double> y1,
                              const PlotOptions& opt) {
    if (x0.size() != y0.size() || x0.size() != x1.size() || x0.size() != y1.size())
        throw std::invalid_argument("svg_arrow_scatter: length mismatch");
    require_finite(x0, "arrow x0");
    require_finite(y0, "arrow y0");
    require_finite(x1, "arrow x1");
    require_finite(y1, "arrow y1");

    double x_lo = 0.0, x_hi = 1.0, y_lo = 0.0, y_hi = 1.0;
    if (!x0.empty()) {
        x_lo = std::min(*std::min_element(x0.begin(), x0.end()),
                        *std::min_element(x1.begin(), x1.end()));
        x_hi = std::max(*std::max_element(x0.begin(), x0.end()),
                        *std::max_element(x1.begin(), x1.end()));
        y_lo = std::min(*std::min_element(y0.begin(), y0.end()),
                        *std::min_element(y1.begin(), y1.end()));
        y_hi = std::max(*std::max_element(y0.begin(), y0.end()),
                        *std::max_element(y1.begin(), y1.end()));
    }
    std::ostringstream out;
    open_svg(out, opt);
    const Frame f = Frame::fit(x_lo, x_hi, y_lo, y_hi, opt);
    for (std::size_t i = 0; i < x0.size(); ++i) {
        out << "<line x1=\"" << fmt_px(f.px(x0[i])) << "\" y1=\"" << fmt_px(f.py(y0[i]))
            << "\" x2=\"" << fmt_px(f.px(x1[i])) << "\" y2=\"" << fmt_px(f.py(y1[i]))
            << "\" stroke=\"" << kAxisColor << "\" stroke-width=\"1\"/>\n";
        out << "<circle cx=\"" << fmt_px(f.px(x0[i])) << "\" cy=\"" << fmt_px(f.py(y0[i]))
            << "\" r=\"3.5\" fill=\"none\" stroke=\"" << kSuccessColor
            << "\" stroke-width=\"1.2\"/>\n";
        out << "<circle cx=\"" << fmt_px(f.px(x1[i])) << "\" cy=\"" << fmt_px(f.py(y1[i]))
            << "\" r=\"2.5\" fill=\"" << kFailureColor << "\"/>\n";
    }
    draw_axes(out, f, opt);
    close_svg(out);
    return out.str();
}

void save_svg(const std::string& path, const std::string& svg_text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write svg file: " + path);
    out << svg_text;
    if (!out) throw std::runtime_error("failed writing svg file: " + path);
}

}  // namespace rlscape
