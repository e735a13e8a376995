#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

#include "chirprange/io.hpp"

namespace chirprange {

struct Series {
    std::string label;
    std::vector<std::pair<double, double>> points;
    bool step = false;  // draw as right-continuous staircase (ECDF style)
};

namespace detail {

inline std::string fmt6(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

// Perceptually ordered dark-blue -> green -> yellow ramp (5 fixed stops).
inline std::string ramp_color(double t) {
    static constexpr double stops[5][3] = {{68, 1, 84},
                                           {59, 82, 139},
                                           {33, 145, 140},
                                           {94, 201, 98},
                                           {253, 231, 37}};
    t = std::clamp(t, 0.0, 1.0);
    const double pos = t * 4.0;
    const int i = std::min(3, static_cast<int>(pos));
    const double f = pos - i;
    char buf[8];
    std::snprintf(buf, sizeof(buf), "#%02x%02x%02x",
                  static_cast<int>(std::lround(stops[i][0] + f * (stops[i + 1][0] - stops[i][0]))),
                  static_cast<int>(std::lround(stops[i][1] + f * (stops[i + 1][1] - stops[i][1]))),
                  static_cast<int>(std::lround(stops[i][2] + f * (stops[i + 1][2] - stops[i][2]))));
    return buf;
}

inline const char* series_color(std::size_t i) {
    static constexpr const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                              "#9467bd", "#8c564b", "#17becf", "#7f7f7f"};
    return palette[i % (sizeof(palette) / sizeof(palette[0]))];
}

inline std::string svg_text(double x, double y, const std::string& text,
                            const std::string& anchor = "middle", int size = 12) {
    return "<text x=\"" + fmt6(x) + "\" y=\"" + fmt6(y) + "\" font-family=\"sans-serif\" " +
           "font-size=\"" + std::to_string(size) + "\" text-anchor=\"" + anchor + "\">" + text +
           "</text>\n";
}

}  // namespace detail

// Multi-series XY chart; series marked step render as right-continuous
// staircases (for ECDFs). A data comment embeds every plotted point so the
// figure doubles as a machine-readable record.
inline void svg_line_chart(const std::string& path, const std::vector<Series>& series,
                           const std::string& title, const std::string& x_label,
                           const std::string& y_label) {
    if (series.empty()) throw std::invalid_argument("svg_line_chart: no series");
    double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
    for (const auto& s : series)
        for (const auto& [x, y] : s.points) {
            if (!std::isfinite(x) || !std::isfinite(y)) continue;
            xmin = std::min(xmin, x), xmax = std::max(xmax, x);
            ymin = std::min(ymin, y), ymax = std::max(ymax, y);
        }
    if (!std::isfinite(xmin) || !std::isfinite(ymin))
        throw std::invalid_argument("svg_line_chart: no finite points");
    if (xmax == xmin) xmax = xmin + (xmin == 0.0 ? 1.0 : std::abs(xmin) * 0.5), xmin -= (xmax - xmin);
    if (ymax == ymin) ymax = ymin + (ymin == 0.0 ? 1.0 : std::abs(ymin) * 0.5), ymin -= (ymax - ymin);

    const double W = 720, H = 480, L = 70, R = 180, T = 40, B = 50;
    const auto px = [&](double x) { return L + (x - xmin) / (xmax - xmin) * (W - L - R); };
    const auto py = [&](double y) { return H - B - (y - ymin) / (ymax - ymin) * (H - T - B); };

    std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + detail::fmt6(W) +
                    "\" height=\"" + detail::fmt6(H) + "\">\n";
    s += "<!-- data\n";
    for (const auto& ser : series) {
        s += "series: " + ser.label + "\n";
        for (const auto& [x, y] : ser.points)
            s += detail::fmt6(x) + "," + detail::fmt6(y) + "\n";
    }
    s += "-->\n";
    s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    s += detail::svg_text(W / 2, 22, title, "middle", 15);

    for (int i = 0; i <= 5; ++i) {
        const double fx = xmin + (xmax - xmin) * i / 5.0;
        const double fy = ymin + (ymax - ymin) * i / 5.0;
        s += "<line x1=\"" + detail::fmt6(px(fx)) + "\" y1=\"" + detail::fmt6(H - B) + "\" x2=\"" +
             detail::fmt6(px(fx)) + "\" y2=\"" + detail::fmt6(double(T)) +
             "\" stroke=\"#dddddd\"/>\n";
        s += "<line x1=\"" + detail::fmt6(double(L)) + "\" y1=\"" + detail::fmt6(py(fy)) +
             "\" x2=\"" + detail::fmt6(W - R) + "\" y2=\"" + detail::fmt6(py(fy)) +
             "\" stroke=\"#dddddd\"/>\n";
        s += detail::svg_text(px(fx), H - B + 18, detail::fmt6(fx));
        s += detail::svg_text(L - 8, py(fy) + 4, detail::fmt6(fy), "end");
    }
    s += "<rect x=\"" + detail::fmt6(double(L)) + "\" y=\"" + detail::fmt6(double(T)) +
         "\" width=\"" + detail::fmt6(W - L - R) + "\" height=\"" + detail::fmt6(H - T - B) +
         "\" fill=\"none\" stroke=\"black\"/>\n";
    s += detail::svg_text(L + (W - L - R) / 2, H - 12, x_label);
    s += "<g transform=\"translate(16," + detail::fmt6(T + (H - T - B) / 2) +
         ") rotate(-90)\">" + detail::svg_text(0, 0, y_label) + "</g>\n";

    for (std::size_t i = 0; i < series.size(); ++i) {
        const auto& ser = series[i];
        std::string d;
        bool first = true;
        double prev_y = 0.0;
        for (const auto& [x, y] : ser.points) {
            if (!std::isfinite(x) || !std::isfinite(y)) continue;
            if (first) {
                d += "M" + detail::fmt6(px(x)) + " " + detail::fmt6(py(y));
                first = false;
            } else {
                if (ser.step) d += " L" + detail::fmt6(px(x)) + " " + detail::fmt6(py(prev_y));
                d += " L" + detail::fmt6(px(x)) + " " + detail::fmt6(py(y));
            }
            prev_y = y;
        }
        if (d.empty()) continue;
        s += "<path d=\"" + d + "\" fill=\"none\" stroke=\"" +
             detail::series_color(i) + "\" stroke-width=\"1.5\"/>\n";
        const double ly = T + 16 + 18 * static_cast<double>(i);
        s += "<line x1=\"" + detail::fmt6(W - R + 12) + "\" y1=\"" + detail::fmt6(ly - 4) +
             "\" x2=\"" + detail::fmt6(W - R + 34) + "\" y2=\"" + detail::fmt6(ly - 4) +
             "\" stroke=\"" + detail::series_color(i) + "\" stroke-width=\"2\"/>\n";
        s += detail::svg_text(W - R + 40, ly, ser.label, "start", 11);
    }
    s += "</svg>\n";
    auto out = detail::open_out(path);
    out << s;
    if (!out.good()) throw std::runtime_error("write failed: " + path);
}

// ny x nx cell grid; cell (ix, iy) is centered at (x0 + ix*dx, y0 + iy*dy).
// values are row-major by iy. NaN cells render gray.
inline void svg_heatmap(const std::string& path, const std::vector<double>& values,
                        std::size_t nx, std::size_t ny, double x0, double y0, double dx,
                        double dy, const std::string& title, const std::string& value_label) {
    if (nx == 0 || ny == 0 || values.size() != nx * ny)
        throw std::invalid_argument("svg_heatmap: bad matrix shape");
    double vmin = INFINITY, vmax = -INFINITY;
    for (double v : values)
        if (std::isfinite(v)) vmin = std::min(vmin, v), vmax = std::max(vmax, v);
    if (!std::isfinite(vmin)) vmin = 0.0, vmax = 1.0;
    if (vmax == vmin) vmax = vmin + 1.0;

    const double W = 720, H = 560, L = 70, R = 130, T = 40, B = 50;
    const double cw = (W - L - R) / static_cast<double>(nx);
    const double ch = (H - T - B) / static_cast<double>(ny);

    std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + detail::fmt6(W) +
                    "\" height=\"" + detail::fmt6(H) + "\">\n";
    s += "<!-- data\nx,y," + value_label + "\n";
    for (std::size_t iy = 0; iy < ny; ++iy)
        for (std::size_t ix = 0; ix < nx; ++ix)
            s += detail::fmt6(x0 + dx * static_cast<double>(ix)) + "," +
                 detail::fmt6(y0 + dy * static_cast<double>(iy)) + "," +
                 detail::fmt6(values[iy * nx + ix]) + "\n";
    s += "-->\n";
    s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    s += detail::svg_text(W / 2, 22, title, "middle", 15);

    for (std::size_t iy = 0; iy < ny; ++iy) {
        for (std::size_t ix = 0; ix < nx; ++ix) {
            const double v = values[iy * nx + ix];
            const std::string color =
                std::isfinite(v) ? detail::ramp_color((v - vmin) / (vmax - vmin)) : "#bbbbbb";
            // y axis points up: row 0 sits at the bottom of the plot area.
            const double cx = L + cw * static_cast<double>(ix);
            const double cy = H - B - ch * static_cast<double>(iy + 1);
            s += "<rect x=\"" + detail::fmt6(cx) + "\" y=\"" + detail::fmt6(cy) + "\" width=\"" +
                 detail::fmt6(cw) + "\" height=\"" + detail::fmt6(ch) + "\" fill=\"" + color +
                 "\"/>\n";
        }
    }
    s += "<rect x=\"" + detail::fmt6(double(L)) + "\" y=\"" + detail::fmt6(double(T)) +
         "\" width=\"" + detail::fmt6(W - L - R) + "\" height=\"" + detail::fmt6(H - T - B) +
         "\" fill=\"none\" stroke=\"black\"/>\n";
    s += detail::svg_text(L, H - B + 18, detail::fmt6(x0));
    s += detail::svg_text(W - R, H - B + 18, detail::fmt6(x0 + dx * static_cast<double>(nx - 1)));
    s += detail::svg_text(L - 8, H - B + 4, detail::fmt6(y0), "end");
    s += detail::svg_text(L - 8, T + 10, detail::fmt6(y0 + dy * static_cast<double>(ny - 1)),
                          "end");
    s += detail::svg_text(L + (W - L - R) / 2, H - 12, "x (m)");
    s += "<g transform=\"translate(16," + detail::fmt6(T + (H - T - B) / 2) +
         ") rotate(-90)\">" + detail::svg_text(0, 0, "y (m)") + "</g>\n";

    // Color bar.
    const double bx = W - R + 30, bw = 18, bh = H - T - B;
    for (int i = 0; i < 64; ++i) {
        const double f = (i + 0.5) / 64.0;
        s += "<rect x=\"" + detail::fmt6(bx) + "\" y=\"" +
             detail::fmt6(T + bh * (1.0 - (i + 1) / 64.0)) + "\" width=\"" + detail::fmt6(bw) +
             "\" height=\"" + detail::fmt6(bh / 64.0 + 0.5) + "\" fill=\"" +
             detail::ramp_color(f) + "\"/>\n";
    }
    s += detail::svg_text(bx + bw + 6, H - B + 4, detail::fmt6(vmin), "start", 11);
    s += detail::svg_text(bx + bw + 6, T + 10, detail::fmt6(vmax), "start", 11);
    s += detail::svg_text(bx + bw / 2, T - 8, value_label, "middle", 11);
    s += "</svg>\n";
    auto out = detail::open_out(path);
    out << s;
    if (!out.good()) throw std::runtime_error("write failed: " + path);
}

}  // namespace chirprange
