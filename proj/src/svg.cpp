#include "qrc/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "qrc/errors.hpp"

namespace qrc {

namespace {

constexpr double kWidth = 720, kHeight = 480;
constexpr double kLeft = 70, kRight = 20, kTop = 40, kBottom = 55;

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    void add(double v) {
        if (!std::isfinite(v)) return;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    void pad() {
        if (!(hi > lo)) {
            lo -= 0.5;
            hi += 0.5;
        } else {
            const double m = 0.04 * (hi - lo);
            lo -= m;
            hi += m;
        }
    }
};

}  // namespace

void write_svg_chart(const std::string& path, const std::string& title,
                     const std::string& x_label, const std::string& y_label,
                     const std::vector<SvgSeries>& series, bool log_y) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw input_error("cannot open for writing: " + path);

    Range rx, ry;
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            rx.add(s.x[i]);
            const double y = log_y ? (s.y[i] > 0 ? std::log10(s.y[i]) : NAN) : s.y[i];
            ry.add(y);
        }
    if (!std::isfinite(rx.lo) || !std::isfinite(ry.lo))
        throw input_error("svg chart has no finite data: " + path);
    rx.pad();
    ry.pad();

    const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
    auto sx = [&](double v) { return kLeft + (v - rx.lo) / (rx.hi - rx.lo) * pw; };
    auto sy = [&](double v) {
        const double t = log_y ? std::log10(v) : v;
        return kTop + ph - (t - ry.lo) / (ry.hi - ry.lo) * ph;
    };

    out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << kWidth << "' height='"
        << kHeight << "' font-family='sans-serif' font-size='12'>\n";
    out << "<rect width='100%' height='100%' fill='white'/>\n";
    out << "<text x='" << kWidth / 2 << "' y='20' text-anchor='middle' font-size='14'>"
        << title << "</text>\n";

    // frame + ticks
    out << "<rect x='" << num(kLeft) << "' y='" << num(kTop) << "' width='" << num(pw)
        << "' height='" << num(ph) << "' fill='none' stroke='#444'/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double fx = rx.lo + (rx.hi - rx.lo) * i / 4.0;
        const double px = sx(fx);
        out << "<line x1='" << num(px) << "' y1='" << num(kTop + ph) << "' x2='" << num(px)
            << "' y2='" << num(kTop + ph + 4) << "' stroke='#444'/>\n";
        out << "<text x='" << num(px) << "' y='" << num(kTop + ph + 18)
            << "' text-anchor='middle'>" << tick_label(fx) << "</text>\n";
        const double fyv = ry.lo + (ry.hi - ry.lo) * i / 4.0;
        const double py = kTop + ph - ph * i / 4.0;
        out << "<line x1='" << num(kLeft - 4) << "' y1='" << num(py) << "' x2='" << num(kLeft)
            << "' y2='" << num(py) << "' stroke='#444'/>\n";
        out << "<text x='" << num(kLeft - 8) << "' y='" << num(py + 4)
            << "' text-anchor='end'>" << tick_label(log_y ? std::pow(10.0, fyv) : fyv)
            << "</text>\n";
    }
    out << "<text x='" << kWidth / 2 << "' y='" << kHeight - 12
        << "' text-anchor='middle'>" << x_label << "</text>\n";
    out << "<text x='16' y='" << kHeight / 2 << "' text-anchor='middle' transform='rotate(-90 16 "
        << kHeight / 2 << ")'>" << y_label << (log_y ? " (log)" : "") << "</text>\n";

    double legend_y = kTop + 14;
    for (const auto& s : series) {
        if (s.points_only) {
            for (std::size_t i = 0; i < s.x.size(); ++i) {
                const double y = s.y[i];
                if (log_y && !(y > 0)) continue;
                out << "<circle cx='" << num(sx(s.x[i])) << "' cy='" << num(sy(y)) << "' r='"
                    << num(s.point_radius) << "' fill='" << s.color << "'/>\n";
            }
        } else {
            out << "<polyline fill='none' stroke='" << s.color << "' stroke-width='1.5' points='";
            for (std::size_t i = 0; i < s.x.size(); ++i) {
                const double y = s.y[i];
                if (log_y && !(y > 0)) continue;
                out << num(sx(s.x[i])) << "," << num(sy(y)) << " ";
            }
            out << "'/>\n";
        }
        if (!s.label.empty()) {
            out << "<rect x='" << num(kLeft + 10) << "' y='" << num(legend_y - 9)
                << "' width='18' height='4' fill='" << s.color << "'/>\n";
            out << "<text x='" << num(kLeft + 34) << "' y='" << num(legend_y) << "'>" << s.label
                << "</text>\n";
            legend_y += 16;
        }
    }
    out << "</svg>\n";
    if (!out) throw input_error("failed writing " + path);
}

void write_svg_heatmap(const std::string& path, const std::string& title,
                       const std::string& x_label, const std::string& y_label,
                       const Eigen::MatrixXd& values,
                       const std::vector<std::string>& row_labels,
                       const std::vector<std::string>& col_labels) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw input_error("cannot open for writing: " + path);

    Range r;
    for (Eigen::Index i = 0; i < values.rows(); ++i)
        for (Eigen::Index j = 0; j < values.cols(); ++j) r.add(values(i, j));
    if (!std::isfinite(r.lo)) throw input_error("heatmap has no finite cells: " + path);

    const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
    const double cw = pw / values.cols(), ch = ph / values.rows();

    out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << kWidth << "' height='"
        << kHeight << "' font-family='sans-serif' font-size='12'>\n";
    out << "<rect width='100%' height='100%' fill='white'/>\n";
    out << "<text x='" << kWidth / 2 << "' y='20' text-anchor='middle' font-size='14'>"
        << title << "</text>\n";

    for (Eigen::Index i = 0; i < values.rows(); ++i)
        for (Eigen::Index j = 0; j < values.cols(); ++j) {
            const double x = kLeft + j * cw, y = kTop + i * ch;
            const double v = values(i, j);
            std::string fill = "#bbbbbb";
            if (std::isfinite(v)) {
                // darker = lower RMSE (better)
                const double t = (r.hi > r.lo) ? (v - r.lo) / (r.hi - r.lo) : 0.0;
                const int c = static_cast<int>(40 + 200 * t);
                char buf[16];
                std::snprintf(buf, sizeof buf, "#%02x%02x%02x", c / 3, c / 2, c);
                fill = buf;
            }
            out << "<rect x='" << num(x) << "' y='" << num(y) << "' width='" << num(cw)
                << "' height='" << num(ch) << "' fill='" << fill << "' stroke='white'/>\n";
            out << "<text x='" << num(x + cw / 2) << "' y='" << num(y + ch / 2 + 4)
                << "' text-anchor='middle' fill='white'>"
                << (std::isfinite(v) ? tick_label(v) : "skip") << "</text>\n";
        }

    for (Eigen::Index i = 0; i < values.rows(); ++i)
        out << "<text x='" << num(kLeft - 8) << "' y='" << num(kTop + i * ch + ch / 2 + 4)
            << "' text-anchor='end'>"
            << (i < static_cast<Eigen::Index>(row_labels.size()) ? row_labels[i] : "") << "</text>\n";
    for (Eigen::Index j = 0; j < values.cols(); ++j)
        out << "<text x='" << num(kLeft + j * cw + cw / 2) << "' y='" << num(kTop + ph + 18)
            << "' text-anchor='middle'>"
            << (j < static_cast<Eigen::Index>(col_labels.size()) ? col_labels[j] : "") << "</text>\n";

    out << "<text x='" << kWidth / 2 << "' y='" << kHeight - 12 << "' text-anchor='middle'>"
        << x_label << "</text>\n";
    out << "<text x='16' y='" << kHeight / 2 << "' text-anchor='middle' transform='rotate(-90 16 "
        << kHeight / 2 << ")'>" << y_label << "</text>\n";
    out << "</svg>\n";
    if (!out) throw input_error("failed writing " + path);
}

}  // namespace qrc
