#include "covshift/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace covshift::svg {

namespace {

constexpr double kLeft = 70.0;
constexpr double kRight = 20.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 55.0;

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char ch : s) {
        switch (ch) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            case '"': out += "&quot;"; break;
            default: out += ch;
        }
    }
    return out;
}

struct Axis {
    bool log = false;
    double lo = 0.0;  // transformed coordinates
    double hi = 1.0;

    double transform(double v) const { return log ? std::log10(v) : v; }
    bool valid(double v) const { return std::isfinite(v) && (!log || v > 0.0); }

    std::vector<double> ticks() const {
        std::vector<double> out;
        if (log) {
            const int a = static_cast<int>(std::floor(lo));
            const int b = static_cast<int>(std::ceil(hi));
            const bool sparse = (b - a) <= 1;
            for (int e = a; e <= b; ++e) {
                for (double m : sparse ? std::vector<double>{1, 2, 5} : std::vector<double>{1}) {
                    const double v = m * std::pow(10.0, e);
                    const double t = std::log10(v);
                    if (t >= lo - 1e-9 && t <= hi + 1e-9) out.push_back(v);
                }
            }
            return out;
        }
        const double span = hi - lo;
        const double raw = span / 6.0;
        const double mag = std::pow(10.0, std::floor(std::log10(raw)));
        double step = mag;
        for (double m : {1.0, 2.0, 5.0, 10.0}) {
            if (m * mag >= raw) {
                step = m * mag;
                break;
            }
        }
        for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * span; v += step) {
            out.push_back(std::abs(v) < 1e-12 * span ? 0.0 : v);
        }
        return out;
    }
};

Axis fit_axis(const Plot& plot, bool is_x) {
    Axis a;
    a.log = is_x ? plot.log_x : plot.log_y;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const auto& s : plot.series) {
        const auto& vals = is_x ? s.x : s.y;
        const auto& other = is_x ? s.y : s.x;
        for (std::size_t i = 0; i < vals.size() && i < other.size(); ++i) {
            if (!a.valid(vals[i])) continue;
            const double t = a.transform(vals[i]);
            lo = std::min(lo, t);
            hi = std::max(hi, t);
        }
    }
    if (!std::isfinite(lo)) {
        lo = 0.0;
        hi = 1.0;
    }
    if (hi - lo < 1e-12) {
        lo -= 0.5;
        hi += 0.5;
    }
    const double pad = 0.04 * (hi - lo);
    a.lo = lo - pad;
    a.hi = hi + pad;
    return a;
}

}  // namespace

std::string render(const Plot& plot) {
    const Axis ax = fit_axis(plot, true);
    const Axis ay = fit_axis(plot, false);
    const double w = plot.width;
    const double h = plot.height;
    const double pw = w - kLeft - kRight;
    const double ph = h - kTop - kBottom;
    auto px = [&](double v) { return kLeft + (ax.transform(v) - ax.lo) / (ax.hi - ax.lo) * pw; };
    auto py = [&](double v) { return kTop + ph - (ay.transform(v) - ay.lo) / (ay.hi - ay.lo) * ph; };

    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << plot.width << "\" height=\"" << plot.height
      << "\" viewBox=\"0 0 " << plot.width << ' ' << plot.height << "\" font-family=\"sans-serif\">\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    o << "<text x=\"" << fmt(w / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">"
      << xml_escape(plot.title) << "</text>\n";

    for (double t : ax.ticks()) {
        const double x = px(t);
        o << "<line x1=\"" << fmt(x) << "\" y1=\"" << fmt(kTop) << "\" x2=\"" << fmt(x) << "\" y2=\""
          << fmt(kTop + ph) << "\" stroke=\"#e5e5e5\"/>\n";
        o << "<text x=\"" << fmt(x) << "\" y=\"" << fmt(kTop + ph + 18) << "\" text-anchor=\"middle\" font-size=\"11\">"
          << tick_label(t) << "</text>\n";
    }
    for (double t : ay.ticks()) {
        const double y = py(t);
        o << "<line x1=\"" << fmt(kLeft) << "\" y1=\"" << fmt(y) << "\" x2=\"" << fmt(kLeft + pw) << "\" y2=\""
          << fmt(y) << "\" stroke=\"#e5e5e5\"/>\n";
        o << "<text x=\"" << fmt(kLeft - 6) << "\" y=\"" << fmt(y + 4) << "\" text-anchor=\"end\" font-size=\"11\">"
          << tick_label(t) << "</text>\n";
    }
    o << "<rect x=\"" << fmt(kLeft) << "\" y=\"" << fmt(kTop) << "\" width=\"" << fmt(pw) << "\" height=\"" << fmt(ph)
      << "\" fill=\"none\" stroke=\"black\"/>\n";
    o << "<text x=\"" << fmt(kLeft + pw / 2) << "\" y=\"" << fmt(h - 14) << "\" text-anchor=\"middle\" font-size=\"13\">"
      << xml_escape(plot.x_label) << "</text>\n";
    o << "<text transform=\"translate(18," << fmt(kTop + ph / 2) << ") rotate(-90)\" text-anchor=\"middle\" "
      << "font-size=\"13\">" << xml_escape(plot.y_label) << "</text>\n";

    for (const auto& s : plot.series) {
        std::ostringstream pts;
        std::vector<std::pair<double, double>> kept;
        for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
            if (!ax.valid(s.x[i]) || !ay.valid(s.y[i])) continue;
            kept.emplace_back(px(s.x[i]), py(s.y[i]));
        }
        for (const auto& [x, y] : kept) pts << fmt(x) << ',' << fmt(y) << ' ';
        o << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"2\""
          << (s.dashed ? " stroke-dasharray=\"6,4\"" : "") << " points=\"" << pts.str() << "\"/>\n";
        if (s.markers) {
            for (const auto& [x, y] : kept) {
                o << "<circle cx=\"" << fmt(x) << "\" cy=\"" << fmt(y) << "\" r=\"3\" fill=\"" << s.color << "\"/>\n";
            }
        }
    }

    double ly = kTop + 14;
    for (const auto& s : plot.series) {
        const double lx = kLeft + pw - 190;
        o << "<line x1=\"" << fmt(lx) << "\" y1=\"" << fmt(ly - 4) << "\" x2=\"" << fmt(lx + 24) << "\" y2=\""
          << fmt(ly - 4) << "\" stroke=\"" << s.color << "\" stroke-width=\"2\""
          << (s.dashed ? " stroke-dasharray=\"6,4\"" : "") << "/>\n";
        o << "<text x=\"" << fmt(lx + 30) << "\" y=\"" << fmt(ly) << "\" font-size=\"11\">" << xml_escape(s.label)
          << "</text>\n";
        ly += 16;
    }
    o << "</svg>\n";
    return o.str();
}

}  // namespace covshift::svg
