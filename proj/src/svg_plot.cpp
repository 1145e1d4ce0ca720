#include "pairgan/svg_plot.hpp"

#include "pairgan/text.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

namespace pairgan {

namespace {

constexpr double kInner = kCanvas - 2.0 * kMargin;
constexpr std::array<const char*, 8> kPalette = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                                 "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};

std::string px(double v) { return format_fixed(v, 2); }

std::string escape_xml(const std::string& s) {
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

void open_svg(std::ostringstream& out, const std::string& title) {
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << px(kCanvas) << "\" height=\""
        << px(kCanvas) << "\" viewBox=\"0 0 " << px(kCanvas) << ' ' << px(kCanvas) << "\">\n";
    out << "<rect x=\"0\" y=\"0\" width=\"" << px(kCanvas) << "\" height=\"" << px(kCanvas)
        << "\" fill=\"white\"/>\n";
    out << "<text x=\"" << px(kCanvas / 2) << "\" y=\"" << px(kMargin / 2 + 5)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">"
        << escape_xml(title) << "</text>\n";
    out << "<rect x=\"" << px(kMargin) << "\" y=\"" << px(kMargin) << "\" width=\"" << px(kInner)
        << "\" height=\"" << px(kInner) << "\" fill=\"none\" stroke=\"black\"/>\n";
}

void axis_labels(std::ostringstream& out, double lo, double hi, const std::string& x_name,
                 const std::string& y_name) {
    const double bottom = kCanvas - kMargin;
    out << "<g font-family=\"sans-serif\" font-size=\"10\">\n";
    out << "<text x=\"" << px(kMargin) << "\" y=\"" << px(bottom + 14)
        << "\" text-anchor=\"middle\">" << format_fixed(lo, 2) << "</text>\n";
    out << "<text x=\"" << px(kCanvas - kMargin) << "\" y=\"" << px(bottom + 14)
        << "\" text-anchor=\"middle\">" << format_fixed(hi, 2) << "</text>\n";
    out << "<text x=\"" << px(kMargin - 4) << "\" y=\"" << px(bottom)
        << "\" text-anchor=\"end\">" << format_fixed(lo, 2) << "</text>\n";
    out << "<text x=\"" << px(kMargin - 4) << "\" y=\"" << px(kMargin + 4)
        << "\" text-anchor=\"end\">" << format_fixed(hi, 2) << "</text>\n";
    if (!x_name.empty()) {
        out << "<text x=\"" << px(kCanvas / 2) << "\" y=\"" << px(bottom + 28)
            << "\" text-anchor=\"middle\">" << escape_xml(x_name) << "</text>\n";
    }
    if (!y_name.empty()) {
        out << "<text x=\"" << px(12) << "\" y=\"" << px(kCanvas / 2)
            << "\" text-anchor=\"middle\" transform=\"rotate(-90 " << px(12) << ' '
            << px(kCanvas / 2) << ")\">" << escape_xml(y_name) << "</text>\n";
    }
    out << "</g>\n";
}

void legend(std::ostringstream& out, const std::vector<std::pair<std::string, std::string>>& items) {
    double y = kMargin + 8;
    for (const auto& [label, colour] : items) {
        out << "<rect x=\"" << px(kMargin + 8) << "\" y=\"" << px(y) << "\" width=\"8\" height=\"8\" fill=\""
            << colour << "\"/>\n";
        out << "<text x=\"" << px(kMargin + 20) << "\" y=\"" << px(y + 8)
            << "\" font-family=\"sans-serif\" font-size=\"10\">" << escape_xml(label)
            << "</text>\n";
        y += 14;
    }
}

double auto_extent(const Matrix& real, const Matrix& fake) {
    double m = 0.0;
    for (const Matrix* pts : {&real, &fake}) {
        for (double v : pts->values()) {
            if (std::isfinite(v)) m = std::max(m, std::abs(v));
        }
    }
    if (m == 0.0) return 1.0;
    return std::ceil(m * 1.1 * 2.0) / 2.0;
}

}  // namespace

std::string scatter_svg(const Matrix& real, const Matrix& fake, const std::string& title,
                        std::optional<double> extent) {
    if (fake.rows() == 0) throw ContractError("scatter_svg: generated point set is empty");
    if (fake.cols() != 2 || (real.rows() > 0 && real.cols() != 2)) {
        throw ContractError("scatter_svg: expected 2D points");
    }
    const double e = extent.value_or(auto_extent(real, fake));
    if (!(e > 0.0)) throw ContractError("scatter_svg: extent must be > 0");
    auto map_x = [&](double x) { return kMargin + (x + e) / (2.0 * e) * kInner; };
    auto map_y = [&](double y) { return kCanvas - kMargin - (y + e) / (2.0 * e) * kInner; };

    std::ostringstream out;
    open_svg(out, title);
    axis_labels(out, -e, e, "", "");
    out << "<defs><clipPath id=\"box\"><rect x=\"" << px(kMargin) << "\" y=\"" << px(kMargin)
        << "\" width=\"" << px(kInner) << "\" height=\"" << px(kInner)
        << "\"/></clipPath></defs>\n";
    const std::pair<const Matrix*, const char*> sets[] = {{&real, "#ff7f0e"}, {&fake, "#1f77b4"}};
    for (const auto& [pts, colour] : sets) {
        out << "<g clip-path=\"url(#box)\" fill=\"" << colour << "\" fill-opacity=\"0.6\">\n";
        for (std::size_t i = 0; i < pts->rows(); ++i) {
            out << "<circle cx=\"" << px(map_x((*pts)(i, 0))) << "\" cy=\""
                << px(map_y((*pts)(i, 1))) << "\" r=\"1.6\"/>\n";
        }
        out << "</g>\n";
    }
    legend(out, {{"real", "#ff7f0e"}, {"generated", "#1f77b4"}});
    out << "</svg>\n";
    return out.str();
}

std::string to_string(TrajectoryMode mode) {
    return mode == TrajectoryMode::PrecisionRecall ? "precision_recall" : "precision_coverage";
}

TrajectoryMode parse_trajectory_mode(const std::string& s) {
    if (s == "precision_recall") return TrajectoryMode::PrecisionRecall;
    if (s == "precision_coverage") return TrajectoryMode::PrecisionCoverage;
    throw ContractError("unknown trajectory mode '" + s +
                        "' (expected precision_recall or precision_coverage)");
}

std::string trajectory_svg(const std::vector<TrajectorySeries>& series, TrajectoryMode mode,
                           const std::string& title) {
    if (series.empty()) throw ContractError("trajectory_svg: no trajectories");
    auto clamp01 = [](double v) { return std::isfinite(v) ? std::clamp(v, 0.0, 1.0) : 0.0; };
    auto map_x = [&](double x) { return kMargin + clamp01(x) * kInner; };
    auto map_y = [&](double y) { return kCanvas - kMargin - clamp01(y) * kInner; };

    std::ostringstream out;
    open_svg(out, title);
    axis_labels(out, 0.0, 1.0, mode == TrajectoryMode::PrecisionRecall ? "recall" : "coverage",
                "precision");
    std::vector<std::pair<std::string, std::string>> items;
    for (std::size_t s = 0; s < series.size(); ++s) {
        const std::string colour = kPalette[s % kPalette.size()];
        items.emplace_back(series[s].label, colour);
        const auto& pts = series[s].points;
        out << "<g class=\"series\" stroke=\"" << colour << "\" fill=\"" << colour << "\">\n";
        if (pts.size() >= 2) {
            out << "<polyline fill=\"none\" stroke-width=\"1.5\" points=\"";
            for (std::size_t i = 0; i < pts.size(); ++i) {
                out << (i ? " " : "") << px(map_x(pts[i].first)) << ','
                    << px(map_y(pts[i].second));
            }
            out << "\"/>\n";
        }
        for (const auto& [x, y] : pts) {
            out << "<circle cx=\"" << px(map_x(x)) << "\" cy=\"" << px(map_y(y))
                << "\" r=\"2.5\"/>\n";
        }
        out << "</g>\n";
    }
    legend(out, items);
    out << "</svg>\n";
    return out.str();
}

}  // namespace pairgan
