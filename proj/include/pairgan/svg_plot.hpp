#pragma once

#include "pairgan/matrix.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace pairgan {

/// Canvas geometry shared by both plots: a kCanvas x kCanvas SVG whose plot
/// box spans [kMargin, kCanvas - kMargin] on both axes.
inline constexpr double kCanvas = 480.0;
inline constexpr double kMargin = 40.0;

/// Scatter of real and generated 2D points in the square viewport
/// [-extent, extent]^2. Data maps to pixels by
///   px = kMargin + (x + extent) / (2 extent) * (kCanvas - 2 kMargin)
///   py = kCanvas - kMargin - (y + extent) / (2 extent) * (kCanvas - 2 kMargin)
/// so the origin sits at the canvas centre. Without an explicit extent, it is
/// the largest absolute coordinate times 1.1, rounded up to a multiple of
/// 0.5 (1 when all points are at the origin). Each point is one <circle>;
/// legend swatches are <rect>s. Throws when `fake` is empty.
std::string scatter_svg(const Matrix& real, const Matrix& fake, const std::string& title,
                        std::optional<double> extent = std::nullopt);

enum class TrajectoryMode { PrecisionRecall, PrecisionCoverage };

std::string to_string(TrajectoryMode mode);
TrajectoryMode parse_trajectory_mode(const std::string& s);

struct TrajectorySeries {
    std::string label;
    /// (x, precision) pairs in training order; x is recall or coverage.
    std::vector<std::pair<double, double>> points;
};

/// One polyline per series (omitted for single-point series) with a
/// <circle> marker at every point, on axes clamped to [0, 1]^2.
std::string trajectory_svg(const std::vector<TrajectorySeries>& series, TrajectoryMode mode,
                           const std::string& title);

}  // namespace pairgan
