#pragma once

#include "pairgan/matrix.hpp"
#include "pairgan/rng.hpp"

#include <cstddef>
#include <iosfwd>
#include <string>

namespace pairgan {

enum class TargetKind { VerticalMixture, Ring, Grid25 };

std::string to_string(TargetKind k);
TargetKind parse_target_kind(const std::string& s);

/// A 2D target distribution. Fields irrelevant to `kind` are ignored.
struct TargetSpec {
    TargetKind kind = TargetKind::Ring;
    // vertical_mixture: k components at (x_offset, y_i), y_i evenly spaced
    // by y_spacing and centred on 0.
    std::size_t components = 2;
    double x_offset = 4.0;
    double y_spacing = 4.0;
    // ring
    double radius = 1.0;
    double radial_sigma = 0.05;
    // grid25: 5x5 grid centred at the origin
    double spacing = 2.0;
    // isotropic component stddev (vertical_mixture, grid25)
    double sigma = 0.05;

    static TargetSpec vertical_mixture(std::size_t k = 2, double x_offset = 4.0,
                                       double y_spacing = 4.0, double sigma = 0.25);
    static TargetSpec ring(double radius = 1.0, double radial_sigma = 0.05);
    static TargetSpec grid25(double spacing = 2.0, double sigma = 0.05);

    void validate() const;
    friend bool operator==(const TargetSpec&, const TargetSpec&) = default;
};

enum class PriorKind { StandardNormal, OffsetGaussian };

std::string to_string(PriorKind k);
PriorKind parse_prior_kind(const std::string& s);

struct PriorSpec {
    PriorKind kind = PriorKind::StandardNormal;
    std::size_t dim = 2;
    double mean_x = 0.0;  ///< offset_gaussian only (2D)
    double mean_y = 0.0;
    double sigma = 1.0;

    static PriorSpec standard_normal(std::size_t dim = 2);
    static PriorSpec offset_gaussian(double mean_x = -4.0, double mean_y = 0.0,
                                     double sigma = 0.5);

    std::size_t dimension() const noexcept {
        return kind == PriorKind::OffsetGaussian ? 2 : dim;
    }
    void validate() const;
    friend bool operator==(const PriorSpec&, const PriorSpec&) = default;
};

/// Component means of a mixture target (empty for the ring).
Matrix target_means(const TargetSpec& spec);

Matrix sample_target(const TargetSpec& spec, std::size_t n, Rng& rng);
Matrix sample_prior(const PriorSpec& spec, std::size_t n, Rng& rng);

/// Point sets as CSV: header "x,y", one point per row.
void write_points_csv(std::ostream& out, const Matrix& points);
Matrix read_points_csv(std::istream& in);

}  // namespace pairgan
