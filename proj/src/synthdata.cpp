#include "pairgan/synthdata.hpp"

#include "pairgan/text.hpp"

#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>

namespace pairgan {

namespace {

void require_positive(double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw ContractError(std::string(what) + " must be finite and > 0, got " + format_double(v));
    }
}

}  // namespace

std::string to_string(TargetKind k) {
    switch (k) {
        case TargetKind::VerticalMixture: return "vertical_mixture";
        case TargetKind::Ring: return "ring";
        case TargetKind::Grid25: return "grid25";
    }
    return "?";
}

TargetKind parse_target_kind(const std::string& s) {
    if (s == "vertical_mixture") return TargetKind::VerticalMixture;
    if (s == "ring") return TargetKind::Ring;
    if (s == "grid25") return TargetKind::Grid25;
    throw ContractError("unknown target kind '" + s + "' (expected vertical_mixture, ring, grid25)");
}

std::string to_string(PriorKind k) {
    return k == PriorKind::StandardNormal ? "standard_normal" : "offset_gaussian";
}

PriorKind parse_prior_kind(const std::string& s) {
    if (s == "standard_normal") return PriorKind::StandardNormal;
    if (s == "offset_gaussian") return PriorKind::OffsetGaussian;
    throw ContractError("unknown prior kind '" + s + "' (expected standard_normal, offset_gaussian)");
}

TargetSpec TargetSpec::vertical_mixture(std::size_t k, double x_offset, double y_spacing,
                                        double sigma) {
    TargetSpec s;
    s.kind = TargetKind::VerticalMixture;
    s.components = k;
    s.x_offset = x_offset;
    s.y_spacing = y_spacing;
    s.sigma = sigma;
    return s;
}

TargetSpec TargetSpec::ring(double radius, double radial_sigma) {
    TargetSpec s;
    s.kind = TargetKind::Ring;
    s.radius = radius;
    s.radial_sigma = radial_sigma;
    return s;
}

TargetSpec TargetSpec::grid25(double spacing, double sigma) {
    TargetSpec s;
    s.kind = TargetKind::Grid25;
    s.spacing = spacing;
    s.sigma = sigma;
    return s;
}

void TargetSpec::validate() const {
    switch (kind) {
        case TargetKind::VerticalMixture:
            if (components < 2) throw ContractError("vertical_mixture: components must be >= 2");
            require_positive(y_spacing, "vertical_mixture y_spacing");
            require_positive(sigma, "vertical_mixture sigma");
            if (!std::isfinite(x_offset)) throw ContractError("vertical_mixture: x_offset");
            break;
        case TargetKind::Ring:
            require_positive(radius, "ring radius");
            require_positive(radial_sigma, "ring radial_sigma");
            break;
        case TargetKind::Grid25:
            require_positive(spacing, "grid25 spacing");
            require_positive(sigma, "grid25 sigma");
            break;
    }
}

PriorSpec PriorSpec::standard_normal(std::size_t dim) {
    PriorSpec s;
    s.kind = PriorKind::StandardNormal;
    s.dim = dim;
    return s;
}

PriorSpec PriorSpec::offset_gaussian(double mean_x, double mean_y, double sigma) {
    PriorSpec s;
    s.kind = PriorKind::OffsetGaussian;
    s.dim = 2;
    s.mean_x = mean_x;
    s.mean_y = mean_y;
    s.sigma = sigma;
    return s;
}

void PriorSpec::validate() const {
    if (kind == PriorKind::StandardNormal) {
        if (dim < 1) throw ContractError("standard_normal prior: dim must be >= 1");
    } else {
        require_positive(sigma, "offset_gaussian sigma");
        if (!std::isfinite(mean_x) || !std::isfinite(mean_y)) {
            throw ContractError("offset_gaussian prior: mean must be finite");
        }
    }
}

Matrix target_means(const TargetSpec& spec) {
    switch (spec.kind) {
        case TargetKind::VerticalMixture: {
            Matrix m(spec.components, 2);
            const double centre = 0.5 * static_cast<double>(spec.components - 1);
            for (std::size_t i = 0; i < spec.components; ++i) {
                m(i, 0) = spec.x_offset;
                m(i, 1) = (static_cast<double>(i) - centre) * spec.y_spacing;
            }
            return m;
        }
        case TargetKind::Grid25: {
            Matrix m(25, 2);
            for (std::size_t i = 0; i < 25; ++i) {
                m(i, 0) = (static_cast<double>(i % 5) - 2.0) * spec.spacing;
                m(i, 1) = (static_cast<double>(i / 5) - 2.0) * spec.spacing;
            }
            return m;
        }
        case TargetKind::Ring:
            return Matrix(0, 2);
    }
    return {};
}

Matrix sample_target(const TargetSpec& spec, std::size_t n, Rng& rng) {
    spec.validate();
    if (n < 1) throw ContractError("sample_target: n must be >= 1");
    Matrix out(n, 2);
    if (spec.kind == TargetKind::Ring) {
        for (std::size_t i = 0; i < n; ++i) {
            const double angle = 2.0 * std::numbers::pi * rng.uniform();
            const double r = rng.normal(spec.radius, spec.radial_sigma);
            out(i, 0) = r * std::cos(angle);
            out(i, 1) = r * std::sin(angle);
        }
        return out;
    }
    const Matrix means = target_means(spec);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t c = rng.below(means.rows());
        out(i, 0) = rng.normal(means(c, 0), spec.sigma);
        out(i, 1) = rng.normal(means(c, 1), spec.sigma);
    }
    return out;
}

Matrix sample_prior(const PriorSpec& spec, std::size_t n, Rng& rng) {
    spec.validate();
    if (n < 1) throw ContractError("sample_prior: n must be >= 1");
    if (spec.kind == PriorKind::StandardNormal) {
        Matrix out(n, spec.dim);
        for (auto& v : out.values()) v = rng.normal();
        return out;
    }
    Matrix out(n, 2);
    for (std::size_t i = 0; i < n; ++i) {
        out(i, 0) = rng.normal(spec.mean_x, spec.sigma);
        out(i, 1) = rng.normal(spec.mean_y, spec.sigma);
    }
    return out;
}

void write_points_csv(std::ostream& out, const Matrix& points) {
    if (points.cols() != 2) {
        throw ContractError("write_points_csv: expected 2 columns, got " + shape_string(points));
    }
    out << "x,y\n";
    for (std::size_t r = 0; r < points.rows(); ++r) {
        out << format_double(points(r, 0)) << ',' << format_double(points(r, 1)) << '\n';
    }
}

Matrix read_points_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || trim(line) != "x,y") {
        throw ContractError("points csv: expected header 'x,y'");
    }
    std::vector<double> values;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto fields = split(trim(line), ',');
        if (fields.size() != 2) {
            throw ContractError("points csv line " + std::to_string(line_no) +
                                ": expected 2 fields");
        }
        for (const auto& f : fields) values.push_back(parse_double(f));
    }
    const std::size_t n = values.size() / 2;
    return Matrix(n, 2, std::move(values));
}

}  // namespace pairgan
