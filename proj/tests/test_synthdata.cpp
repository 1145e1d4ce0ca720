#include "doctest.h"

#include "pairgan/synthdata.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

using namespace pairgan;

namespace {

bool within_3_sigma(double observed, double expected, double sd) {
    return std::abs(observed - expected) <= 3 * sd;
}

}  // namespace

TEST_CASE("vertical mixture: balanced components around the configured means") {
    Rng rng(123);
    const TargetSpec spec = TargetSpec::vertical_mixture();
    const std::size_t n = 100000;
    const Matrix pts = sample_target(spec, n, rng);
    const Matrix means = target_means(spec);
    REQUIRE(means.rows() == 2);
    CHECK(means(0, 0) == 4.0);
    CHECK(means(0, 1) == -2.0);
    CHECK(means(1, 1) == 2.0);

    std::size_t count[2] = {};
    double sx[2] = {}, sy[2] = {};
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t c = pts(i, 1) > 0 ? 1 : 0;  // modes 4 apart, sigma 0.25
        ++count[c];
        sx[c] += pts(i, 0);
        sy[c] += pts(i, 1);
    }
    const double p_sd = std::sqrt(0.25 / static_cast<double>(n));
    CHECK(within_3_sigma(static_cast<double>(count[0]) / static_cast<double>(n), 0.5, p_sd));
    for (int c = 0; c < 2; ++c) {
        const double m_sd = 0.25 / std::sqrt(static_cast<double>(count[c]));
        CHECK(within_3_sigma(sx[c] / static_cast<double>(count[c]), means(c, 0), m_sd));
        CHECK(within_3_sigma(sy[c] / static_cast<double>(count[c]), means(c, 1), m_sd));
    }
}

TEST_CASE("ring with vanishing thickness lies on the circle") {
    Rng rng(4);
    TargetSpec spec = TargetSpec::ring();
    spec.radial_sigma = 1e-300;
    spec.radius = 1.5;
    const Matrix pts = sample_target(spec, 1000, rng);
    for (std::size_t i = 0; i < pts.rows(); ++i) {
        CHECK(std::abs(std::hypot(pts(i, 0), pts(i, 1)) - 1.5) <= 1e-12);
    }
}

TEST_CASE("ring angles are uniform") {
    Rng rng(8);
    const std::size_t n = 80000, bins = 8;
    const Matrix pts = sample_target(TargetSpec::ring(), n, rng);
    std::vector<double> counts(bins);
    for (std::size_t i = 0; i < n; ++i) {
        const double a = std::atan2(pts(i, 1), pts(i, 0)) + M_PI;
        counts[std::min(bins - 1, static_cast<std::size_t>(a / (2 * M_PI) * bins))] += 1;
    }
    const double e = static_cast<double>(n) / bins;
    double chi2 = 0;
    for (double c : counts) chi2 += (c - e) * (c - e) / e;
    CHECK(chi2 < 24.32);  // chi-square, 7 dof, alpha = 0.001
}

TEST_CASE("grid25 with sigma -> 0 hits grid points exactly") {
    Rng rng(2);
    TargetSpec spec = TargetSpec::grid25();
    spec.sigma = 1e-300;
    const Matrix pts = sample_target(spec, 2000, rng);
    for (std::size_t i = 0; i < pts.rows(); ++i) {
        for (int d = 0; d < 2; ++d) {
            const double v = pts(i, static_cast<std::size_t>(d));
            CHECK(std::abs(v - std::round(v / 2.0) * 2.0) <= 1e-12);
            CHECK(std::abs(v) <= 4.0);
        }
    }
}

TEST_CASE("grid25 component assignment passes a chi-square uniformity test") {
    Rng rng(99);
    TargetSpec spec = TargetSpec::grid25();
    spec.sigma = 1e-300;
    const std::size_t n = 100000;
    const Matrix pts = sample_target(spec, n, rng);
    std::vector<double> counts(25);
    for (std::size_t i = 0; i < n; ++i) {
        const int cx = static_cast<int>(std::lround(pts(i, 0) / 2.0)) + 2;
        const int cy = static_cast<int>(std::lround(pts(i, 1) / 2.0)) + 2;
        counts[static_cast<std::size_t>(cy * 5 + cx)] += 1;
    }
    const double e = static_cast<double>(n) / 25;
    double chi2 = 0;
    for (double c : counts) chi2 += (c - e) * (c - e) / e;
    CHECK(chi2 < 51.18);  // 24 dof, alpha = 0.001

    // not round-robin: first 25 draws are not a permutation of the grid
    Rng again(99);
    const Matrix head = sample_target(spec, 25, again);
    std::vector<int> seen(25);
    for (std::size_t i = 0; i < 25; ++i) {
        const int cx = static_cast<int>(std::lround(head(i, 0) / 2.0)) + 2;
        const int cy = static_cast<int>(std::lround(head(i, 1) / 2.0)) + 2;
        ++seen[static_cast<std::size_t>(cy * 5 + cx)];
    }
    CHECK(std::count(seen.begin(), seen.end(), 1) < 25);
}

TEST_CASE("standard normal prior moments") {
    Rng rng(17);
    const std::size_t n = 100000;
    const Matrix z = sample_prior(PriorSpec::standard_normal(2), n, rng);
    for (std::size_t d = 0; d < 2; ++d) {
        double s = 0, s2 = 0;
        for (std::size_t i = 0; i < n; ++i) {
            s += z(i, d);
            s2 += z(i, d) * z(i, d);
        }
        const double mean = s / static_cast<double>(n);
        const double var = s2 / static_cast<double>(n) - mean * mean;
        CHECK(within_3_sigma(mean, 0.0, 1.0 / std::sqrt(static_cast<double>(n))));
        CHECK(within_3_sigma(var, 1.0, std::sqrt(2.0 / static_cast<double>(n))));
    }
}

TEST_CASE("offset Gaussian prior mean") {
    Rng rng(21);
    const std::size_t n = 100000;
    const Matrix z = sample_prior(PriorSpec::offset_gaussian(), n, rng);
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += z(i, 0);
        my += z(i, 1);
    }
    const double sd = 0.5 / std::sqrt(static_cast<double>(n));
    CHECK(within_3_sigma(mx / static_cast<double>(n), -4.0, sd));
    CHECK(within_3_sigma(my / static_cast<double>(n), 0.0, sd));
}

TEST_CASE("samplers are deterministic and finite") {
    for (const TargetSpec& spec :
         {TargetSpec::ring(), TargetSpec::grid25(), TargetSpec::vertical_mixture()}) {
        Rng a(5), b(5), c(6);
        const Matrix x = sample_target(spec, 500, a);
        CHECK(x == sample_target(spec, 500, b));
        CHECK_FALSE(x == sample_target(spec, 500, c));
        CHECK(x.all_finite());
    }
    Rng a(5), b(5);
    CHECK(sample_prior(PriorSpec::standard_normal(3), 100, a) ==
          sample_prior(PriorSpec::standard_normal(3), 100, b));
}

TEST_CASE("invalid specs are rejected") {
    Rng rng(0);
    TargetSpec t = TargetSpec::ring();
    t.radius = -1;
    CHECK_THROWS_AS(sample_target(t, 10, rng), ContractError);
    CHECK_THROWS_AS(sample_target(TargetSpec::ring(), 0, rng), ContractError);
    PriorSpec p = PriorSpec::standard_normal(0);
    CHECK_THROWS_AS(sample_prior(p, 10, rng), ContractError);
}

TEST_CASE("point CSV round-trip") {
    Rng rng(1);
    const Matrix pts = sample_target(TargetSpec::ring(), 50, rng);
    std::stringstream buf;
    write_points_csv(buf, pts);
    CHECK(buf.str().rfind("x,y\n", 0) == 0);
    CHECK(read_points_csv(buf) == pts);
    std::stringstream empty("x,y\n");
    CHECK(read_points_csv(empty).rows() == 0);
}
