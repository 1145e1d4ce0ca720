#include "doctest.h"

#include "pairgan/metrics.hpp"

#include "oracles.hpp"

#include <algorithm>
#include <cmath>

using namespace pairgan;
using pairgan::oracle::brute_force_prdc;

namespace {

Matrix cloud(std::size_t n, double shift, double spread, Rng& rng) {
    Matrix m(n, 2);
    for (std::size_t i = 0; i < n; ++i) {
        m(i, 0) = shift + spread * rng.normal();
        m(i, 1) = spread * rng.normal();
    }
    return m;
}

}  // namespace

TEST_CASE("PRDC equals the brute-force oracle exactly") {
    Rng rng(31);
    const std::size_t ks[] = {1, 3, 5};
    for (int t = 0; t < 50; ++t) {
        const std::size_t n = 10 + rng.below(291);
        const std::size_t m = 10 + rng.below(291);
        const std::size_t k = ks[t % 3];
        const Matrix real = cloud(n, 0.0, 1.0, rng);
        const Matrix fake = cloud(m, rng.uniform() * 2.0, 0.3 + rng.uniform(), rng);
        const MetricReport got = prdc(real, fake, k);
        const MetricReport want = brute_force_prdc(real, fake, k);
        CHECK_MESSAGE(got == want, "instance " << t << " n=" << n << " m=" << m << " k=" << k);
    }
}

TEST_CASE("PRDC oracle agreement with duplicate points and ties") {
    // integer lattice points with repeats: many distances tie exactly
    Rng rng(3);
    Matrix real(60, 2), fake(40, 2);
    for (auto& v : real.values()) v = static_cast<double>(rng.below(5));
    for (auto& v : fake.values()) v = static_cast<double>(rng.below(6));
    for (std::size_t k : {1u, 3u, 5u}) CHECK(prdc(real, fake, k) == brute_force_prdc(real, fake, k));
}

TEST_CASE("fake == real gives P = R = C = 1") {
    Rng rng(12);
    const Matrix real = cloud(200, 0, 1, rng);
    const MetricReport r = prdc(real, real, 5);
    CHECK(r.precision == 1.0);
    CHECK(r.recall == 1.0);
    CHECK(r.coverage == 1.0);
}

TEST_CASE("PRDC is invariant under isometries") {
    Rng rng(44);
    const Matrix real = cloud(250, 0, 1, rng);
    const Matrix fake = cloud(230, 0.7, 0.8, rng);
    const MetricReport base = prdc(real, fake, 5);
    const double th = 0.83, tx = 3.1, ty = -7.4;
    auto move = [&](const Matrix& m, bool reflect) {
        Matrix out(m.rows(), 2);
        for (std::size_t i = 0; i < m.rows(); ++i) {
            const double y = reflect ? -m(i, 1) : m(i, 1);
            out(i, 0) = std::cos(th) * m(i, 0) - std::sin(th) * y + tx;
            out(i, 1) = std::sin(th) * m(i, 0) + std::cos(th) * y + ty;
        }
        return out;
    };
    for (bool reflect : {false, true}) {
        const MetricReport r = prdc(move(real, reflect), move(fake, reflect), 5);
        CHECK(std::abs(r.precision - base.precision) <= 1e-9);
        CHECK(std::abs(r.recall - base.recall) <= 1e-9);
        CHECK(std::abs(r.density - base.density) <= 1e-9);
        CHECK(std::abs(r.coverage - base.coverage) <= 1e-9);
    }
}

TEST_CASE("disjoint supports score zero") {
    Rng rng(6);
    const MetricReport r = prdc(cloud(100, 0, 0.1, rng), cloud(100, 50, 0.1, rng), 5);
    CHECK(r.precision == 0.0);
    CHECK(r.recall == 0.0);
    CHECK(r.density == 0.0);
    CHECK(r.coverage == 0.0);
}

TEST_CASE("knn radii and argument checks") {
    const Matrix line{{0, 0}, {1, 0}, {3, 0}, {6, 0}};
    const auto r1 = knn_radii(line, 1);
    CHECK(r1 == std::vector<double>{1, 1, 2, 3});
    const auto r2 = knn_radii(line, 2);
    CHECK(r2 == std::vector<double>{3, 2, 3, 5});
    CHECK_THROWS_AS(knn_radii(line, 4), ContractError);
    CHECK_THROWS_AS(knn_radii(line, 0), ContractError);
    CHECK_THROWS_AS(prdc(line, Matrix(5, 3), 1), ContractError);
}

TEST_CASE("metric CSV row") {
    MetricReport r{0.5, 0.25, 1.0, 0.75, 5, 10, 12};
    CHECK(metric_csv_header() == "step,precision,recall,density,coverage,k,n_real,n_fake");
    CHECK(metric_csv_row(100, r) == "100,0.5,0.25,1,0.75,5,10,12");
}
