#include "pairgan/metrics.hpp"

#include "pairgan/text.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace pairgan {

namespace {

// Row indices sorted by first coordinate, for windowed neighbour scans.
std::vector<std::size_t> order_by_first_coord(const Matrix& pts) {
    std::vector<std::size_t> idx(pts.rows());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return pts(a, 0) < pts(b, 0); });
    return idx;
}

// Calls f(j) for every row j of `pts` with |pts(j,0) - centre| <= reach.
template <typename F>
void for_each_in_window(const Matrix& pts, const std::vector<std::size_t>& order, double centre,
                        double reach, F&& f) {
    // Widened so rounding in the window bounds can never exclude a member.
    reach = reach * (1.0 + 1e-9) + 1e-12;
    auto lo = std::lower_bound(order.begin(), order.end(), centre - reach,
                               [&](std::size_t j, double v) { return pts(j, 0) < v; });
    for (auto it = lo; it != order.end() && pts(*it, 0) <= centre + reach; ++it) {
        if (!f(*it)) return;
    }
}

}  // namespace

double row_distance(std::span<const double> a, std::span<const double> b) noexcept {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return std::sqrt(s);
}

std::vector<double> knn_radii(const Matrix& points, std::size_t k) {
    const std::size_t n = points.rows();
    if (k == 0) throw ContractError("knn_radii: k must be >= 1");
    if (n <= k) {
        throw ContractError("knn_radii: need more than k=" + std::to_string(k) + " points, got " +
                            std::to_string(n));
    }
    std::vector<double> radii(n);
    std::vector<double> dist(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t w = 0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j != i) dist[w++] = row_distance(points.row(i), points.row(j));
        }
        std::nth_element(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k - 1),
                         dist.end());
        radii[i] = dist[k - 1];
    }
    return radii;
}

MetricReport prdc(const Matrix& real, const Matrix& fake, std::size_t k) {
    if (real.cols() != fake.cols() || real.cols() == 0) {
        throw ContractError("prdc: dimension mismatch " + shape_string(real) + " vs " +
                            shape_string(fake));
    }
    const std::vector<double> real_r = knn_radii(real, k);
    const std::vector<double> fake_r = knn_radii(fake, k);
    const double max_real_r = *std::max_element(real_r.begin(), real_r.end());
    const double max_fake_r = *std::max_element(fake_r.begin(), fake_r.end());
    const auto real_order = order_by_first_coord(real);
    const auto fake_order = order_by_first_coord(fake);

    const std::size_t n = real.rows();
    const std::size_t m = fake.rows();

    // Precision and density: real balls containing each fake point.
    std::size_t precise = 0;
    std::size_t ball_hits = 0;
    for (std::size_t j = 0; j < m; ++j) {
        std::size_t hits = 0;
        for_each_in_window(real, real_order, fake(j, 0), max_real_r, [&](std::size_t i) {
            if (row_distance(fake.row(j), real.row(i)) <= real_r[i]) ++hits;
            return true;
        });
        precise += hits > 0 ? 1 : 0;
        ball_hits += hits;
    }

    // Recall: real points inside some fake ball.
    std::size_t recalled = 0;
    for (std::size_t i = 0; i < n; ++i) {
        bool inside = false;
        for_each_in_window(fake, fake_order, real(i, 0), max_fake_r, [&](std::size_t j) {
            inside = row_distance(real.row(i), fake.row(j)) <= fake_r[j];
            return !inside;
        });
        recalled += inside ? 1 : 0;
    }

    // Coverage: real balls containing at least one fake point.
    std::size_t covered = 0;
    for (std::size_t i = 0; i < n; ++i) {
        bool hit = false;
        for_each_in_window(fake, fake_order, real(i, 0), real_r[i], [&](std::size_t j) {
            hit = row_distance(real.row(i), fake.row(j)) <= real_r[i];
            return !hit;
        });
        covered += hit ? 1 : 0;
    }

    MetricReport r;
    r.k = k;
    r.n_real = n;
    r.n_fake = m;
    r.precision = static_cast<double>(precise) / static_cast<double>(m);
    r.recall = static_cast<double>(recalled) / static_cast<double>(n);
    r.density = static_cast<double>(ball_hits) / (static_cast<double>(k) * static_cast<double>(m));
    r.coverage = static_cast<double>(covered) / static_cast<double>(n);
    return r;
}

EvalSamples draw_eval_samples(const MlpParams& generator, const PriorSpec& prior,
                              const TargetSpec& target, std::size_t n, const Rng& rng) {
    Rng real_rng = rng.substream("eval.real");
    Rng latent_rng = rng.substream("eval.latent");
    EvalSamples s;
    s.real = sample_target(target, n, real_rng);
    s.fake = mlp_forward(generator, sample_prior(prior, n, latent_rng));
    return s;
}

MetricReport evaluate_generator(const MlpParams& generator, const PriorSpec& prior,
                                const TargetSpec& target, std::size_t n_eval, std::size_t k,
                                const Rng& rng) {
    if (n_eval <= k) {
        throw ContractError("evaluate_generator: n_eval must exceed k");
    }
    const EvalSamples s = draw_eval_samples(generator, prior, target, n_eval, rng);
    return prdc(s.real, s.fake, k);
}

std::string metric_csv_header() { return "step,precision,recall,density,coverage,k,n_real,n_fake"; }

std::string metric_csv_row(std::size_t step, const MetricReport& r) {
    return std::to_string(step) + ',' + format_double(r.precision) + ',' +
           format_double(r.recall) + ',' + format_double(r.density) + ',' +
           format_double(r.coverage) + ',' + std::to_string(r.k) + ',' +
           std::to_string(r.n_real) + ',' + std::to_string(r.n_fake);
}

}  // namespace pairgan
