#pragma once

#include "pairgan/matrix.hpp"
#include "pairgan/nets.hpp"
#include "pairgan/rng.hpp"
#include "pairgan/synthdata.hpp"

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace pairgan {

struct MetricReport {
    double precision = 0.0;
    double recall = 0.0;
    double density = 0.0;
    double coverage = 0.0;
    std::size_t k = 0;
    std::size_t n_real = 0;
    std::size_t n_fake = 0;

    friend bool operator==(const MetricReport&, const MetricReport&) = default;
};

/// Euclidean distance between two rows of equal length.
double row_distance(std::span<const double> a, std::span<const double> b) noexcept;

/// Distance from each point to its k-th nearest other point.
std::vector<double> knn_radii(const Matrix& points, std::size_t k);

/// Precision, recall, density and coverage of `fake` against `real` using
/// closed k-NN balls in raw coordinate space.
MetricReport prdc(const Matrix& real, const Matrix& fake, std::size_t k);

struct EvalSamples {
    Matrix real;
    Matrix fake;
};

/// Draws n real and n generated points from substreams of `rng`; the
/// generator is fed prior samples. `rng` itself is never advanced.
EvalSamples draw_eval_samples(const MlpParams& generator, const PriorSpec& prior,
                              const TargetSpec& target, std::size_t n, const Rng& rng);

MetricReport evaluate_generator(const MlpParams& generator, const PriorSpec& prior,
                                const TargetSpec& target, std::size_t n_eval, std::size_t k,
                                const Rng& rng);

/// "step,precision,recall,density,coverage,k,n_real,n_fake"
std::string metric_csv_header();
std::string metric_csv_row(std::size_t step, const MetricReport& report);

}  // namespace pairgan
