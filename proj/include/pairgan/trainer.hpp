#pragma once

#include "pairgan/losses.hpp"
#include "pairgan/metrics.hpp"
#include "pairgan/nets.hpp"
#include "pairgan/rng.hpp"
#include "pairgan/synthdata.hpp"

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace pairgan {

struct TrainConfig {
    TargetSpec target = TargetSpec::ring();
    PriorSpec prior = PriorSpec::standard_normal(2);
    LossConfig loss;

    std::size_t batch_size = 256;
    std::size_t steps = 20000;
    std::size_t eval_every = 1000;
    std::size_t n_eval = 2000;
    std::size_t k = 5;
    std::uint64_t seed = 0;

    // Architecture shared by G, D and both pairing encoders.
    std::vector<std::size_t> hidden_dims{128, 128};
    double leaky_slope = 0.2;
    std::size_t embed_dim = 32;

    AdamConfig adam_generator;
    AdamConfig adam_discriminator;
    AdamConfig adam_pairing;

    void validate() const;
    friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

/// Loss values of the most recent step (or a probe at step 0).
struct LossSnapshot {
    double d_total = 0.0;  ///< full discriminator objective, R1 included
    double g_adv = 0.0;
    double pair = 0.0;
    double r1 = 0.0;
    double ms = 0.0;
    double g_total = 0.0;  ///< generator objective actually minimized
};

struct TrajectoryEntry {
    std::size_t step = 0;
    MetricReport metrics;
    LossSnapshot losses;
};

using Trajectory = std::vector<TrajectoryEntry>;

/// "step,precision,recall,density,coverage,L_D,L_G_adv,L_pair,r1,ms"
std::string trajectory_csv_header();
std::string trajectory_csv_row(const TrajectoryEntry& e);

/// Raised when a loss term turns non-finite; carries the partial trajectory.
class TrainingError : public std::runtime_error {
public:
    TrainingError(const std::string& term, std::size_t step, Trajectory partial = {});
    const std::string& term() const noexcept { return term_; }
    std::size_t step() const noexcept { return step_; }
    const Trajectory& partial() const noexcept { return partial_; }

private:
    std::string term_;
    std::size_t step_;
    Trajectory partial_;
};

/// Uniformly random permutation with perm[i] != i; b must be >= 2.
std::vector<std::size_t> sample_derangement(std::size_t b, Rng& rng);

struct TrainState {
    TrainConfig config;
    MlpParams generator;
    MlpParams discriminator;
    PairingNet pairing;
    AdamState adam_g;
    AdamState adam_d;
    AdamState adam_p;
    Rng rng;
    std::size_t step = 0;
    LossSnapshot last;
};

/// Initial parameters and optimizer state; parameters come from the "init"
/// substream of the seed and batches from the "train" substream.
TrainState make_train_state(const TrainConfig& config);

/// Adam on psi only, from a real batch and a latent batch.
void discriminator_update(TrainState& state, const Matrix& real, const Matrix& latent);
/// Joint Adam on theta and phi; `real` feeds the relativistic loss, `rng`
/// draws derangements and the second mode-seeking batch.
void generator_update(TrainState& state, const Matrix& real, const Matrix& latent, Rng& rng);

/// One discriminator update on fresh real/fake batches, then one joint
/// generator + pairing-network update on a fresh latent batch.
void train_step(TrainState& state);

/// Loss values on a probe batch drawn from `rng`, without updating anything.
LossSnapshot probe_losses(const TrainState& state, Rng rng);

struct RunResult {
    MlpParams generator;
    MlpParams discriminator;
    PairingNet pairing;
    Trajectory trajectory;
    MetricReport final_report;
    double wall_seconds = 0.0;
    std::string config_echo;
    std::uint64_t seed = 0;
};

/// Evaluation at step s draws from Rng(derive_seed(seed, "eval", s)).
Rng eval_rng(std::uint64_t seed, std::size_t step);

using TrajectoryObserver = std::function<void(const TrajectoryEntry&)>;

/// Runs config.steps train steps, evaluating at step 0 and every
/// eval_every steps. The observer sees each entry as soon as it exists.
RunResult train(const TrainConfig& config, const TrajectoryObserver& observer = {});

}  // namespace pairgan
