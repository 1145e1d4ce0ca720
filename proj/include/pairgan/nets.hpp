#pragma once

#include "pairgan/autodiff.hpp"
#include "pairgan/matrix.hpp"
#include "pairgan/rng.hpp"

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace pairgan {

struct MlpSpec {
    std::size_t input_dim = 2;
    std::vector<std::size_t> hidden_dims{128, 128};
    std::size_t output_dim = 2;
    double leaky_slope = 0.2;

    void validate() const;
    std::size_t layer_count() const noexcept { return hidden_dims.size() + 1; }
    friend bool operator==(const MlpSpec&, const MlpSpec&) = default;
};

/// Layer l computes h_{l+1} = h_l * weights[l] + biases[l], with weights
/// stored as fan_in x fan_out and biases as 1 x fan_out.
struct MlpParams {
    MlpSpec spec;
    std::vector<Matrix> weights;
    std::vector<Matrix> biases;

    /// Flat view [W0, b0, W1, b1, ...]; the order used for gradients and Adam.
    std::vector<Matrix*> tensors();
    std::vector<const Matrix*> tensors() const;
    std::size_t parameter_count() const;
    friend bool operator==(const MlpParams&, const MlpParams&) = default;
};

/// Kaiming-normal weights for LeakyReLU, zero biases.
MlpParams init_params(const MlpSpec& spec, Rng& rng);

/// Evaluates the network outside any tape.
Matrix mlp_forward(const MlpParams& params, const Matrix& x);

/// Parameters of one network placed on a tape, in MlpParams::tensors() order.
struct TracedMlp {
    MlpSpec spec;
    std::vector<ad::Var> tensors;
};

/// Registers params as differentiable leaves (or constants when frozen).
TracedMlp trace_params(ad::Tape& tape, const MlpParams& params, bool frozen = false);

ad::Var mlp_forward(const TracedMlp& net, const ad::Var& x);

struct PairingNet {
    MlpParams z_encoder;
    MlpParams x_encoder;
    std::size_t embed_dim = 32;
    friend bool operator==(const PairingNet&, const PairingNet&) = default;
};

PairingNet init_pairing_net(std::size_t latent_dim, std::size_t data_dim,
                            const std::vector<std::size_t>& hidden_dims, std::size_t embed_dim,
                            double leaky_slope, Rng& rng);

struct TracedPairingNet {
    TracedMlp z_encoder;
    TracedMlp x_encoder;
};

TracedPairingNet trace_pairing_net(ad::Tape& tape, const PairingNet& net, bool frozen = false);

/// logits(i, j) = cos(E_x(x_i), E_z(z_j)) / temperature.
ad::Var pairing_similarities(const TracedPairingNet& net, const ad::Var& xs, const ad::Var& zs,
                             double temperature);

struct AdamConfig {
    double lr = 2e-4;
    double beta1 = 0.5;
    double beta2 = 0.999;
    double eps = 1e-8;
    friend bool operator==(const AdamConfig&, const AdamConfig&) = default;
};

struct AdamState {
    AdamConfig config;
    std::vector<Matrix> m;
    std::vector<Matrix> v;
    std::size_t t = 0;
};

AdamState make_adam_state(const AdamConfig& config, std::span<const Matrix* const> params);

/// Bias-corrected Adam update; increments t once.
void adam_step(std::span<Matrix* const> params, std::span<const Matrix> grads, AdamState& state);

// Checkpoints: a text header line "pairgan-mlp v1", the spec line
// "spec <in> <out> <slope> <n_hidden> <h...>", then for each tensor a line
// "<name> <rows> <cols>" followed by its row-major values, one row per line,
// printed with round-trip precision.
void write_checkpoint(std::ostream& out, const MlpParams& params);
MlpParams read_checkpoint(std::istream& in);

}  // namespace pairgan
