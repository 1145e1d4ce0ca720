#pragma once

#include "pairgan/autodiff.hpp"

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace pairgan {

enum class AdversarialLoss { NonSaturating, Relativistic };

/// Which latent candidates each generated sample is contrasted against.
enum class PairingNegatives {
    InBatch,      ///< every latent in the minibatch
    Derangement,  ///< only z_{pi(i)} for a fixed-point-free permutation pi
};

std::string to_string(AdversarialLoss v);
std::string to_string(PairingNegatives v);
AdversarialLoss parse_adversarial_loss(const std::string& s);
PairingNegatives parse_pairing_negatives(const std::string& s);

struct LossConfig {
    AdversarialLoss adversarial = AdversarialLoss::NonSaturating;
    double lambda_pair = 0.0;
    double gamma_r1 = 0.0;
    double lambda_ms = 0.0;
    double temperature = 0.1;
    double eps_ms = 1e-5;
    PairingNegatives negatives = PairingNegatives::InBatch;

    void validate() const;
    friend bool operator==(const LossConfig&, const LossConfig&) = default;
};

/// Mean softmax cross-entropy with the diagonal as the correct class.
ad::Var pairing_loss(const ad::Var& logits);

/// Adds a large negative constant to every logit outside {i, perm[i]}, so
/// that pairing_loss only contrasts against the deranged negative.
ad::Var restrict_to_pairs(const ad::Var& logits, std::span<const std::size_t> perm);

ad::Var nonsat_d_loss(const ad::Var& d_real, const ad::Var& d_fake);
ad::Var nonsat_g_loss(const ad::Var& d_fake);
ad::Var relativistic_d_loss(const ad::Var& d_real, const ad::Var& d_fake);
ad::Var relativistic_g_loss(const ad::Var& d_real, const ad::Var& d_fake);

using Discriminator = std::function<ad::Var(const ad::Var&)>;

/// (gamma / 2) * mean_i |grad_x D(x_i)|^2 over a real batch placed on the
/// tape as a differentiable leaf.
ad::Var r1_penalty(const Discriminator& discriminator, const ad::Var& real_batch, double gamma);

/// mean_i |z1_i - z2_i|_1 / (|x1_i - x2_i|_1 + eps): minimized by the generator.
ad::Var mode_seeking_term(const ad::Var& z1, const ad::Var& z2, const ad::Var& x1,
                          const ad::Var& x2, double eps);

struct GeneratorParts {
    ad::Var adversarial;                 ///< L_GAN^(G)
    std::optional<ad::Var> pair_logits;  ///< required when lambda_pair > 0
    struct ModeSeeking {
        ad::Var z1, z2, x1, x2;
    };
    std::optional<ModeSeeking> mode_seeking;  ///< required when lambda_ms > 0
};

struct GeneratorObjective {
    ad::Var total;
    ad::Var adversarial;
    std::optional<ad::Var> pair;
    std::optional<ad::Var> mode_seeking;
};

GeneratorObjective generator_objective(const LossConfig& cfg, const GeneratorParts& parts);

struct DiscriminatorParts {
    ad::Var adversarial;                ///< L_GAN^(D)
    std::optional<ad::Var> r1_penalty;  ///< required when gamma_r1 > 0
};

struct DiscriminatorObjective {
    ad::Var total;
    ad::Var adversarial;
    std::optional<ad::Var> r1;
};

DiscriminatorObjective discriminator_objective(const LossConfig& cfg,
                                               const DiscriminatorParts& parts);

}  // namespace pairgan
