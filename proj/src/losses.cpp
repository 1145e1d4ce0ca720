#include "pairgan/losses.hpp"

#include "pairgan/text.hpp"

#include <cmath>

namespace pairgan {

namespace {

void require_same_shape(const ad::Var& a, const ad::Var& b, const char* what) {
    if (!a.value().same_shape(b.value())) {
        throw ContractError(std::string(what) + ": shapes differ, " + shape_string(a.value()) +
                            " vs " + shape_string(b.value()));
    }
}

void require_column(const ad::Var& a, const char* what) {
    if (a.cols() != 1 || a.rows() == 0) {
        throw ContractError(std::string(what) + ": expected one logit per sample, got " +
                            shape_string(a.value()));
    }
}

void require_weight(double w, const char* name) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
        throw ContractError(std::string("LossConfig: ") + name + " must be finite and >= 0, got " +
                            format_double(w));
    }
}

}  // namespace

std::string to_string(AdversarialLoss v) {
    return v == AdversarialLoss::NonSaturating ? "non_saturating" : "relativistic";
}

std::string to_string(PairingNegatives v) {
    return v == PairingNegatives::InBatch ? "in_batch" : "derangement";
}

AdversarialLoss parse_adversarial_loss(const std::string& s) {
    if (s == "non_saturating") return AdversarialLoss::NonSaturating;
    if (s == "relativistic") return AdversarialLoss::Relativistic;
    throw ContractError("unknown adversarial loss '" + s +
                        "' (expected non_saturating or relativistic)");
}

PairingNegatives parse_pairing_negatives(const std::string& s) {
    if (s == "in_batch") return PairingNegatives::InBatch;
    if (s == "derangement") return PairingNegatives::Derangement;
    throw ContractError("unknown pairing negatives '" + s + "' (expected in_batch or derangement)");
}

void LossConfig::validate() const {
    require_weight(lambda_pair, "lambda_pair");
    require_weight(gamma_r1, "gamma_r1");
    require_weight(lambda_ms, "lambda_ms");
    if (!(temperature > 0.0) || !std::isfinite(temperature)) {
        throw ContractError("LossConfig: temperature must be > 0, got " +
                            format_double(temperature));
    }
    if (!(eps_ms > 0.0)) {
        throw ContractError("LossConfig: eps_ms must be > 0, got " + format_double(eps_ms));
    }
}

ad::Var pairing_loss(const ad::Var& logits) {
    const std::size_t b = logits.rows();
    if (logits.cols() != b) {
        throw ContractError("pairing_loss: logits must be square, got " +
                            shape_string(logits.value()));
    }
    if (b < 2) throw ContractError("pairing_loss: batch size must be >= 2");
    return ad::mean(ad::softmax_cross_entropy_rowwise(logits, Matrix::identity(b)));
}

ad::Var restrict_to_pairs(const ad::Var& logits, std::span<const std::size_t> perm) {
    const std::size_t b = logits.rows();
    if (logits.cols() != b || perm.size() != b) {
        throw ContractError("restrict_to_pairs: logits " + shape_string(logits.value()) +
                            " with permutation of size " + std::to_string(perm.size()));
    }
    // exp(-1e9 + O(1/tau)) underflows to exactly zero in the softmax.
    Matrix mask(b, b, -1e9);
    for (std::size_t i = 0; i < b; ++i) {
        if (perm[i] >= b) throw ContractError("restrict_to_pairs: permutation index out of range");
        mask(i, i) = 0.0;
        mask(i, perm[i]) = 0.0;
    }
    return logits + logits.tape().constant(std::move(mask));
}

ad::Var nonsat_d_loss(const ad::Var& d_real, const ad::Var& d_fake) {
    require_column(d_real, "nonsat_d_loss");
    require_column(d_fake, "nonsat_d_loss");
    return ad::mean(ad::softplus(ad::scale(d_real, -1.0))) + ad::mean(ad::softplus(d_fake));
}

ad::Var nonsat_g_loss(const ad::Var& d_fake) {
    require_column(d_fake, "nonsat_g_loss");
    return ad::mean(ad::softplus(ad::scale(d_fake, -1.0)));
}

ad::Var relativistic_d_loss(const ad::Var& d_real, const ad::Var& d_fake) {
    require_column(d_real, "relativistic_d_loss");
    require_same_shape(d_real, d_fake, "relativistic_d_loss");
    return ad::mean(ad::softplus(d_fake - d_real));
}

ad::Var relativistic_g_loss(const ad::Var& d_real, const ad::Var& d_fake) {
    require_column(d_real, "relativistic_g_loss");
    require_same_shape(d_real, d_fake, "relativistic_g_loss");
    return ad::mean(ad::softplus(d_real - d_fake));
}

ad::Var r1_penalty(const Discriminator& discriminator, const ad::Var& real_batch, double gamma) {
    if (!(gamma >= 0.0)) throw ContractError("r1_penalty: gamma must be >= 0");
    return ad::scale(ad::input_grad_norm(discriminator, real_batch), 0.5 * gamma);
}

ad::Var mode_seeking_term(const ad::Var& z1, const ad::Var& z2, const ad::Var& x1,
                          const ad::Var& x2, double eps) {
    require_same_shape(z1, z2, "mode_seeking_term");
    require_same_shape(x1, x2, "mode_seeking_term");
    if (z1.rows() != x1.rows()) {
        throw ContractError("mode_seeking_term: latent batch " + shape_string(z1.value()) +
                            " vs sample batch " + shape_string(x1.value()));
    }
    const ad::Var dz = ad::sum_cols(ad::abs(z1 - z2));
    const ad::Var dx = ad::add_scalar(ad::sum_cols(ad::abs(x1 - x2)), eps);
    return ad::mean(dz / dx);
}

GeneratorObjective generator_objective(const LossConfig& cfg, const GeneratorParts& parts) {
    GeneratorObjective out;
    out.adversarial = parts.adversarial;
    out.total = parts.adversarial;
    if (cfg.lambda_pair > 0.0) {
        if (!parts.pair_logits) {
            throw ContractError("generator_objective: lambda_pair > 0 but no pairing logits");
        }
        out.pair = pairing_loss(*parts.pair_logits);
        out.total = out.total + ad::scale(*out.pair, cfg.lambda_pair);
    }
    if (cfg.lambda_ms > 0.0) {
        if (!parts.mode_seeking) {
            throw ContractError("generator_objective: lambda_ms > 0 but no mode-seeking inputs");
        }
        const auto& ms = *parts.mode_seeking;
        out.mode_seeking = mode_seeking_term(ms.z1, ms.z2, ms.x1, ms.x2, cfg.eps_ms);
        out.total = out.total + ad::scale(*out.mode_seeking, cfg.lambda_ms);
    }
    return out;
}

DiscriminatorObjective discriminator_objective(const LossConfig& cfg,
                                               const DiscriminatorParts& parts) {
    DiscriminatorObjective out;
    out.adversarial = parts.adversarial;
    out.total = parts.adversarial;
    if (cfg.gamma_r1 > 0.0) {
        if (!parts.r1_penalty) {
            throw ContractError("discriminator_objective: gamma_r1 > 0 but no R1 penalty");
        }
        out.r1 = *parts.r1_penalty;
        out.total = out.total + *parts.r1_penalty;
    }
    return out;
}

}  // namespace pairgan
