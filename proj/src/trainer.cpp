#include "pairgan/trainer.hpp"

#include "pairgan/config.hpp"
#include "pairgan/text.hpp"

#include <chrono>
#include <cmath>
#include <numeric>

namespace pairgan {

namespace {

struct DiscriminatorPhase {
    double total = 0.0;
    double r1 = 0.0;
    std::vector<Matrix> grads;
};

struct GeneratorPhase {
    double total = 0.0;
    double adv = 0.0;
    double pair = 0.0;
    double ms = 0.0;
    std::vector<Matrix> generator_grads;
    std::vector<Matrix> pairing_grads;
};

double checked(const ad::Var& v, const char* term, std::size_t step) {
    const double x = v.value().item();
    if (!std::isfinite(x)) throw TrainingError(term, step);
    return x;
}

void check_grads(const std::vector<Matrix>& grads, const char* term, std::size_t step) {
    for (const auto& g : grads) {
        if (!g.all_finite()) throw TrainingError(term, step);
    }
}

std::vector<Matrix> grads_for(ad::Tape& tape, const ad::Var& loss,
                              const std::vector<ad::Var>& params) {
    return std::move(tape.grad(loss, params)).release();
}

Discriminator traced_discriminator(const TracedMlp& net) {
    return [net](const ad::Var& x) { return mlp_forward(net, x); };
}

DiscriminatorPhase discriminator_phase(const TrainState& s, const Matrix& real,
                                       const Matrix& latent) {
    const TrainConfig& cfg = s.config;
    ad::Tape tape;
    const TracedMlp d = trace_params(tape, s.discriminator);
    // The generator is evaluated off-tape: no gradient can reach theta here.
    const Matrix fake = mlp_forward(s.generator, latent);

    const bool use_r1 = cfg.loss.gamma_r1 > 0.0;
    const ad::Var x = use_r1 ? tape.variable(real) : tape.constant(real);
    const ad::Var d_real = mlp_forward(d, x);
    const ad::Var d_fake = mlp_forward(d, tape.constant(fake));

    DiscriminatorParts parts;
    parts.adversarial = cfg.loss.adversarial == AdversarialLoss::Relativistic
                            ? relativistic_d_loss(d_real, d_fake)
                            : nonsat_d_loss(d_real, d_fake);
    if (use_r1) parts.r1_penalty = r1_penalty(traced_discriminator(d), x, cfg.loss.gamma_r1);
    const DiscriminatorObjective obj = discriminator_objective(cfg.loss, parts);

    DiscriminatorPhase out;
    checked(obj.adversarial, "L_D_adv", s.step);
    if (obj.r1) out.r1 = checked(*obj.r1, "r1", s.step);
    out.total = checked(obj.total, "L_D", s.step);
    out.grads = grads_for(tape, obj.total, d.tensors);
    check_grads(out.grads, "grad(L_D)", s.step);
    return out;
}

GeneratorPhase generator_phase(const TrainState& s, const Matrix& real, const Matrix& latent,
                               Rng& rng) {
    const TrainConfig& cfg = s.config;
    ad::Tape tape;
    const TracedMlp g = trace_params(tape, s.generator);
    // Frozen discriminator: psi enters as constants.
    const TracedMlp d = trace_params(tape, s.discriminator, /*frozen=*/true);

    const ad::Var z = tape.constant(latent);
    const ad::Var fake = mlp_forward(g, z);
    const ad::Var d_fake = mlp_forward(d, fake);

    GeneratorParts parts;
    if (cfg.loss.adversarial == AdversarialLoss::Relativistic) {
        const ad::Var d_real = mlp_forward(d, tape.constant(real));
        parts.adversarial = relativistic_g_loss(d_real, d_fake);
    } else {
        parts.adversarial = nonsat_g_loss(d_fake);
    }

    std::optional<TracedPairingNet> p;
    if (cfg.loss.lambda_pair > 0.0) {
        p = trace_pairing_net(tape, s.pairing);
        ad::Var logits = pairing_similarities(*p, fake, z, cfg.loss.temperature);
        if (cfg.loss.negatives == PairingNegatives::Derangement) {
            logits = restrict_to_pairs(logits, sample_derangement(latent.rows(), rng));
        }
        parts.pair_logits = logits;
    }
    if (cfg.loss.lambda_ms > 0.0) {
        const ad::Var z2 = tape.constant(sample_prior(cfg.prior, latent.rows(), rng));
        parts.mode_seeking = GeneratorParts::ModeSeeking{z, z2, fake, mlp_forward(g, z2)};
    }
    const GeneratorObjective obj = generator_objective(cfg.loss, parts);

    GeneratorPhase out;
    out.adv = checked(obj.adversarial, "L_G_adv", s.step);
    if (obj.pair) out.pair = checked(*obj.pair, "L_pair", s.step);
    if (obj.mode_seeking) out.ms = checked(*obj.mode_seeking, "ms", s.step);
    out.total = checked(obj.total, "L_G", s.step);

    std::vector<ad::Var> wrt = g.tensors;
    if (p) {
        wrt.insert(wrt.end(), p->z_encoder.tensors.begin(), p->z_encoder.tensors.end());
        wrt.insert(wrt.end(), p->x_encoder.tensors.begin(), p->x_encoder.tensors.end());
    }
    std::vector<Matrix> grads = grads_for(tape, obj.total, wrt);
    check_grads(grads, "grad(L_G)", s.step);
    const auto split_at = static_cast<std::ptrdiff_t>(g.tensors.size());
    out.generator_grads.assign(std::make_move_iterator(grads.begin()),
                               std::make_move_iterator(grads.begin() + split_at));
    out.pairing_grads.assign(std::make_move_iterator(grads.begin() + split_at),
                             std::make_move_iterator(grads.end()));
    return out;
}

std::vector<Matrix*> pairing_tensors(PairingNet& net) {
    std::vector<Matrix*> out = net.z_encoder.tensors();
    const auto x = net.x_encoder.tensors();
    out.insert(out.end(), x.begin(), x.end());
    return out;
}

std::vector<const Matrix*> pairing_tensors(const PairingNet& net) {
    std::vector<const Matrix*> out = net.z_encoder.tensors();
    const auto x = net.x_encoder.tensors();
    out.insert(out.end(), x.begin(), x.end());
    return out;
}

std::vector<const Matrix*> const_view(const std::vector<Matrix*>& v) {
    return {v.begin(), v.end()};
}

}  // namespace

void TrainConfig::validate() const {
    target.validate();
    prior.validate();
    loss.validate();
    if (batch_size < 2) throw ContractError("batch_size must be >= 2");
    if (steps < 1) throw ContractError("steps must be >= 1");
    if (eval_every < 1) throw ContractError("eval_every must be >= 1");
    if (steps % eval_every != 0) {
        throw ContractError("eval_every (" + std::to_string(eval_every) +
                            ") must divide steps (" + std::to_string(steps) + ")");
    }
    if (k < 1) throw ContractError("k must be >= 1");
    if (n_eval <= k) throw ContractError("n_eval must exceed k");
    if (embed_dim < 1) throw ContractError("embed_dim must be >= 1");
    MlpSpec{2, hidden_dims, 2, leaky_slope}.validate();
    for (const AdamConfig* a : {&adam_generator, &adam_discriminator, &adam_pairing}) {
        if (!(a->lr >= 0.0) || !(a->beta1 >= 0.0 && a->beta1 < 1.0) ||
            !(a->beta2 >= 0.0 && a->beta2 < 1.0) || !(a->eps > 0.0)) {
            throw ContractError("optimizer: need lr >= 0, 0 <= beta < 1, eps > 0");
        }
    }
}

std::string trajectory_csv_header() {
    return "step,precision,recall,density,coverage,L_D,L_G_adv,L_pair,r1,ms";
}

std::string trajectory_csv_row(const TrajectoryEntry& e) {
    const MetricReport& m = e.metrics;
    const LossSnapshot& l = e.losses;
    return std::to_string(e.step) + ',' + format_double(m.precision) + ',' +
           format_double(m.recall) + ',' + format_double(m.density) + ',' +
           format_double(m.coverage) + ',' + format_double(l.d_total) + ',' +
           format_double(l.g_adv) + ',' + format_double(l.pair) + ',' + format_double(l.r1) +
           ',' + format_double(l.ms);
}

TrainingError::TrainingError(const std::string& term, std::size_t step, Trajectory partial)
    : std::runtime_error("non-finite value in " + term + " at step " + std::to_string(step)),
      term_(term),
      step_(step),
      partial_(std::move(partial)) {}

std::vector<std::size_t> sample_derangement(std::size_t b, Rng& rng) {
    if (b < 2) throw ContractError("sample_derangement: size must be >= 2");
    std::vector<std::size_t> perm(b);
    for (;;) {
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        for (std::size_t i = b - 1; i > 0; --i) std::swap(perm[i], perm[rng.below(i + 1)]);
        bool fixed = false;
        for (std::size_t i = 0; i < b && !fixed; ++i) fixed = perm[i] == i;
        if (!fixed) return perm;
    }
}

TrainState make_train_state(const TrainConfig& config) {
    config.validate();
    TrainState s{.config = config,
                 .generator = {},
                 .discriminator = {},
                 .pairing = {},
                 .adam_g = {},
                 .adam_d = {},
                 .adam_p = {},
                 .rng = Rng(derive_seed(config.seed, "train", 0)),
                 .step = 0,
                 .last = {}};
    Rng init(derive_seed(config.seed, "init", 0));
    const std::size_t latent = config.prior.dimension();
    s.generator = init_params(MlpSpec{latent, config.hidden_dims, 2, config.leaky_slope}, init);
    s.discriminator = init_params(MlpSpec{2, config.hidden_dims, 1, config.leaky_slope}, init);
    s.pairing = init_pairing_net(latent, 2, config.hidden_dims, config.embed_dim,
                                 config.leaky_slope, init);
    s.adam_g = make_adam_state(config.adam_generator, const_view(s.generator.tensors()));
    s.adam_d = make_adam_state(config.adam_discriminator, const_view(s.discriminator.tensors()));
    s.adam_p = make_adam_state(config.adam_pairing, pairing_tensors(std::as_const(s.pairing)));
    return s;
}

void discriminator_update(TrainState& s, const Matrix& real, const Matrix& latent) {
    const DiscriminatorPhase dp = discriminator_phase(s, real, latent);
    adam_step(s.discriminator.tensors(), dp.grads, s.adam_d);
    s.last.d_total = dp.total;
    s.last.r1 = dp.r1;
}

void generator_update(TrainState& s, const Matrix& real, const Matrix& latent, Rng& rng) {
    const GeneratorPhase gp = generator_phase(s, real, latent, rng);
    adam_step(s.generator.tensors(), gp.generator_grads, s.adam_g);
    if (!gp.pairing_grads.empty()) adam_step(pairing_tensors(s.pairing), gp.pairing_grads, s.adam_p);
    s.last.g_adv = gp.adv;
    s.last.pair = gp.pair;
    s.last.ms = gp.ms;
    s.last.g_total = gp.total;
}

void train_step(TrainState& s) {
    const TrainConfig& cfg = s.config;
    const Matrix real = sample_target(cfg.target, cfg.batch_size, s.rng);
    const Matrix latent = sample_prior(cfg.prior, cfg.batch_size, s.rng);
    discriminator_update(s, real, latent);

    const Matrix fresh_latent = sample_prior(cfg.prior, cfg.batch_size, s.rng);
    generator_update(s, real, fresh_latent, s.rng);
    s.step += 1;
}

LossSnapshot probe_losses(const TrainState& s, Rng rng) {
    const TrainConfig& cfg = s.config;
    const Matrix real = sample_target(cfg.target, cfg.batch_size, rng);
    const Matrix latent = sample_prior(cfg.prior, cfg.batch_size, rng);
    const DiscriminatorPhase dp = discriminator_phase(s, real, latent);
    const Matrix fresh_latent = sample_prior(cfg.prior, cfg.batch_size, rng);
    const GeneratorPhase gp = generator_phase(s, real, fresh_latent, rng);
    return LossSnapshot{dp.total, gp.adv, gp.pair, dp.r1, gp.ms, gp.total};
}

Rng eval_rng(std::uint64_t seed, std::size_t step) {
    return Rng(derive_seed(seed, "eval", step));
}

RunResult train(const TrainConfig& config, const TrajectoryObserver& observer) {
    const auto started = std::chrono::steady_clock::now();
    TrainState s = make_train_state(config);
    RunResult result;
    result.config_echo = serialize_config(config);
    result.seed = config.seed;

    auto record = [&](const LossSnapshot& losses) {
        TrajectoryEntry e;
        e.step = s.step;
        e.losses = losses;
        e.metrics = evaluate_generator(s.generator, config.prior, config.target, config.n_eval,
                                       config.k, eval_rng(config.seed, s.step));
        result.trajectory.push_back(e);
        if (observer) observer(e);
    };

    try {
        record(probe_losses(s, eval_rng(config.seed, 0).substream("probe")));
        while (s.step < config.steps) {
            train_step(s);
            if (s.step % config.eval_every == 0) record(s.last);
        }
    } catch (const TrainingError& e) {
        throw TrainingError(e.term(), e.step(), result.trajectory);
    }

    result.generator = std::move(s.generator);
    result.discriminator = std::move(s.discriminator);
    result.pairing = std::move(s.pairing);
    result.final_report = result.trajectory.back().metrics;
    result.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return result;
}

}  // namespace pairgan
