#include "doctest.h"

#include "pairgan/config.hpp"
#include "pairgan/trainer.hpp"

#include <cmath>
#include <map>

using namespace pairgan;
namespace ad = pairgan::ad;

namespace {

TrainConfig small_config() {
    TrainConfig c;
    c.target = TargetSpec::ring();
    c.batch_size = 16;
    c.steps = 20;
    c.eval_every = 10;
    c.n_eval = 100;
    c.hidden_dims = {16, 16};
    c.embed_dim = 8;
    return c;
}

std::vector<Matrix> snapshot(const MlpParams& p) {
    std::vector<Matrix> out;
    for (const Matrix* t : p.tensors()) out.push_back(*t);
    return out;
}

std::vector<Matrix> snapshot(const PairingNet& p) {
    auto a = snapshot(p.z_encoder), b = snapshot(p.x_encoder);
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

double sigmoid(double v) { return 1.0 / (1.0 + std::exp(-v)); }

}  // namespace

TEST_CASE("derangements have no fixed points") {
    Rng rng(1);
    for (std::size_t b = 2; b < 40; ++b) {
        for (int rep = 0; rep < 20; ++rep) {
            const auto p = sample_derangement(b, rng);
            std::vector<bool> seen(b);
            for (std::size_t i = 0; i < b; ++i) {
                CHECK(p[i] != i);
                seen[p[i]] = true;
            }
            CHECK(std::all_of(seen.begin(), seen.end(), [](bool v) { return v; }));
        }
    }
    CHECK(sample_derangement(2, rng) == std::vector<std::size_t>{1, 0});
    CHECK_THROWS_AS(sample_derangement(1, rng), ContractError);
}

TEST_CASE("B = 3 derangements are uniform over the two cycles") {
    Rng rng(2024);
    const int n = 10000;
    int first = 0;
    for (int i = 0; i < n; ++i) {
        const auto p = sample_derangement(3, rng);
        const bool a = p == std::vector<std::size_t>{1, 2, 0};
        const bool b = p == std::vector<std::size_t>{2, 0, 1};
        REQUIRE((a || b));
        first += a;
    }
    const double sd = std::sqrt(n * 0.25);
    CHECK(std::abs(first - n / 2.0) <= 3 * sd);
}

TEST_CASE("generator update never touches the discriminator") {
    for (double lambda : {0.0, 0.05}) {
        TrainConfig c = small_config();
        c.loss.lambda_pair = lambda;
        c.loss.lambda_ms = 0.5;
        c.loss.adversarial = lambda > 0 ? AdversarialLoss::Relativistic : AdversarialLoss::NonSaturating;
        TrainState s = make_train_state(c);
        const auto psi = snapshot(s.discriminator);
        const auto theta = snapshot(s.generator);
        Rng rng(5);
        const Matrix real = sample_target(c.target, c.batch_size, rng);
        const Matrix z = sample_prior(c.prior, c.batch_size, rng);
        generator_update(s, real, z, rng);
        CHECK(snapshot(s.discriminator) == psi);
        CHECK_FALSE(snapshot(s.generator) == theta);
    }
}

TEST_CASE("discriminator update never touches generator or pairing network") {
    TrainConfig c = small_config();
    c.loss.lambda_pair = 0.05;
    c.loss.gamma_r1 = 1.0;
    TrainState s = make_train_state(c);
    const auto theta = snapshot(s.generator);
    const auto phi = snapshot(s.pairing);
    const auto psi = snapshot(s.discriminator);
    Rng rng(6);
    const Matrix real = sample_target(c.target, c.batch_size, rng);
    const Matrix z = sample_prior(c.prior, c.batch_size, rng);
    discriminator_update(s, real, z);
    CHECK(snapshot(s.generator) == theta);
    CHECK(snapshot(s.pairing) == phi);
    CHECK_FALSE(snapshot(s.discriminator) == psi);
}

TEST_CASE("lambda_pair = 0 leaves the pairing network bitwise unchanged over a run") {
    TrainConfig c = small_config();
    const auto phi = snapshot(make_train_state(c).pairing);
    const RunResult r = train(c);
    CHECK(snapshot(r.pairing) == phi);

    c.loss.lambda_pair = 0.05;
    CHECK_FALSE(snapshot(train(c).pairing) == phi);
}

TEST_CASE("lr = 0 everywhere: parameters frozen, losses still logged") {
    TrainConfig c = small_config();
    c.loss.lambda_pair = 0.05;
    c.loss.gamma_r1 = 1;
    c.adam_generator.lr = c.adam_discriminator.lr = c.adam_pairing.lr = 0;
    TrainState s = make_train_state(c);
    const auto g = snapshot(s.generator), d = snapshot(s.discriminator), p = snapshot(s.pairing);
    train_step(s);
    CHECK(snapshot(s.generator) == g);
    CHECK(snapshot(s.discriminator) == d);
    CHECK(snapshot(s.pairing) == p);
    CHECK(s.last.d_total > 0);
    CHECK(s.last.pair > 0);
    CHECK(s.last.r1 > 0);
}

TEST_CASE("first step on a linear discriminator matches hand-computed Adam") {
    TrainConfig c = small_config();
    c.hidden_dims = {};  // D(x) = x w + b, G linear too
    c.adam_discriminator.lr = 0.01;
    TrainState s = make_train_state(c);
    const Matrix w0 = s.discriminator.weights[0];
    const double b0 = s.discriminator.biases[0][0];

    Rng replay = s.rng;
    const Matrix real = sample_target(c.target, c.batch_size, replay);
    const Matrix z = sample_prior(c.prior, c.batch_size, replay);
    const Matrix fake = mlp_forward(s.generator, z);

    // L_D = mean softplus(-D(real)) + mean softplus(D(fake))
    double gw[2] = {}, gb = 0;
    const double n = static_cast<double>(c.batch_size);
    for (std::size_t i = 0; i < c.batch_size; ++i) {
        const double dr = real(i, 0) * w0[0] + real(i, 1) * w0[1] + b0;
        const double df = fake(i, 0) * w0[0] + fake(i, 1) * w0[1] + b0;
        const double cr = -sigmoid(-dr) / n, cf = sigmoid(df) / n;
        gw[0] += cr * real(i, 0) + cf * fake(i, 0);
        gw[1] += cr * real(i, 1) + cf * fake(i, 1);
        gb += cr + cf;
    }
    // After one bias-corrected Adam step: delta = -lr g / (|g| + eps).
    auto step = [&](double g) { return -0.01 * g / (std::abs(g) + 1e-8); };

    train_step(s);
    CHECK(s.discriminator.weights[0][0] - w0[0] == doctest::Approx(step(gw[0])).epsilon(1e-9));
    CHECK(s.discriminator.weights[0][1] - w0[1] == doctest::Approx(step(gw[1])).epsilon(1e-9));
    CHECK(s.discriminator.biases[0][0] - b0 == doctest::Approx(step(gb)).epsilon(1e-9));
}

TEST_CASE("logged generator objective is L_G_adv + lambda * L_pair") {
    TrainConfig c = small_config();
    c.loss.lambda_pair = 0.37;
    TrainState s = make_train_state(c);
    for (int i = 0; i < 5; ++i) {
        train_step(s);
        CHECK(std::abs(s.last.g_total - (s.last.g_adv + 0.37 * s.last.pair)) <= 1e-9);
    }
}

TEST_CASE("pairing loss alone decreases monotonically on a fixed batch") {
    Rng rng(10);
    const MlpParams g0 = init_params(MlpSpec{2, {32, 32}, 2, 0.2}, rng);
    const PairingNet p0 = init_pairing_net(2, 2, {32, 32}, 16, 0.2, rng);
    MlpParams g = g0;
    PairingNet p = p0;
    const Matrix z = sample_prior(PriorSpec::standard_normal(2), 32, rng);

    std::vector<Matrix*> params = g.tensors();
    for (Matrix* t : p.z_encoder.tensors()) params.push_back(t);
    for (Matrix* t : p.x_encoder.tensors()) params.push_back(t);
    AdamConfig cfg;
    AdamState st = make_adam_state(cfg, std::vector<const Matrix*>(params.begin(), params.end()));

    double prev = INFINITY;
    double first = 0;
    for (int it = 0; it < 500; ++it) {
        ad::Tape tape;
        const TracedMlp tg = trace_params(tape, g);
        const TracedPairingNet tp = trace_pairing_net(tape, p);
        const ad::Var zv = tape.constant(z);
        const ad::Var loss = pairing_loss(pairing_similarities(tp, mlp_forward(tg, zv), zv, 0.1));
        const double v = loss.value().item();
        if (it == 0) first = v;
        CHECK_MESSAGE(v <= prev, "iteration " << it);
        prev = v;
        std::vector<ad::Var> wrt = tg.tensors;
        wrt.insert(wrt.end(), tp.z_encoder.tensors.begin(), tp.z_encoder.tensors.end());
        wrt.insert(wrt.end(), tp.x_encoder.tensors.begin(), tp.x_encoder.tensors.end());
        adam_step(params, std::move(tape.grad(loss, wrt)).release(), st);
    }
    CHECK(prev < first);
}

TEST_CASE("train logs step 0 plus every eval_every steps") {
    TrainConfig c = small_config();
    c.eval_every = c.steps;
    const RunResult r = train(c);
    REQUIRE(r.trajectory.size() == 2);
    CHECK(r.trajectory[0].step == 0);
    CHECK(r.trajectory[1].step == c.steps);

    c.eval_every = 5;
    std::vector<std::size_t> seen;
    const RunResult r2 = train(c, [&](const TrajectoryEntry& e) { seen.push_back(e.step); });
    CHECK(seen == std::vector<std::size_t>{0, 5, 10, 15, 20});
    CHECK(r2.final_report == r2.trajectory.back().metrics);
}

TEST_CASE("identical config and seed give identical results; seeds differ") {
    TrainConfig c = small_config();
    c.loss.lambda_pair = 0.05;
    c.loss.gamma_r1 = 1;
    auto csv = [](const RunResult& r) {
        std::string out;
        for (const auto& e : r.trajectory) out += trajectory_csv_row(e) + "\n";
        return out;
    };
    const RunResult a = train(c), b = train(c);
    CHECK(csv(a) == csv(b));
    CHECK(a.generator == b.generator);
    c.seed = 1;
    CHECK(csv(train(c)) != csv(a));
}

TEST_CASE("config validation rejects degenerate budgets") {
    TrainConfig c = small_config();
    c.steps = 0;
    CHECK_THROWS_AS(c.validate(), ContractError);
    c = small_config();
    c.eval_every = 7;
    CHECK_THROWS_AS(c.validate(), ContractError);
    c = small_config();
    c.batch_size = 1;
    CHECK_THROWS_AS(c.validate(), ContractError);
}

TEST_CASE("non-finite losses abort with the offending term") {
    TrainConfig c = small_config();
    c.adam_generator.lr = 1e300;  // first update sends theta to infinity
    try {
        train(c);
        FAIL("expected TrainingError");
    } catch (const TrainingError& e) {
        CHECK(e.step() >= 1);
        CHECK_FALSE(e.term().empty());
        CHECK(e.partial().size() >= 1);
    }
}
