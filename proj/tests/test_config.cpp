#include "doctest.h"

#include "pairgan/config.hpp"
#include "pairgan/experiment.hpp"

using namespace pairgan;

namespace {

std::size_t error_line(const std::string& text) {
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e.line();
    }
    return 0;
}

}  // namespace

TEST_CASE("empty document gives documented defaults") {
    const TrainConfig c = parse_config("");
    CHECK(c == TrainConfig{});
    CHECK(c.steps == 20000);
    CHECK(c.batch_size == 256);
    CHECK(c.loss.temperature == 0.1);
    CHECK(c.embed_dim == 32);
    CHECK(c.hidden_dims == std::vector<std::size_t>{128, 128});
    CHECK(c.target.kind == TargetKind::Ring);
}

TEST_CASE("sections and comments") {
    const TrainConfig c = parse_config(R"(
# top-level
seed = 7
steps = 1000   # trailing comment
eval_every = 250

[target]
kind = grid25
sigma = 0.1

[loss]
lambda_pair = 0.05
adversarial = relativistic
negatives = derangement

[optimizer.pairing]
lr = 1e-3
)");
    CHECK(c.seed == 7);
    CHECK(c.steps == 1000);
    CHECK(c.target.kind == TargetKind::Grid25);
    CHECK(c.target.sigma == 0.1);
    CHECK(c.target.spacing == 2.0);
    CHECK(c.loss.lambda_pair == 0.05);
    CHECK(c.loss.adversarial == AdversarialLoss::Relativistic);
    CHECK(c.loss.negatives == PairingNegatives::Derangement);
    CHECK(c.adam_pairing.lr == 1e-3);
    CHECK(c.adam_generator.lr == 2e-4);
}

TEST_CASE("target kind picks its own defaults and prior regardless of key order") {
    const TrainConfig c = parse_config("[target]\nsigma = 0.3\nkind = vertical_mixture\n");
    CHECK(c.target.kind == TargetKind::VerticalMixture);
    CHECK(c.target.sigma == 0.3);
    CHECK(c.prior.kind == PriorKind::OffsetGaussian);
    CHECK(c.prior.mean_x == -4.0);
    const TrainConfig d = parse_config("[target]\nkind = vertical_mixture\n[prior]\nkind = standard_normal\n");
    CHECK(d.prior.kind == PriorKind::StandardNormal);
}

TEST_CASE("errors name the key and the line") {
    CHECK(error_line("steps = 10\nstesp = 5\n") == 2);
    CHECK(error_line("[loss]\n\nlambda_pair = abc\n") == 3);
    CHECK(error_line("[target]\nkind = torus\n") == 2);
    CHECK(error_line("seed = 1\nseed = 2\n") == 2);
    CHECK(error_line("just words\n") == 1);
    CHECK(error_line("[loss\n") == 1);
    CHECK(error_line("version = 2\n") == 1);
    try {
        parse_config("[optimizer.critic]\nlr = 1\n");
        FAIL("expected error");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("optimizer.critic.lr") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_config("steps = 10\neval_every = 3\n"), ConfigError);
}

TEST_CASE("serialize / parse round-trip") {
    TrainConfig c;
    c.seed = 123456789012345ULL;
    c.target = TargetSpec::vertical_mixture();
    c.target.components = 3;
    c.prior = PriorSpec::offset_gaussian(-3.5, 0.25, 0.7);
    c.loss.lambda_pair = 0.1 + 0.2;  // not exactly representable in short decimal
    c.loss.gamma_r1 = 1e-7;
    c.loss.negatives = PairingNegatives::Derangement;
    c.hidden_dims = {64, 32, 16};
    c.adam_discriminator.beta2 = 0.99;
    c.steps = 300;
    c.eval_every = 100;
    const std::string text = serialize_config(c);
    CHECK(parse_config(text) == c);
    CHECK(serialize_config(parse_config(text)) == text);
}

TEST_CASE("numeric keys") {
    CHECK(is_numeric_key("loss.lambda_pair"));
    CHECK(is_numeric_key("optimizer.generator.lr"));
    CHECK_FALSE(is_numeric_key("target.kind"));
    CHECK_FALSE(is_numeric_key("network.hidden_dims"));
    CHECK_FALSE(is_numeric_key("nope"));
}

TEST_CASE("suite documents merge variant overrides over the base") {
    const ExperimentSuite s = parse_suite(R"(
steps = 100
eval_every = 50
[suite]
name = demo
seeds = 4,5
[loss]
gamma_r1 = 2
[variant plain]
loss.gamma_r1 = 0
[variant paired]
loss.lambda_pair = 0.05
)");
    CHECK(s.name == "demo");
    CHECK(s.seeds == std::vector<std::uint64_t>{4, 5});
    REQUIRE(s.variants.size() == 2);
    CHECK(s.variants[0].label == "plain");
    CHECK(s.variants[0].config.loss.gamma_r1 == 0);
    CHECK(s.variants[1].config.loss.gamma_r1 == 2);
    CHECK(s.variants[1].config.loss.lambda_pair == 0.05);
    CHECK(s.variants[1].config.steps == 100);

    const ExperimentSuite again = parse_suite(serialize_suite(s));
    CHECK(again.name == s.name);
    CHECK(again.seeds == s.seeds);
    REQUIRE(again.variants.size() == 2);
    CHECK(again.variants[1].config == s.variants[1].config);
}

TEST_CASE("suite document errors") {
    CHECK_THROWS_AS(parse_suite("[suite]\nname = x\n"), ConfigError);  // no variants
    CHECK_THROWS_AS(parse_suite("[suite]\nname = x\n[variant a]\n[variant a]\n"), ConfigError);
    CHECK_THROWS_AS(parse_suite("[suite]\nname = x\n[variant a]\n[loss]\ngamma_r1 = 1\n"),
                    ConfigError);
    CHECK_THROWS_AS(parse_suite("[suite]\nname = x\nseeds = a\n[variant a]\n"), ConfigError);
    CHECK_THROWS_AS(parse_suite("[suite]\nname = x\n[variant a]\nloss.bogus = 1\n"), ConfigError);
}

TEST_CASE("every preset parses") {
    const auto names = preset_names();
    CHECK(names == std::vector<std::string>{"table1", "table2", "grid25", "relativistic",
                                            "lambda_sweep"});
    for (const auto& n : names) {
        const std::string text = preset_text(n);
        CAPTURE(n);
        if (classify_document(text) == DocumentKind::Sweep) {
            const SweepSpec s = parse_sweep(text);
            CHECK(s.key == "loss.lambda_pair");
            CHECK(s.values == std::vector<std::string>{"0.01", "0.05", "0.1"});
        } else {
            const ExperimentSuite s = parse_suite(text);
            CHECK(s.seeds.size() == 3);
            CHECK(s.variants.size() >= 2);
        }
    }
    CHECK(parse_suite(preset_text("table1")).variants[3].label == "GAN+Pairing+R1");
    CHECK(parse_suite(preset_text("grid25")).variants[2].config.loss.lambda_ms > 0);
    CHECK_THROWS_AS(preset_text("table9"), ConfigError);
}

TEST_CASE("document classification") {
    CHECK(classify_document("steps = 10\n") == DocumentKind::Run);
    CHECK(classify_document("[suite]\nname = a\n[variant x]\n") == DocumentKind::Suite);
    CHECK(classify_document("[sweep]\nkey = seed\nvalues = 1\n") == DocumentKind::Sweep);
    CHECK_THROWS_AS(classify_document("[variant x]\n"), ConfigError);
}

TEST_CASE("sweep documents") {
    const SweepSpec s = parse_sweep("[sweep]\nkey = loss.gamma_r1\nvalues = 0, 1,10\nseeds = 3\n");
    CHECK(s.values == std::vector<std::string>{"0", "1", "10"});
    CHECK(s.seeds == std::vector<std::uint64_t>{3});
    CHECK(sweep_label(s, 2) == "loss.gamma_r1=10");
    CHECK_THROWS_AS(parse_sweep("[sweep]\nkey = target.kind\nvalues = ring\n"), ConfigError);
    CHECK_THROWS_AS(parse_sweep("[sweep]\nkey = loss.lambda_pair\nvalues = -1\n"), ConfigError);
    CHECK_THROWS_AS(parse_sweep("[sweep]\nvalues = 1\n"), ConfigError);
}
