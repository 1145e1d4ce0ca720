#include "doctest.h"

#include "pairgan/autodiff.hpp"
#include "pairgan/losses.hpp"
#include "pairgan/nets.hpp"
#include "pairgan/rng.hpp"

#include "oracles.hpp"

#include <cmath>
#include <functional>

using namespace pairgan;
using namespace pairgan::oracle;
namespace ad = pairgan::ad;

TEST_CASE("reverse-mode gradients match central differences on random graphs") {
    Rng rng(2024);
    double worst = 0;
    for (int g = 0; g < 100; ++g) {
        std::vector<int> plan(64);
        for (auto& v : plan) v = static_cast<int>(rng.below(1000));
        std::vector<Matrix> leaves{random_matrix(3, 4, rng), random_matrix(3, 4, rng),
                                   random_matrix(3, 4, rng), random_matrix(4, 4, rng, 0.5)};
        const Builder build = [&](ad::Tape&, const std::vector<ad::Var>& v) {
            return random_graph(plan, v);
        };
        const double err = relative_error(reverse_gradient(build, leaves),
                                          numeric_gradient(build, leaves));
        worst = std::max(worst, err);
        CHECK_MESSAGE(err <= 1e-4, "graph " << g);
    }
    MESSAGE("worst relative error " << worst);
}

TEST_CASE("second-order: gradient of a recorded gradient") {
    // f(x) = sum(x^3) / 3 -> grad = x^2 -> d/dx sum(grad * c) = 2 x c
    ad::Tape tape;
    const Matrix xv{{0.5, -1.5}, {2.0, 0.25}};
    const ad::Var x = tape.variable(xv);
    const ad::Var f = ad::scale(ad::sum(ad::square(x) * x), 1.0 / 3.0);
    const ad::Var g = tape.gradient(f, std::vector{x})[0];
    const Matrix cv{{1.0, 2.0}, {-1.0, 3.0}};
    const ad::Var h = ad::sum(g * tape.constant(cv));
    const Matrix hx = tape.grad(h, std::vector{x})[x];
    for (std::size_t i = 0; i < 4; ++i) CHECK(hx[i] == doctest::Approx(2 * xv[i] * cv[i]).epsilon(1e-12));
}

TEST_CASE("R1 parameter gradients match finite differences of the penalty") {
    Rng rng(77);
    for (int c = 0; c < 20; ++c) {
        const std::size_t h = 3 + rng.below(4);
        const std::size_t depth = 1 + rng.below(2);
        MlpSpec spec{2, std::vector<std::size_t>(depth, h), 1, 0.2};
        const MlpParams base = init_params(spec, rng);
        const Matrix real = random_matrix(5 + rng.below(4), 2, rng);
        const double gamma = 0.5 + 2.0 * rng.uniform();

        std::vector<Matrix> leaves;
        for (const Matrix* t : base.tensors()) leaves.push_back(*t);
        const Builder build = [&](ad::Tape& tape, const std::vector<ad::Var>& vars) {
            TracedMlp net{spec, vars};
            const ad::Var x = tape.variable(real);
            return r1_penalty([&](const ad::Var& in) { return mlp_forward(net, in); }, x, gamma);
        };
        const double err = relative_error(reverse_gradient(build, leaves),
                                          numeric_gradient(build, leaves));
        CHECK_MESSAGE(err <= 1e-3, "case " << c << " err " << err);
    }
}

TEST_CASE("R1 on a linear discriminator is gamma/2 |w|^2 with gradient gamma w") {
    for (double gamma : {2.0, 0.7, 10.0}) {
        ad::Tape tape;
        const ad::Var w = tape.variable(Matrix{{0.3}, {-1.7}});
        const ad::Var b = tape.variable(Matrix{{0.4}});
        const ad::Var x = tape.variable(Matrix{{1, 2}, {-3, 0.5}, {0.1, 0.1}});
        const ad::Var r1 =
            r1_penalty([&](const ad::Var& in) { return ad::matmul(in, w) + b; }, x, gamma);
        const double norm2 = 0.3 * 0.3 + 1.7 * 1.7;
        CHECK(std::abs(r1.value().item() - gamma / 2 * norm2) <= 1e-9);
        const ad::GradMap g = tape.grad(r1, std::vector{w, b});
        CHECK(std::abs(g[w](0, 0) - gamma * 0.3) <= 1e-9);
        CHECK(std::abs(g[w](1, 0) - gamma * -1.7) <= 1e-9);
        CHECK(g[b](0, 0) == 0.0);
    }
}

TEST_CASE("gradients with respect to constants and unreachable leaves are zero") {
    ad::Tape tape;
    const ad::Var a = tape.variable(Matrix{{1, 2}});
    const ad::Var unused = tape.variable(Matrix{{5}});
    const ad::Var c = tape.constant(Matrix{{3, 4}});
    const ad::Var loss = ad::sum(a * c);
    const ad::GradMap g = tape.grad(loss, std::vector{a, unused, c});
    CHECK(g[a] == Matrix{{3, 4}});
    CHECK(g[unused] == Matrix{{0}});
    CHECK(g[c] == Matrix{{0, 0}});
}

TEST_CASE("contract violations") {
    ad::Tape tape, other;
    const ad::Var a = tape.variable(Matrix(2, 3, 1.0));
    const ad::Var b = tape.variable(Matrix(3, 2, 1.0));
    CHECK_THROWS_AS(a + b, ContractError);
    CHECK_THROWS_AS(ad::matmul(a, a), ContractError);
    CHECK_THROWS_AS(tape.grad(a, std::vector{a}), ContractError);  // not scalar
    const ad::Var foreign = other.variable(Matrix(2, 3, 1.0));
    CHECK_THROWS_AS(a + foreign, ContractError);
}

TEST_CASE("broadcasting reduces gradients back to operand shape") {
    ad::Tape tape;
    const ad::Var m = tape.variable(Matrix{{1, 2, 3}, {4, 5, 6}});
    const ad::Var row = tape.variable(Matrix{{1, 1, 1}});
    const ad::Var col = tape.variable(Matrix{{2}, {3}});
    const ad::Var s = tape.variable(Matrix{{0.5}});
    const ad::Var loss = ad::sum((m + row) * col * s);
    const ad::GradMap g = tape.grad(loss, std::vector{row, col, s});
    CHECK(g[row] == Matrix{{(2 + 3) * 0.5, (2 + 3) * 0.5, (2 + 3) * 0.5}});
    CHECK(g[col](0, 0) == doctest::Approx((2 + 3 + 4) * 0.5));
    CHECK(g[col](1, 0) == doctest::Approx((5 + 6 + 7) * 0.5));
    CHECK(g[s](0, 0) == doctest::Approx(2 * 9 + 3 * 18));
}

TEST_CASE("softplus and logsumexp stay finite for large inputs") {
    ad::Tape tape;
    const ad::Var x = tape.variable(Matrix{{800, -800, 0}});
    const Matrix sp = ad::softplus(x).value();
    CHECK(sp(0, 0) == doctest::Approx(800));
    CHECK(sp(0, 1) >= 0.0);
    CHECK(sp(0, 1) < 1e-300);
    CHECK(ad::logsumexp_rows(x).value().item() == doctest::Approx(800));
    const ad::GradMap g = tape.grad(ad::sum(ad::softplus(x)), std::vector{x});
    CHECK(g[x].all_finite());
}
