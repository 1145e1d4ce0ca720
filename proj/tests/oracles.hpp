#pragma once

// Independent reference computations shared by the unit tests and the
// acceptance runner: finite differences, brute-force PRDC, random graphs.

#include "pairgan/autodiff.hpp"
#include "pairgan/metrics.hpp"
#include "pairgan/rng.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace pairgan::oracle {

namespace ad = pairgan::ad;

inline Matrix random_matrix(std::size_t r, std::size_t c, Rng& rng, double sd = 1.0) {
    Matrix m(r, c);
    for (auto& v : m.values()) v = sd * rng.normal();
    return m;
}

// ||a - b|| / max(||a||, ||b||), over all tensors jointly.
inline double relative_error(const std::vector<Matrix>& a, const std::vector<Matrix>& b) {
    double diff = 0, na = 0, nb = 0;
    for (std::size_t t = 0; t < a.size(); ++t) {
        for (std::size_t i = 0; i < a[t].size(); ++i) {
            diff += (a[t][i] - b[t][i]) * (a[t][i] - b[t][i]);
            na += a[t][i] * a[t][i];
            nb += b[t][i] * b[t][i];
        }
    }
    const double denom = std::sqrt(std::max(na, nb));
    return denom < 1e-12 ? std::sqrt(diff) : std::sqrt(diff) / denom;
}

using Builder = std::function<ad::Var(ad::Tape&, const std::vector<ad::Var>&)>;

// Central differences of the scalar built from `leaves`.
inline std::vector<Matrix> numeric_gradient(const Builder& build, std::vector<Matrix> leaves,
                                     double h = 1e-6) {
    auto eval = [&](const std::vector<Matrix>& values) {
        ad::Tape tape;
        std::vector<ad::Var> vars;
        for (const auto& v : values) vars.push_back(tape.variable(v));
        return build(tape, vars).value().item();
    };
    std::vector<Matrix> out;
    for (std::size_t t = 0; t < leaves.size(); ++t) {
        Matrix g(leaves[t].rows(), leaves[t].cols());
        for (std::size_t i = 0; i < leaves[t].size(); ++i) {
            const double keep = leaves[t][i];
            leaves[t][i] = keep + h;
            const double up = eval(leaves);
            leaves[t][i] = keep - h;
            const double down = eval(leaves);
            leaves[t][i] = keep;
            g[i] = (up - down) / (2 * h);
        }
        out.push_back(std::move(g));
    }
    return out;
}

inline std::vector<Matrix> reverse_gradient(const Builder& build, const std::vector<Matrix>& leaves) {
    ad::Tape tape;
    std::vector<ad::Var> vars;
    for (const auto& v : leaves) vars.push_back(tape.variable(v));
    const ad::Var loss = build(tape, vars);
    return tape.grad(loss, vars).release();
}

// A random expression over three 3x4 leaves and one 4x4 leaf. The sequence
// of operations is fixed by `plan`, so the builder is a pure function of the
// leaf values.
inline ad::Var random_graph(const std::vector<int>& plan, const std::vector<ad::Var>& leaves) {
    std::vector<ad::Var> pool{leaves[0], leaves[1], leaves[2]};
    const ad::Var w = leaves[3];
    std::size_t p = 0;
    auto pick = [&]() -> const ad::Var& { return pool[static_cast<std::size_t>(plan[p++]) % pool.size()]; };
    const std::size_t steps = 4 + static_cast<std::size_t>(plan[p++]) % 5;
    for (std::size_t s = 0; s < steps; ++s) {
        const int op = plan[p++] % 17;
        const ad::Var a = pick();
        ad::Var r;
        switch (op) {
            case 0: r = ad::leaky_relu(a, 0.2); break;
            case 1: r = ad::softplus(a); break;
            case 2: r = ad::sigmoid(a); break;
            case 3: r = ad::exp(ad::scale(a, 0.3)); break;
            case 4: r = ad::log(ad::add_scalar(ad::softplus(a), 0.1)); break;
            case 5: r = ad::sqrt(ad::add_scalar(ad::square(a), 0.5)); break;
            case 6: r = ad::abs(a); break;
            case 7: r = a + pick(); break;
            case 8: r = a - pick(); break;
            case 9: r = a * pick(); break;
            case 10: r = a / ad::add_scalar(ad::softplus(pick()), 0.5); break;
            case 11: r = ad::scale(ad::matmul(a, w), 0.5); break;
            case 12: r = a + ad::sum_rows(pick()); break;
            case 13: r = a * ad::sum_cols(ad::sigmoid(pick())); break;
            case 14: r = a - ad::logsumexp_rows(pick()); break;
            case 15: r = ad::row_l2_normalize(a); break;
            default: r = ad::matmul(a, ad::scale(pick(), 0.3), true, false);  // 4x4
                r = ad::matmul(a, r);
                break;
        }
        pool.push_back(r);
    }
    // shifted so a unit-norm last node (row_l2_normalize) still gives a
    // non-constant output
    const ad::Var last = ad::add_scalar(pool.back(), 0.3);
    return plan[p] % 2 ? ad::mean(ad::square(last)) : ad::sum(ad::sigmoid(last));
}

// O(N*M) reference: full sorts, no windowing.
inline MetricReport brute_force_prdc(const Matrix& real, const Matrix& fake, std::size_t k) {
    auto dist = [](const Matrix& a, std::size_t i, const Matrix& b, std::size_t j) {
        double s = 0;
        for (std::size_t d = 0; d < a.cols(); ++d) s += (a(i, d) - b(j, d)) * (a(i, d) - b(j, d));
        return std::sqrt(s);
    };
    auto radii = [&](const Matrix& p) {
        std::vector<double> r(p.rows());
        for (std::size_t i = 0; i < p.rows(); ++i) {
            std::vector<double> d;
            for (std::size_t j = 0; j < p.rows(); ++j) {
                if (j != i) d.push_back(dist(p, i, p, j));
            }
            std::sort(d.begin(), d.end());
            r[i] = d[k - 1];
        }
        return r;
    };
    const auto rr = radii(real), fr = radii(fake);
    const std::size_t n = real.rows(), m = fake.rows();
    std::size_t prec = 0, rec = 0, cov = 0, dens = 0;
    for (std::size_t j = 0; j < m; ++j) {
        std::size_t hits = 0;
        for (std::size_t i = 0; i < n; ++i) hits += dist(fake, j, real, i) <= rr[i];
        prec += hits > 0;
        dens += hits;
    }
    for (std::size_t i = 0; i < n; ++i) {
        bool in_fake = false, covered = false;
        for (std::size_t j = 0; j < m; ++j) {
            in_fake = in_fake || dist(real, i, fake, j) <= fr[j];
            covered = covered || dist(real, i, fake, j) <= rr[i];
        }
        rec += in_fake;
        cov += covered;
    }
    MetricReport r;
    r.k = k;
    r.n_real = n;
    r.n_fake = m;
    r.precision = static_cast<double>(prec) / static_cast<double>(m);
    r.recall = static_cast<double>(rec) / static_cast<double>(n);
    r.density = static_cast<double>(dens) / static_cast<double>(k * m);
    r.coverage = static_cast<double>(cov) / static_cast<double>(n);
    return r;
}

}  // namespace pairgan::oracle
