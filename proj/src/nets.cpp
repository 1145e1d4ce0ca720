#include "pairgan/nets.hpp"

#include "pairgan/text.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

namespace pairgan {

void MlpSpec::validate() const {
    if (input_dim == 0 || output_dim == 0) throw ContractError("MlpSpec: dims must be >= 1");
    for (auto h : hidden_dims) {
        if (h == 0) throw ContractError("MlpSpec: hidden dims must be >= 1");
    }
    if (!std::isfinite(leaky_slope)) throw ContractError("MlpSpec: slope must be finite");
}

std::vector<Matrix*> MlpParams::tensors() {
    std::vector<Matrix*> out;
    for (std::size_t l = 0; l < weights.size(); ++l) {
        out.push_back(&weights[l]);
        out.push_back(&biases[l]);
    }
    return out;
}

std::vector<const Matrix*> MlpParams::tensors() const {
    std::vector<const Matrix*> out;
    for (std::size_t l = 0; l < weights.size(); ++l) {
        out.push_back(&weights[l]);
        out.push_back(&biases[l]);
    }
    return out;
}

std::size_t MlpParams::parameter_count() const {
    std::size_t n = 0;
    for (const auto* t : tensors()) n += t->size();
    return n;
}

MlpParams init_params(const MlpSpec& spec, Rng& rng) {
    spec.validate();
    MlpParams p;
    p.spec = spec;
    std::size_t fan_in = spec.input_dim;
    const double gain = 2.0 / (1.0 + spec.leaky_slope * spec.leaky_slope);
    for (std::size_t l = 0; l < spec.layer_count(); ++l) {
        const std::size_t fan_out =
            l < spec.hidden_dims.size() ? spec.hidden_dims[l] : spec.output_dim;
        const double stddev = std::sqrt(gain / static_cast<double>(fan_in));
        Matrix w(fan_in, fan_out);
        for (auto& v : w.values()) v = stddev * rng.normal();
        p.weights.push_back(std::move(w));
        p.biases.emplace_back(1, fan_out);
        fan_in = fan_out;
    }
    return p;
}

Matrix mlp_forward(const MlpParams& params, const Matrix& x) {
    if (x.cols() != params.spec.input_dim) {
        throw ContractError("mlp_forward: input " + shape_string(x) + " but network expects " +
                            std::to_string(params.spec.input_dim) + " columns");
    }
    const double slope = params.spec.leaky_slope;
    Matrix h = x;
    for (std::size_t l = 0; l < params.weights.size(); ++l) {
        h = matmul(h, params.weights[l]);
        const Matrix& b = params.biases[l];
        const bool hidden = l + 1 < params.weights.size();
        for (std::size_t r = 0; r < h.rows(); ++r) {
            auto row = h.row(r);
            for (std::size_t c = 0; c < row.size(); ++c) {
                const double v = row[c] + b(0, c);
                row[c] = hidden && v <= 0.0 ? slope * v : v;
            }
        }
    }
    return h;
}

TracedMlp trace_params(ad::Tape& tape, const MlpParams& params, bool frozen) {
    TracedMlp net;
    net.spec = params.spec;
    for (const Matrix* t : params.tensors()) {
        net.tensors.push_back(frozen ? tape.constant(*t) : tape.variable(*t));
    }
    return net;
}

ad::Var mlp_forward(const TracedMlp& net, const ad::Var& x) {
    if (x.cols() != net.spec.input_dim) {
        throw ContractError("mlp_forward: input " + shape_string(x.value()) +
                            " but network expects " + std::to_string(net.spec.input_dim) +
                            " columns");
    }
    const std::size_t layers = net.tensors.size() / 2;
    ad::Var h = x;
    for (std::size_t l = 0; l < layers; ++l) {
        h = ad::matmul(h, net.tensors[2 * l]) + net.tensors[2 * l + 1];
        if (l + 1 < layers) h = ad::leaky_relu(h, net.spec.leaky_slope);
    }
    return h;
}

PairingNet init_pairing_net(std::size_t latent_dim, std::size_t data_dim,
                            const std::vector<std::size_t>& hidden_dims, std::size_t embed_dim,
                            double leaky_slope, Rng& rng) {
    PairingNet net;
    net.embed_dim = embed_dim;
    net.z_encoder = init_params(MlpSpec{latent_dim, hidden_dims, embed_dim, leaky_slope}, rng);
    net.x_encoder = init_params(MlpSpec{data_dim, hidden_dims, embed_dim, leaky_slope}, rng);
    return net;
}

TracedPairingNet trace_pairing_net(ad::Tape& tape, const PairingNet& net, bool frozen) {
    return {trace_params(tape, net.z_encoder, frozen), trace_params(tape, net.x_encoder, frozen)};
}

ad::Var pairing_similarities(const TracedPairingNet& net, const ad::Var& xs, const ad::Var& zs,
                             double temperature) {
    if (!(temperature > 0.0)) {
        throw ContractError("pairing_similarities: temperature must be > 0, got " +
                            format_double(temperature));
    }
    if (xs.rows() != zs.rows()) {
        throw ContractError("pairing_similarities: batch sizes differ, " +
                            shape_string(xs.value()) + " vs " + shape_string(zs.value()));
    }
    const ad::Var ex = ad::row_l2_normalize(mlp_forward(net.x_encoder, xs));
    const ad::Var ez = ad::row_l2_normalize(mlp_forward(net.z_encoder, zs));
    return ad::scale(ad::matmul(ex, ez, false, true), 1.0 / temperature);
}

AdamState make_adam_state(const AdamConfig& config, std::span<const Matrix* const> params) {
    AdamState s;
    s.config = config;
    for (const Matrix* p : params) {
        s.m.emplace_back(p->rows(), p->cols());
        s.v.emplace_back(p->rows(), p->cols());
    }
    return s;
}

void adam_step(std::span<Matrix* const> params, std::span<const Matrix> grads, AdamState& state) {
    if (params.size() != grads.size() || params.size() != state.m.size()) {
        throw ContractError("adam_step: " + std::to_string(params.size()) + " params, " +
                            std::to_string(grads.size()) + " grads, " +
                            std::to_string(state.m.size()) + " moment slots");
    }
    for (std::size_t i = 0; i < params.size(); ++i) {
        if (!params[i]->same_shape(grads[i]) || !params[i]->same_shape(state.m[i])) {
            throw ContractError("adam_step: tensor " + std::to_string(i) + " param " +
                                shape_string(*params[i]) + " vs grad " +
                                shape_string(grads[i]));
        }
    }
    const AdamConfig& c = state.config;
    state.t += 1;
    const double t = static_cast<double>(state.t);
    const double bc1 = 1.0 - std::pow(c.beta1, t);
    const double bc2 = 1.0 - std::pow(c.beta2, t);
    for (std::size_t i = 0; i < params.size(); ++i) {
        Matrix& p = *params[i];
        Matrix& m = state.m[i];
        Matrix& v = state.v[i];
        const Matrix& g = grads[i];
        for (std::size_t j = 0; j < p.size(); ++j) {
            m[j] = c.beta1 * m[j] + (1.0 - c.beta1) * g[j];
            v[j] = c.beta2 * v[j] + (1.0 - c.beta2) * g[j] * g[j];
            const double m_hat = m[j] / bc1;
            const double v_hat = v[j] / bc2;
            p[j] -= c.lr * m_hat / (std::sqrt(v_hat) + c.eps);
        }
    }
}

void write_checkpoint(std::ostream& out, const MlpParams& params) {
    const MlpSpec& s = params.spec;
    out << "pairgan-mlp v1\n";
    out << "spec " << s.input_dim << ' ' << s.output_dim << ' ' << format_double(s.leaky_slope)
        << ' ' << s.hidden_dims.size();
    for (auto h : s.hidden_dims) out << ' ' << h;
    out << '\n';
    for (std::size_t l = 0; l < params.weights.size(); ++l) {
        for (int which = 0; which < 2; ++which) {
            const Matrix& t = which == 0 ? params.weights[l] : params.biases[l];
            out << (which == 0 ? "W" : "b") << l << ' ' << t.rows() << ' ' << t.cols() << '\n';
            for (std::size_t r = 0; r < t.rows(); ++r) {
                for (std::size_t c = 0; c < t.cols(); ++c) {
                    if (c) out << ' ';
                    out << format_double(t(r, c));
                }
                out << '\n';
            }
        }
    }
}

MlpParams read_checkpoint(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || trim(line) != "pairgan-mlp v1") {
        throw ContractError("checkpoint: missing 'pairgan-mlp v1' header");
    }
    MlpParams p;
    std::string tag, slope;
    std::size_t n_hidden = 0;
    if (!(in >> tag) || tag != "spec") throw ContractError("checkpoint: missing spec line");
    in >> p.spec.input_dim >> p.spec.output_dim >> slope >> n_hidden;
    p.spec.leaky_slope = parse_double(slope);
    p.spec.hidden_dims.resize(n_hidden);
    for (auto& h : p.spec.hidden_dims) in >> h;
    if (!in) throw ContractError("checkpoint: malformed spec line");
    p.spec.validate();

    std::size_t fan_in = p.spec.input_dim;
    for (std::size_t l = 0; l < p.spec.layer_count(); ++l) {
        const std::size_t fan_out =
            l < p.spec.hidden_dims.size() ? p.spec.hidden_dims[l] : p.spec.output_dim;
        for (int which = 0; which < 2; ++which) {
            std::string name;
            std::size_t rows = 0, cols = 0;
            in >> name >> rows >> cols;
            const std::string expect = (which == 0 ? "W" : "b") + std::to_string(l);
            const std::size_t want_rows = which == 0 ? fan_in : 1;
            if (!in || name != expect || rows != want_rows || cols != fan_out) {
                throw ContractError("checkpoint: expected tensor " + expect + " of shape " +
                                    std::to_string(want_rows) + "x" + std::to_string(fan_out));
            }
            Matrix t(rows, cols);
            for (auto& v : t.values()) {
                std::string tok;
                if (!(in >> tok)) throw ContractError("checkpoint: truncated tensor " + expect);
                v = parse_double(tok);
            }
            (which == 0 ? p.weights : p.biases).push_back(std::move(t));
        }
        fan_in = fan_out;
    }
    return p;
}

}  // namespace pairgan
