#include "pairgan/config.hpp"

#include "pairgan/text.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <set>
#include <sstream>

namespace pairgan {

namespace {

std::string located(const std::string& message, std::size_t line) {
    return line ? "line " + std::to_string(line) + ": " + message : message;
}

std::size_t parse_count(const std::string& key, const std::string& value, std::size_t line) {
    const auto v = trim(value);
    std::uint64_t out = 0;
    auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (v.empty() || res.ec != std::errc{} || res.ptr != v.data() + v.size()) {
        throw ConfigError("key '" + key + "': expected a non-negative integer, got '" + value + "'",
                          line);
    }
    return static_cast<std::size_t>(out);
}

double parse_real(const std::string& key, const std::string& value, std::size_t line) {
    try {
        return parse_double(value);
    } catch (const ContractError&) {
        throw ConfigError("key '" + key + "': expected a number, got '" + value + "'", line);
    }
}

std::vector<std::size_t> parse_count_list(const std::string& key, const std::string& value,
                                          std::size_t line) {
    std::vector<std::size_t> out;
    for (const auto& part : split(value, ',')) out.push_back(parse_count(key, part, line));
    return out;
}

std::string join_counts(const std::vector<std::size_t>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(v[i]);
    }
    return out;
}

template <typename F>
auto wrap(const std::string& key, std::size_t line, F f) {
    try {
        return f();
    } catch (const ConfigError&) {
        throw;
    } catch (const ContractError& e) {
        throw ConfigError("key '" + key + "': " + e.what(), line);
    }
}

AdamConfig* optimizer_slot(TrainConfig& c, const std::string& name) {
    if (name == "generator") return &c.adam_generator;
    if (name == "discriminator") return &c.adam_discriminator;
    if (name == "pairing") return &c.adam_pairing;
    return nullptr;
}

PriorSpec default_prior_for(TargetKind kind) {
    return kind == TargetKind::VerticalMixture ? PriorSpec::offset_gaussian()
                                               : PriorSpec::standard_normal(2);
}

TargetSpec default_target(TargetKind kind) {
    switch (kind) {
        case TargetKind::VerticalMixture: return TargetSpec::vertical_mixture();
        case TargetKind::Ring: return TargetSpec::ring();
        case TargetKind::Grid25: return TargetSpec::grid25();
    }
    return {};
}

const std::set<std::string>& numeric_keys() {
    static const std::set<std::string> keys = {
        "seed", "steps", "batch_size", "eval_every", "n_eval", "k",
        "target.components", "target.x_offset", "target.y_spacing", "target.radius",
        "target.radial_sigma", "target.spacing", "target.sigma",
        "prior.dim", "prior.mean_x", "prior.mean_y", "prior.sigma",
        "loss.lambda_pair", "loss.gamma_r1", "loss.lambda_ms", "loss.temperature", "loss.eps_ms",
        "network.leaky_slope", "network.embed_dim",
        "optimizer.generator.lr", "optimizer.generator.beta1", "optimizer.generator.beta2",
        "optimizer.generator.eps", "optimizer.discriminator.lr",
        "optimizer.discriminator.beta1", "optimizer.discriminator.beta2",
        "optimizer.discriminator.eps", "optimizer.pairing.lr", "optimizer.pairing.beta1",
        "optimizer.pairing.beta2", "optimizer.pairing.eps",
    };
    return keys;
}

}  // namespace

ConfigError::ConfigError(const std::string& message, std::size_t line)
    : ContractError(located(message, line)), line_(line) {}

ConfigDocument tokenize_config(std::string_view text) {
    ConfigDocument doc;
    std::vector<ConfigEntry>* current = &doc.base;
    std::string prefix;
    std::set<std::string> seen;
    std::set<std::string> labels;
    std::size_t line_no = 0;
    std::istringstream in{std::string(text)};
    std::string raw;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line = raw;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError("unterminated section header", line_no);
            const std::string_view name = trim(line.substr(1, line.size() - 2));
            if (name.starts_with("variant ")) {
                const std::string label(trim(name.substr(8)));
                if (label.empty()) throw ConfigError("variant section without a label", line_no);
                if (!labels.insert(label).second) {
                    throw ConfigError("duplicate variant label '" + label + "'", line_no);
                }
                doc.variants.emplace_back(label, std::vector<ConfigEntry>{});
                current = &doc.variants.back().second;
                prefix.clear();
            } else {
                if (name.empty()) throw ConfigError("empty section name", line_no);
                if (!doc.variants.empty()) {
                    throw ConfigError("section [" + std::string(name) +
                                          "] must precede the variant sections",
                                      line_no);
                }
                current = &doc.base;
                prefix = std::string(name) + ".";
            }
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("expected 'key = value', got '" + std::string(line) + "'", line_no);
        }
        const std::string key = prefix + std::string(trim(line.substr(0, eq)));
        const std::string value(trim(line.substr(eq + 1)));
        if (key.empty() || key.back() == '.') throw ConfigError("empty key", line_no);
        const std::string scope = current == &doc.base ? "" : doc.variants.back().first + "/";
        if (!seen.insert(scope + key).second) {
            throw ConfigError("duplicate key '" + key + "'", line_no);
        }
        current->push_back({key, value, line_no});
    }
    return doc;
}

bool is_numeric_key(const std::string& key) { return numeric_keys().count(key) > 0; }

void set_config_value(TrainConfig& c, const std::string& key, const std::string& value,
                      std::size_t line) {
    auto count = [&] { return parse_count(key, value, line); };
    auto real = [&] { return parse_real(key, value, line); };

    if (key == "version") {
        if (trim(value) != "1") throw ConfigError("unsupported config version '" + value + "'", line);
    } else if (key == "seed") {
        c.seed = count();
    } else if (key == "steps") {
        c.steps = count();
    } else if (key == "batch_size") {
        c.batch_size = count();
    } else if (key == "eval_every") {
        c.eval_every = count();
    } else if (key == "n_eval") {
        c.n_eval = count();
    } else if (key == "k") {
        c.k = count();
    } else if (key == "target.kind") {
        c.target = wrap(key, line, [&] { return default_target(parse_target_kind(value)); });
    } else if (key == "target.components") {
        c.target.components = count();
    } else if (key == "target.x_offset") {
        c.target.x_offset = real();
    } else if (key == "target.y_spacing") {
        c.target.y_spacing = real();
    } else if (key == "target.radius") {
        c.target.radius = real();
    } else if (key == "target.radial_sigma") {
        c.target.radial_sigma = real();
    } else if (key == "target.spacing") {
        c.target.spacing = real();
    } else if (key == "target.sigma") {
        c.target.sigma = real();
    } else if (key == "prior.kind") {
        c.prior = wrap(key, line, [&] {
            return parse_prior_kind(value) == PriorKind::OffsetGaussian
                       ? PriorSpec::offset_gaussian()
                       : PriorSpec::standard_normal(2);
        });
    } else if (key == "prior.dim") {
        c.prior.dim = count();
    } else if (key == "prior.mean_x") {
        c.prior.mean_x = real();
    } else if (key == "prior.mean_y") {
        c.prior.mean_y = real();
    } else if (key == "prior.sigma") {
        c.prior.sigma = real();
    } else if (key == "loss.adversarial") {
        c.loss.adversarial = wrap(key, line, [&] { return parse_adversarial_loss(value); });
    } else if (key == "loss.lambda_pair") {
        c.loss.lambda_pair = real();
    } else if (key == "loss.gamma_r1") {
        c.loss.gamma_r1 = real();
    } else if (key == "loss.lambda_ms") {
        c.loss.lambda_ms = real();
    } else if (key == "loss.temperature") {
        c.loss.temperature = real();
    } else if (key == "loss.eps_ms") {
        c.loss.eps_ms = real();
    } else if (key == "loss.negatives") {
        c.loss.negatives = wrap(key, line, [&] { return parse_pairing_negatives(value); });
    } else if (key == "network.hidden_dims") {
        c.hidden_dims = parse_count_list(key, value, line);
    } else if (key == "network.leaky_slope") {
        c.leaky_slope = real();
    } else if (key == "network.embed_dim") {
        c.embed_dim = count();
    } else if (key.starts_with("optimizer.")) {
        const auto parts = split(key, '.');
        AdamConfig* slot = parts.size() == 3 ? optimizer_slot(c, parts[1]) : nullptr;
        if (!slot) throw ConfigError("unknown key '" + key + "'", line);
        if (parts[2] == "lr") slot->lr = real();
        else if (parts[2] == "beta1") slot->beta1 = real();
        else if (parts[2] == "beta2") slot->beta2 = real();
        else if (parts[2] == "eps") slot->eps = real();
        else throw ConfigError("unknown key '" + key + "'", line);
    } else {
        throw ConfigError("unknown key '" + key + "'", line);
    }
}

void apply_entries(TrainConfig& config, const std::vector<ConfigEntry>& entries) {
    auto find = [&](const char* key) {
        return std::find_if(entries.begin(), entries.end(),
                            [&](const ConfigEntry& e) { return e.key == key; });
    };
    const auto target_kind = find("target.kind");
    const auto prior_kind = find("prior.kind");
    if (target_kind != entries.end()) {
        set_config_value(config, target_kind->key, target_kind->value, target_kind->line);
        if (prior_kind == entries.end()) config.prior = default_prior_for(config.target.kind);
    }
    if (prior_kind != entries.end()) {
        set_config_value(config, prior_kind->key, prior_kind->value, prior_kind->line);
    }
    for (const auto& e : entries) {
        if (e.key == "target.kind" || e.key == "prior.kind") continue;
        set_config_value(config, e.key, e.value, e.line);
    }
}

TrainConfig default_config_for(TargetKind kind) {
    TrainConfig c;
    c.target = default_target(kind);
    c.prior = default_prior_for(kind);
    return c;
}

TrainConfig parse_config(std::string_view text) {
    const ConfigDocument doc = tokenize_config(text);
    if (!doc.variants.empty()) {
        throw ConfigError("run config must not contain variant sections (use 'suite')",
                          doc.variants.front().second.empty()
                              ? 0
                              : doc.variants.front().second.front().line);
    }
    TrainConfig c;
    apply_entries(c, doc.base);
    try {
        c.validate();
    } catch (const ConfigError&) {
        throw;
    } catch (const ContractError& e) {
        throw ConfigError(e.what());
    }
    return c;
}

std::string serialize_config(const TrainConfig& c) {
    std::ostringstream out;
    auto kv = [&](const char* key, const std::string& value) {
        out << key << " = " << value << '\n';
    };
    auto real = [](double v) { return format_double(v); };
    out << "version = 1\n";
    kv("seed", std::to_string(c.seed));
    kv("steps", std::to_string(c.steps));
    kv("batch_size", std::to_string(c.batch_size));
    kv("eval_every", std::to_string(c.eval_every));
    kv("n_eval", std::to_string(c.n_eval));
    kv("k", std::to_string(c.k));
    out << "\n[target]\n";
    kv("kind", to_string(c.target.kind));
    kv("components", std::to_string(c.target.components));
    kv("x_offset", real(c.target.x_offset));
    kv("y_spacing", real(c.target.y_spacing));
    kv("radius", real(c.target.radius));
    kv("radial_sigma", real(c.target.radial_sigma));
    kv("spacing", real(c.target.spacing));
    kv("sigma", real(c.target.sigma));
    out << "\n[prior]\n";
    kv("kind", to_string(c.prior.kind));
    kv("dim", std::to_string(c.prior.dim));
    kv("mean_x", real(c.prior.mean_x));
    kv("mean_y", real(c.prior.mean_y));
    kv("sigma", real(c.prior.sigma));
    out << "\n[loss]\n";
    kv("adversarial", to_string(c.loss.adversarial));
    kv("lambda_pair", real(c.loss.lambda_pair));
    kv("gamma_r1", real(c.loss.gamma_r1));
    kv("lambda_ms", real(c.loss.lambda_ms));
    kv("temperature", real(c.loss.temperature));
    kv("eps_ms", real(c.loss.eps_ms));
    kv("negatives", to_string(c.loss.negatives));
    out << "\n[network]\n";
    kv("hidden_dims", join_counts(c.hidden_dims));
    kv("leaky_slope", real(c.leaky_slope));
    kv("embed_dim", std::to_string(c.embed_dim));
    const std::pair<const char*, const AdamConfig*> opts[] = {
        {"generator", &c.adam_generator},
        {"discriminator", &c.adam_discriminator},
        {"pairing", &c.adam_pairing},
    };
    for (const auto& [name, a] : opts) {
        out << "\n[optimizer." << name << "]\n";
        kv("lr", real(a->lr));
        kv("beta1", real(a->beta1));
        kv("beta2", real(a->beta2));
        kv("eps", real(a->eps));
    }
    return out.str();
}

void ExperimentSuite::validate() const {
    if (variants.empty()) throw ConfigError("suite '" + name + "' has no variants");
    if (seeds.empty()) throw ConfigError("suite '" + name + "' has no seeds");
    std::set<std::string> labels;
    for (const auto& v : variants) {
        if (!labels.insert(v.label).second) {
            throw ConfigError("duplicate variant label '" + v.label + "'");
        }
        try {
            v.config.validate();
        } catch (const ContractError& e) {
            throw ConfigError("variant '" + v.label + "': " + e.what());
        }
    }
}

ExperimentSuite parse_suite(std::string_view text) {
    const ConfigDocument doc = tokenize_config(text);
    ExperimentSuite suite;
    std::vector<ConfigEntry> base;
    for (const auto& e : doc.base) {
        if (e.key == "suite.name") {
            suite.name = e.value;
        } else if (e.key == "suite.seeds") {
            suite.seeds.clear();
            for (const auto& s : split(e.value, ',')) {
                suite.seeds.push_back(parse_count(e.key, s, e.line));
            }
        } else if (e.key.starts_with("suite.")) {
            throw ConfigError("unknown key '" + e.key + "'", e.line);
        } else {
            base.push_back(e);
        }
    }
    if (suite.name.empty()) throw ConfigError("suite document needs [suite] name");
    if (doc.variants.empty()) throw ConfigError("suite document needs at least one [variant]");
    for (const auto& [label, overrides] : doc.variants) {
        std::vector<ConfigEntry> merged;
        for (const auto& e : base) {
            const bool overridden =
                std::any_of(overrides.begin(), overrides.end(),
                            [&](const ConfigEntry& o) { return o.key == e.key; });
            if (!overridden) merged.push_back(e);
        }
        merged.insert(merged.end(), overrides.begin(), overrides.end());
        TrainConfig c;
        apply_entries(c, merged);
        suite.variants.push_back({label, std::move(c)});
    }
    suite.validate();
    return suite;
}

std::string serialize_suite(const ExperimentSuite& suite) {
    std::ostringstream out;
    out << "[suite]\nname = " << suite.name << "\nseeds = ";
    for (std::size_t i = 0; i < suite.seeds.size(); ++i) {
        out << (i ? "," : "") << suite.seeds[i];
    }
    out << '\n';
    // Each variant carries its complete resolved configuration.
    for (const auto& v : suite.variants) {
        out << "\n[variant " << v.label << "]\n";
        std::istringstream body(serialize_config(v.config));
        std::string line, section;
        while (std::getline(body, line)) {
            if (line.empty()) continue;
            if (line.front() == '[') {
                section = line.substr(1, line.size() - 2) + ".";
                continue;
            }
            if (line.starts_with("version")) continue;
            out << section << line << '\n';
        }
    }
    return out.str();
}

}  // namespace pairgan
