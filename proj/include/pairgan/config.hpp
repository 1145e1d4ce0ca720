#pragma once

// Experiment configuration documents (grammar v1, see FORMATS.md).
//
//   # comment
//   key = value              top-level run settings
//   [section]                target, prior, loss, network,
//   key = value              optimizer.generator / .discriminator / .pairing
//
// A suite document adds a [suite] section (name, seeds) and one
// [variant LABEL] section per variant holding dotted overrides such as
// "loss.gamma_r1 = 1".

#include "pairgan/trainer.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace pairgan {

/// Configuration problem tied to a source line (0 when not from a file).
class ConfigError : public ContractError {
public:
    ConfigError(const std::string& message, std::size_t line = 0);
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// One "key = value" assignment with a fully dotted key.
struct ConfigEntry {
    std::string key;
    std::string value;
    std::size_t line = 0;
};

/// Tokenizes a document into dotted assignments, grouped per section. Variant
/// sections come back separately, keyed by label, in document order.
struct ConfigDocument {
    std::vector<ConfigEntry> base;
    std::vector<std::pair<std::string, std::vector<ConfigEntry>>> variants;
};

ConfigDocument tokenize_config(std::string_view text);

/// Applies dotted assignments on top of `config`. Target and prior kinds are
/// applied first so that kind-specific defaults can be overridden.
void apply_entries(TrainConfig& config, const std::vector<ConfigEntry>& entries);

/// Sets one dotted key; throws ConfigError for unknown keys or bad values.
void set_config_value(TrainConfig& config, const std::string& key, const std::string& value,
                      std::size_t line = 0);

/// True when `key` names a numeric field (usable for sweeps).
bool is_numeric_key(const std::string& key);

TrainConfig default_config_for(TargetKind kind);
TrainConfig parse_config(std::string_view text);
/// Canonical text; parse_config(serialize_config(c)) == c.
std::string serialize_config(const TrainConfig& config);

struct SuiteVariant {
    std::string label;
    TrainConfig config;  ///< seed is overwritten per run
};

struct ExperimentSuite {
    std::string name;
    std::vector<SuiteVariant> variants;
    std::vector<std::uint64_t> seeds{0, 1, 2};

    void validate() const;
};

ExperimentSuite parse_suite(std::string_view text);
std::string serialize_suite(const ExperimentSuite& suite);

/// Built-in suite documents: table1, table2, grid25, relativistic, lambda_sweep.
std::vector<std::string> preset_names();
bool is_preset(const std::string& name);
std::string preset_text(const std::string& name);

}  // namespace pairgan
