#include "pairgan/config.hpp"

#include <algorithm>
#include <array>
#include <string_view>

namespace pairgan {

namespace {

struct Preset {
    std::string_view name;
    std::string_view text;
};

// Step budgets and batch sizes are scaled so that each 3-seed suite finishes
// within a quarter hour on a single core.
constexpr std::array<Preset, 5> kPresets = {{
    {"table1", R"(# Vertical two-component mixture, transported from an offset Gaussian prior.
version = 1
steps = 6000
batch_size = 64
eval_every = 500

[suite]
name = table1
seeds = 0,1,2

[target]
kind = vertical_mixture
sigma = 0.42

[variant GAN]

[variant GAN+R1]
loss.gamma_r1 = 1

[variant GAN+Pairing]
loss.lambda_pair = 0.05

[variant GAN+Pairing+R1]
loss.lambda_pair = 0.05
loss.gamma_r1 = 1
)"},
    {"table2", R"(# Ring with uniform angular density.
version = 1
steps = 6000
batch_size = 64
eval_every = 500

[suite]
name = table2
seeds = 0,1,2

[target]
kind = ring

[variant GAN]

[variant GAN+R1]
loss.gamma_r1 = 1

[variant GAN+Pairing]
loss.lambda_pair = 0.05

[variant GAN+Pairing+R1]
loss.lambda_pair = 0.05
loss.gamma_r1 = 1
)"},
    {"grid25", R"(# 5x5 Gaussian grid. Components are wider than the classical 0.05 so the
# grid is learnable within the step budget.
version = 1
steps = 12000
batch_size = 64
eval_every = 1000

[suite]
name = grid25
seeds = 0,1,2

[target]
kind = grid25
sigma = 0.2

[variant GAN]

[variant GAN+R1]
loss.gamma_r1 = 1

[variant MS-GAN]
loss.lambda_ms = 1

[variant GAN+Pairing+R1]
loss.lambda_pair = 0.05
loss.gamma_r1 = 1
)"},
    {"relativistic", R"(# Relativistic adversarial loss with R1, with and without pairing.
version = 1
steps = 6000
batch_size = 64
eval_every = 500

[suite]
name = relativistic
seeds = 0,1,2

[target]
kind = vertical_mixture

[loss]
adversarial = relativistic
gamma_r1 = 1

[variant RpGAN+R1]

[variant RpGAN+R1+Pairing]
loss.lambda_pair = 0.05
)"},
    {"lambda_sweep", R"(# Pairing weight sweep on the ring.
version = 1
steps = 6000
batch_size = 64
eval_every = 500

[sweep]
key = loss.lambda_pair
values = 0.01,0.05,0.1
seeds = 0,1,2

[target]
kind = ring
)"},
}};

const Preset* find_preset(const std::string& name) {
    auto it = std::find_if(kPresets.begin(), kPresets.end(),
                           [&](const Preset& p) { return p.name == name; });
    return it == kPresets.end() ? nullptr : &*it;
}

}  // namespace

std::vector<std::string> preset_names() {
    std::vector<std::string> out;
    for (const auto& p : kPresets) out.emplace_back(p.name);
    return out;
}

bool is_preset(const std::string& name) { return find_preset(name) != nullptr; }

std::string preset_text(const std::string& name) {
    const Preset* p = find_preset(name);
    if (!p) throw ConfigError("unknown preset '" + name + "'");
    return std::string(p->text);
}

}  // namespace pairgan
