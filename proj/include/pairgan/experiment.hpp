#pragma once

// Run directories, multi-seed suites, parameter sweeps and summaries.
//
// A run directory holds config.ini, trajectory.csv, real.csv, fake.csv,
// scatter.svg, generator.ckpt, discriminator.ckpt, pairing_z.ckpt,
// pairing_x.ckpt and manifest.json. A suite or sweep directory holds one
// run directory per (label, seed) at <label>/seed<seed>, an index runs.csv,
// summary.csv / summary.txt and per-seed trajectory plots.

#include "pairgan/config.hpp"
#include "pairgan/svg_plot.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace pairgan {

namespace fs = std::filesystem;

/// FNV-1a 64-bit over raw bytes, as 16 lowercase hex digits.
std::string fnv1a_hex(std::string_view bytes);

Trajectory read_trajectory_csv(std::istream& in);

enum class DocumentKind { Run, Suite, Sweep };

/// Suite documents carry a [suite] section, sweep documents a [sweep] one.
DocumentKind classify_document(std::string_view text);

/// Resolves a --config argument: preset names win over paths.
std::string load_document(const std::string& name_or_path);

struct RunSpec {
    std::string label;
    TrainConfig config;
    fs::path dir;
};

struct RunRecord {
    std::string label;
    std::uint64_t seed = 0;
    fs::path dir;
    bool ok = false;
    std::string error;
    MetricReport final_report;
    double wall_seconds = 0.0;
};

/// Trains one configuration and writes its run directory. Training failures
/// are reported in the record (and the manifest), not thrown; the partial
/// trajectory stays on disk.
RunRecord run_experiment(const RunSpec& spec);

using ProgressFn = std::function<void(const RunRecord&)>;

/// Runs specs on up to `workers` threads; records come back in spec order.
std::vector<RunRecord> run_all(const std::vector<RunSpec>& specs, unsigned workers,
                               const ProgressFn& progress = {});

struct SweepSpec {
    TrainConfig base;
    std::string key;
    std::vector<std::string> values;
    std::vector<std::uint64_t> seeds{0, 1, 2};

    void validate() const;
};

SweepSpec parse_sweep(std::string_view text);

/// Label of one sweep point, "key=value".
std::string sweep_label(const SweepSpec& sweep, std::size_t i);

/// Expands into run specs under `out`, variant-major then seed order.
std::vector<RunSpec> plan_suite(const ExperimentSuite& suite, const fs::path& out);
std::vector<RunSpec> plan_sweep(const SweepSpec& sweep, const fs::path& out);

/// runs.csv ("label,seed,dir" with dir relative to the suite root).
void write_run_index(const fs::path& out, const std::vector<RunSpec>& specs);

struct SummaryRow {
    std::string label;
    std::vector<std::uint64_t> seeds;
    std::vector<MetricReport> finals;  ///< last trajectory row per seed
    MetricReport median;
};

struct SummaryTable {
    std::vector<SummaryRow> rows;
};

/// Rebuilds the table from runs.csv and the per-run trajectory.csv files.
SummaryTable summarize(const fs::path& root);

std::string summary_csv(const SummaryTable& table);
std::string summary_text(const SummaryTable& table);

/// For rows labelled "key=value": whether each metric's median is monotone
/// in the value, one line per metric.
std::string monotonicity_report(const SummaryTable& table);

/// Writes summary.csv, summary.txt and the per-seed trajectory plots.
void write_summary(const fs::path& root);

/// Precision-recall or precision-coverage plot over several trajectory.csv
/// files; labels pair up with paths.
std::string plot_trajectories(const std::vector<fs::path>& csvs,
                              const std::vector<std::string>& labels, TrajectoryMode mode,
                              const std::string& title);

std::string read_file(const fs::path& path);
void write_file(const fs::path& path, std::string_view bytes);

}  // namespace pairgan
