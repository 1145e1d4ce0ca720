// pairgan: train toy GANs, run seed batteries and sweeps, plot and summarize.
//
//   pairgan run --config table2 --out runs/table2 --workers 4
//   pairgan run --config my.ini --seed 3 --dry-run
//   pairgan sweep --config lambda_sweep
//   pairgan plot-scatter --real r.csv --fake f.csv --out s.svg
//   pairgan plot-trajectory --mode precision_coverage --out t.svg a/trajectory.csv b/trajectory.csv
//   pairgan summarize --out runs/table2

#include "pairgan/experiment.hpp"
#include "pairgan/text.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <iostream>
#include <optional>
#include <thread>

using namespace pairgan;

namespace {

struct Common {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out;
    unsigned workers = std::max(1u, std::thread::hardware_concurrency());
    bool dry_run = false;
};

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("--config", c.config, "Config file or preset name")->required();
    cmd->add_option("--seed", c.seed, "Override the seed (suites: run only this seed)");
    cmd->add_option("--out", c.out, "Output directory (default runs/<name>)");
    cmd->add_option("--workers", c.workers, "Parallel runs")->check(CLI::PositiveNumber);
    cmd->add_flag("--dry-run", c.dry_run, "Validate and print the resolved config only");
}

fs::path default_out(const Common& c) {
    if (!c.out.empty()) return c.out;
    return fs::path("runs") / fs::path(c.config).stem();
}

void progress(const RunRecord& r) {
    std::cerr << (r.ok ? "done  " : "FAIL  ") << r.label << " seed " << r.seed;
    if (r.ok) {
        std::cerr << "  P=" << format_fixed(r.final_report.precision, 3)
                  << " R=" << format_fixed(r.final_report.recall, 3)
                  << " C=" << format_fixed(r.final_report.coverage, 3) << "  ("
                  << format_fixed(r.wall_seconds, 1) << " s)";
    } else {
        std::cerr << "  " << r.error;
    }
    std::cerr << '\n';
}

int finish_batch(const fs::path& out, const std::vector<RunRecord>& records) {
    write_summary(out);
    std::cout << read_file(out / "summary.txt");
    std::cout << "wrote " << (out / "summary.csv").string() << '\n';
    for (const auto& r : records) {
        if (!r.ok) return 1;
    }
    return 0;
}

int do_single(const Common& c, const std::string& text) {
    TrainConfig config = parse_config(text);
    if (c.seed) config.seed = *c.seed;
    config.validate();
    if (c.dry_run) {
        std::cout << serialize_config(config);
        return 0;
    }
    const fs::path out = default_out(c);
    const RunRecord r = run_experiment({fs::path(c.config).stem().string(), config, out});
    progress(r);
    std::cout << metric_csv_header() << '\n' << metric_csv_row(config.steps, r.final_report) << '\n';
    return r.ok ? 0 : 1;
}

int do_suite(const Common& c, const std::string& text) {
    ExperimentSuite suite = parse_suite(text);
    if (c.seed) suite.seeds = {*c.seed};
    suite.validate();
    if (c.dry_run) {
        std::cout << serialize_suite(suite);
        return 0;
    }
    const fs::path out = c.out.empty() ? fs::path("runs") / suite.name : fs::path(c.out);
    const auto specs = plan_suite(suite, out);
    write_run_index(out, specs);
    return finish_batch(out, run_all(specs, c.workers, progress));
}

int do_sweep(const Common& c, const std::string& text, const std::string& key,
             const std::vector<std::string>& values) {
    SweepSpec sweep;
    if (classify_document(text) == DocumentKind::Sweep) {
        sweep = parse_sweep(text);
    } else {
        // a plain run document is the base of a sweep given on the command line
        if (key.empty() || values.empty()) {
            throw ConfigError("'" + c.config + "' is not a sweep document; pass --key and --values");
        }
        sweep.base = parse_config(text);
    }
    if (!key.empty()) sweep.key = key;
    if (!values.empty()) sweep.values = values;
    if (c.seed) sweep.seeds = {*c.seed};
    sweep.validate();
    if (c.dry_run) {
        std::cout << "# sweep " << sweep.key << " over";
        for (const auto& v : sweep.values) std::cout << ' ' << v;
        std::cout << "\n" << serialize_config(sweep.base);
        return 0;
    }
    const fs::path out = default_out(c);
    const auto specs = plan_sweep(sweep, out);
    write_run_index(out, specs);
    return finish_batch(out, run_all(specs, c.workers, progress));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"pairgan: pairing-regularized GAN toy experiments"};
    app.require_subcommand(1);

    Common run_opts, suite_opts, sweep_opts;
    auto* run = app.add_subcommand("run", "Train one config; suite and sweep documents dispatch");
    add_common(run, run_opts);
    auto* suite = app.add_subcommand("suite", "Run every variant x seed of a suite");
    add_common(suite, suite_opts);
    auto* sweep = app.add_subcommand("sweep", "Run one numeric key over several values");
    add_common(sweep, sweep_opts);
    std::string sweep_key;
    std::vector<std::string> sweep_values;
    sweep->add_option("--key", sweep_key, "Dotted numeric key (overrides the document)");
    sweep->add_option("--values", sweep_values, "Values (overrides the document)")->delimiter(',');

    auto* scatter = app.add_subcommand("plot-scatter", "Scatter SVG from point CSVs");
    std::string real_csv, fake_csv, scatter_out, scatter_title = "samples";
    std::optional<double> extent;
    scatter->add_option("--real", real_csv, "Real points CSV (may be empty)")->required();
    scatter->add_option("--fake", fake_csv, "Generated points CSV")->required();
    scatter->add_option("--out", scatter_out, "Output SVG")->required();
    scatter->add_option("--title", scatter_title);
    scatter->add_option("--extent", extent, "Half-width of the square viewport");

    auto* trajectory = app.add_subcommand("plot-trajectory", "Metric-space trajectories");
    std::vector<std::string> traj_csvs, traj_labels;
    std::string traj_mode = "precision_recall", traj_out, traj_title = "trajectory";
    trajectory->add_option("csvs", traj_csvs, "trajectory.csv files")->required();
    trajectory->add_option("--labels", traj_labels, "One label per file")->delimiter(',');
    trajectory->add_option("--mode", traj_mode, "precision_recall | precision_coverage");
    trajectory->add_option("--out", traj_out, "Output SVG")->required();
    trajectory->add_option("--title", traj_title);

    auto* summarize_cmd = app.add_subcommand("summarize", "Rebuild summaries from run CSVs");
    std::string summary_root;
    summarize_cmd->add_option("--out", summary_root, "Suite or sweep directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run || *suite || *sweep) {
            const Common& c = *run ? run_opts : *suite ? suite_opts : sweep_opts;
            const std::string text = load_document(c.config);
            const DocumentKind kind = classify_document(text);
            if (*suite && kind != DocumentKind::Suite) {
                throw ConfigError("'" + c.config + "' is not a suite document");
            }
            if (*sweep) {
                if (kind == DocumentKind::Suite) {
                    throw ConfigError("'" + c.config + "' is a suite document, not a sweep");
                }
                return do_sweep(c, text, sweep_key, sweep_values);
            }
            switch (kind) {
                case DocumentKind::Suite: return do_suite(c, text);
                case DocumentKind::Sweep: return do_sweep(c, text, sweep_key, sweep_values);
                case DocumentKind::Run: return do_single(c, text);
            }
        }
        if (*scatter) {
            std::ifstream rin(real_csv), fin(fake_csv);
            if (!rin) throw ContractError("cannot read '" + real_csv + "'");
            if (!fin) throw ContractError("cannot read '" + fake_csv + "'");
            write_file(scatter_out,
                       scatter_svg(read_points_csv(rin), read_points_csv(fin), scatter_title, extent));
            return 0;
        }
        if (*trajectory) {
            std::vector<fs::path> paths(traj_csvs.begin(), traj_csvs.end());
            if (traj_labels.empty()) {
                for (const auto& p : paths) {
                    traj_labels.push_back(p.parent_path().empty() ? p.stem().string()
                                                                  : p.parent_path().string());
                }
            }
            write_file(traj_out, plot_trajectories(paths, traj_labels,
                                                   parse_trajectory_mode(traj_mode), traj_title));
            return 0;
        }
        if (*summarize_cmd) {
            write_summary(summary_root);
            std::cout << read_file(fs::path(summary_root) / "summary.txt");
            return 0;
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
