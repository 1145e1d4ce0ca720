#include "pairgan/experiment.hpp"

#include "pairgan/text.hpp"

#include "json.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

namespace pairgan {

std::string fnv1a_hex(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    std::ostringstream out;
    out << std::hex << std::setw(16) << std::setfill('0') << h;
    return out.str();
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ContractError("cannot read '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const fs::path& path, std::string_view bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ContractError("cannot write '" + path.string() + "'");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw ContractError("write failed for '" + path.string() + "'");
}

Trajectory read_trajectory_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || trim(line) != trajectory_csv_header()) {
        throw ContractError("trajectory CSV: expected header '" + trajectory_csv_header() + "'");
    }
    Trajectory out;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto f = split(trim(line), ',');
        if (f.size() != 10) {
            throw ContractError("trajectory CSV line " + std::to_string(line_no) +
                                ": expected 10 fields");
        }
        TrajectoryEntry e;
        const double step = parse_double(f[0]);
        if (step < 0 || step != std::floor(step)) {
            throw ContractError("trajectory CSV line " + std::to_string(line_no) + ": bad step");
        }
        e.step = static_cast<std::size_t>(step);
        e.metrics.precision = parse_double(f[1]);
        e.metrics.recall = parse_double(f[2]);
        e.metrics.density = parse_double(f[3]);
        e.metrics.coverage = parse_double(f[4]);
        e.losses.d_total = parse_double(f[5]);
        e.losses.g_adv = parse_double(f[6]);
        e.losses.pair = parse_double(f[7]);
        e.losses.r1 = parse_double(f[8]);
        e.losses.ms = parse_double(f[9]);
        out.push_back(e);
    }
    return out;
}

DocumentKind classify_document(std::string_view text) {
    const ConfigDocument doc = tokenize_config(text);
    bool suite = false, sweep = false;
    for (const auto& e : doc.base) {
        suite = suite || e.key.starts_with("suite.");
        sweep = sweep || e.key.starts_with("sweep.");
    }
    if (suite && sweep) throw ConfigError("document has both [suite] and [sweep] sections");
    if (!doc.variants.empty() && !suite) {
        throw ConfigError("[variant] sections need a [suite] section");
    }
    return suite ? DocumentKind::Suite : sweep ? DocumentKind::Sweep : DocumentKind::Run;
}

std::string load_document(const std::string& name_or_path) {
    if (is_preset(name_or_path)) return preset_text(name_or_path);
    if (!fs::exists(name_or_path)) {
        std::string names;
        for (const auto& n : preset_names()) names += (names.empty() ? "" : ", ") + n;
        throw ConfigError("'" + name_or_path + "' is neither a file nor a preset (" + names + ")");
    }
    return read_file(name_or_path);
}

// ---------------------------------------------------------------- single runs

namespace {

std::string checkpoint_text(const MlpParams& params) {
    std::ostringstream out;
    write_checkpoint(out, params);
    return out.str();
}

std::string points_text(const Matrix& pts) {
    std::ostringstream out;
    write_points_csv(out, pts);
    return out.str();
}

nlohmann::ordered_json report_json(const MetricReport& m) {
    return {{"precision", m.precision}, {"recall", m.recall},   {"density", m.density},
            {"coverage", m.coverage},   {"k", m.k},             {"n_real", m.n_real},
            {"n_fake", m.n_fake}};
}

}  // namespace

RunRecord run_experiment(const RunSpec& spec) {
    RunRecord rec;
    rec.label = spec.label;
    rec.seed = spec.config.seed;
    rec.dir = spec.dir;
    spec.config.validate();
    fs::create_directories(spec.dir);

    // name -> bytes of every artifact, in write order
    std::vector<std::pair<std::string, std::string>> artifacts;
    auto emit = [&](const std::string& name, std::string bytes) {
        write_file(spec.dir / name, bytes);
        artifacts.emplace_back(name, std::move(bytes));
    };

    const std::string echo = serialize_config(spec.config);
    emit("config.ini", echo);

    std::string trajectory_bytes = trajectory_csv_header() + "\n";
    std::ofstream traj(spec.dir / "trajectory.csv", std::ios::binary | std::ios::trunc);
    if (!traj) throw ContractError("cannot write '" + (spec.dir / "trajectory.csv").string() + "'");
    traj << trajectory_bytes << std::flush;
    auto observer = [&](const TrajectoryEntry& e) {
        const std::string row = trajectory_csv_row(e) + "\n";
        trajectory_bytes += row;
        traj << row << std::flush;
    };

    nlohmann::ordered_json manifest;
    manifest["format"] = "pairgan-manifest v1";
    manifest["label"] = spec.label;
    manifest["seed"] = spec.config.seed;

    try {
        RunResult result = train(spec.config, observer);
        traj.close();
        artifacts.emplace_back("trajectory.csv", trajectory_bytes);

        const EvalSamples samples =
            draw_eval_samples(result.generator, spec.config.prior, spec.config.target,
                              spec.config.n_eval, eval_rng(spec.config.seed, spec.config.steps));
        emit("real.csv", points_text(samples.real));
        emit("fake.csv", points_text(samples.fake));
        emit("scatter.svg", scatter_svg(samples.real, samples.fake,
                                        spec.label + " (seed " + std::to_string(rec.seed) + ")"));
        emit("generator.ckpt", checkpoint_text(result.generator));
        emit("discriminator.ckpt", checkpoint_text(result.discriminator));
        emit("pairing_z.ckpt", checkpoint_text(result.pairing.z_encoder));
        emit("pairing_x.ckpt", checkpoint_text(result.pairing.x_encoder));

        rec.ok = true;
        rec.final_report = result.final_report;
        rec.wall_seconds = result.wall_seconds;
        manifest["status"] = "ok";
        manifest["final"] = report_json(result.final_report);
    } catch (const TrainingError& e) {
        traj.close();
        artifacts.emplace_back("trajectory.csv", trajectory_bytes);
        rec.error = e.what();
        manifest["status"] = "failed";
        manifest["error"] = e.what();
        manifest["failed_term"] = e.term();
        manifest["failed_step"] = e.step();
    }

    manifest["wall_seconds"] = rec.wall_seconds;
    manifest["config"] = echo;
    nlohmann::ordered_json hashes = nlohmann::ordered_json::object();
    for (const auto& [name, bytes] : artifacts) {
        hashes[name] = {{"fnv1a64", fnv1a_hex(bytes)}, {"bytes", bytes.size()}};
    }
    manifest["artifacts"] = hashes;
    write_file(spec.dir / "manifest.json", manifest.dump(2) + "\n");
    return rec;
}

std::vector<RunRecord> run_all(const std::vector<RunSpec>& specs, unsigned workers,
                               const ProgressFn& progress) {
    std::vector<RunRecord> records(specs.size());
    std::vector<std::exception_ptr> errors(specs.size());
    std::atomic<std::size_t> next{0};
    std::mutex report_mutex;
    auto worker = [&] {
        for (std::size_t i = next++; i < specs.size(); i = next++) {
            try {
                records[i] = run_experiment(specs[i]);
            } catch (...) {
                errors[i] = std::current_exception();
                continue;
            }
            if (progress) {
                std::lock_guard lock(report_mutex);
                progress(records[i]);
            }
        }
    };
    const unsigned n = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(specs.size())));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < n; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return records;
}

// ------------------------------------------------------------ suites, sweeps

void SweepSpec::validate() const {
    if (!is_numeric_key(key)) {
        throw ConfigError("sweep key '" + key + "' is not a numeric config field");
    }
    if (values.empty()) throw ConfigError("sweep needs at least one value");
    if (seeds.empty()) throw ConfigError("sweep needs at least one seed");
    std::set<std::string> seen;
    for (const auto& v : values) {
        if (!seen.insert(v).second) throw ConfigError("duplicate sweep value '" + v + "'");
        TrainConfig c = base;
        set_config_value(c, key, v);
        try {
            c.validate();
        } catch (const ConfigError&) {
            throw;
        } catch (const ContractError& e) {
            throw ConfigError("sweep value " + key + " = " + v + ": " + e.what());
        }
    }
}

SweepSpec parse_sweep(std::string_view text) {
    const ConfigDocument doc = tokenize_config(text);
    if (!doc.variants.empty()) throw ConfigError("sweep documents cannot have [variant] sections");
    SweepSpec sweep;
    std::vector<ConfigEntry> base;
    bool have_values = false;
    for (const auto& e : doc.base) {
        if (e.key == "sweep.key") {
            sweep.key = e.value;
        } else if (e.key == "sweep.values") {
            have_values = true;
            for (const auto& v : split(e.value, ',')) {
                const std::string t(trim(v));
                if (t.empty()) throw ConfigError("empty sweep value", e.line);
                sweep.values.push_back(t);
            }
        } else if (e.key == "sweep.seeds") {
            sweep.seeds.clear();
            for (const auto& s : split(e.value, ',')) {
                TrainConfig probe;
                set_config_value(probe, "seed", std::string(trim(s)), e.line);
                sweep.seeds.push_back(probe.seed);
            }
        } else if (e.key.starts_with("sweep.")) {
            throw ConfigError("unknown key '" + e.key + "'", e.line);
        } else {
            base.push_back(e);
        }
    }
    if (sweep.key.empty()) throw ConfigError("sweep document needs [sweep] key");
    if (!have_values) throw ConfigError("sweep document needs [sweep] values");
    apply_entries(sweep.base, base);
    sweep.validate();
    return sweep;
}

std::string sweep_label(const SweepSpec& sweep, std::size_t i) {
    return sweep.key + "=" + sweep.values.at(i);
}

std::vector<RunSpec> plan_suite(const ExperimentSuite& suite, const fs::path& out) {
    suite.validate();
    std::vector<RunSpec> specs;
    for (const auto& v : suite.variants) {
        for (auto seed : suite.seeds) {
            TrainConfig c = v.config;
            c.seed = seed;
            specs.push_back({v.label, c, out / v.label / ("seed" + std::to_string(seed))});
        }
    }
    return specs;
}

std::vector<RunSpec> plan_sweep(const SweepSpec& sweep, const fs::path& out) {
    sweep.validate();
    std::vector<RunSpec> specs;
    for (std::size_t i = 0; i < sweep.values.size(); ++i) {
        TrainConfig c = sweep.base;
        set_config_value(c, sweep.key, sweep.values[i]);
        const std::string label = sweep_label(sweep, i);
        for (auto seed : sweep.seeds) {
            c.seed = seed;
            specs.push_back({label, c, out / label / ("seed" + std::to_string(seed))});
        }
    }
    return specs;
}

void write_run_index(const fs::path& out, const std::vector<RunSpec>& specs) {
    fs::create_directories(out);
    std::string text = "label,seed,dir\n";
    for (const auto& s : specs) {
        if (s.label.find_first_of(",\n") != std::string::npos) {
            throw ContractError("run label '" + s.label + "' contains a comma or newline");
        }
        text += s.label + "," + std::to_string(s.config.seed) + "," +
                fs::relative(s.dir, out).generic_string() + "\n";
    }
    write_file(out / "runs.csv", text);
}

// ------------------------------------------------------------------ summaries

namespace {

struct IndexRow {
    std::string label;
    std::uint64_t seed;
    fs::path dir;
};

std::vector<IndexRow> read_index(const fs::path& root) {
    std::istringstream in(read_file(root / "runs.csv"));
    std::string line;
    if (!std::getline(in, line) || trim(line) != "label,seed,dir") {
        throw ContractError((root / "runs.csv").string() + ": expected header 'label,seed,dir'");
    }
    std::vector<IndexRow> rows;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        const auto f = split(trim(line), ',');
        if (f.size() != 3) throw ContractError("runs.csv: expected 3 fields in '" + line + "'");
        rows.push_back({f[0], static_cast<std::uint64_t>(std::stoull(f[1])), root / f[2]});
    }
    return rows;
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::string pad(const std::string& s, std::size_t w) {
    return s.size() >= w ? s : s + std::string(w - s.size(), ' ');
}

}  // namespace

SummaryTable summarize(const fs::path& root) {
    SummaryTable table;
    std::map<std::string, std::size_t> where;
    for (const auto& r : read_index(root)) {
        std::istringstream in(read_file(r.dir / "trajectory.csv"));
        const Trajectory t = read_trajectory_csv(in);
        if (t.empty()) throw ContractError((r.dir / "trajectory.csv").string() + " has no rows");
        auto [it, fresh] = where.emplace(r.label, table.rows.size());
        if (fresh) table.rows.push_back({r.label, {}, {}, {}});
        SummaryRow& row = table.rows[it->second];
        row.seeds.push_back(r.seed);
        row.finals.push_back(t.back().metrics);
    }
    for (auto& row : table.rows) {
        auto med = [&](double MetricReport::*field) {
            std::vector<double> v;
            for (const auto& m : row.finals) v.push_back(m.*field);
            return median(v);
        };
        row.median.precision = med(&MetricReport::precision);
        row.median.recall = med(&MetricReport::recall);
        row.median.density = med(&MetricReport::density);
        row.median.coverage = med(&MetricReport::coverage);
    }
    return table;
}

std::string summary_csv(const SummaryTable& table) {
    std::string out = "label,seed,precision,recall,density,coverage\n";
    auto line = [&](const std::string& label, const std::string& seed, const MetricReport& m) {
        out += label + "," + seed + "," + format_double(m.precision) + "," +
               format_double(m.recall) + "," + format_double(m.density) + "," +
               format_double(m.coverage) + "\n";
    };
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.seeds.size(); ++i) {
            line(row.label, std::to_string(row.seeds[i]), row.finals[i]);
        }
        line(row.label, "median", row.median);
    }
    return out;
}

std::string summary_text(const SummaryTable& table) {
    std::size_t w = 8;
    for (const auto& row : table.rows) w = std::max(w, row.label.size() + 2);
    std::string out = pad("method", w) + "precision  recall     density    coverage   (median; per seed)\n";
    for (const auto& row : table.rows) {
        const MetricReport& m = row.median;
        out += pad(row.label, w) + pad(format_fixed(m.precision, 3), 11) +
               pad(format_fixed(m.recall, 3), 11) + pad(format_fixed(m.density, 3), 11) +
               pad(format_fixed(m.coverage, 3), 11);
        std::string per;
        for (std::size_t i = 0; i < row.seeds.size(); ++i) {
            per += (i ? " " : "") + std::to_string(row.seeds[i]) + ":" +
                   format_fixed(row.finals[i].coverage, 3);
        }
        out += "cov " + per + "\n";
    }
    return out;
}

std::string monotonicity_report(const SummaryTable& table) {
    std::vector<std::pair<double, const SummaryRow*>> points;
    std::string key;
    for (const auto& row : table.rows) {
        const auto eq = row.label.rfind('=');
        if (eq == std::string::npos) throw ContractError("row '" + row.label + "' is not key=value");
        if (key.empty()) key = row.label.substr(0, eq);
        points.emplace_back(parse_double(row.label.substr(eq + 1)), &row);
    }
    std::stable_sort(points.begin(), points.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    std::string out;
    const std::pair<const char*, double MetricReport::*> metrics[] = {
        {"precision", &MetricReport::precision},
        {"recall", &MetricReport::recall},
        {"density", &MetricReport::density},
        {"coverage", &MetricReport::coverage}};
    for (const auto& [name, field] : metrics) {
        bool up = true, down = true;
        for (std::size_t i = 1; i < points.size(); ++i) {
            const double a = points[i - 1].second->median.*field;
            const double b = points[i].second->median.*field;
            up = up && b >= a;
            down = down && b <= a;
        }
        const char* verdict = up && down ? "constant" : up ? "non-decreasing" : down ? "non-increasing" : "not monotone";
        out += std::string(name) + " vs " + key + ": " + verdict + "\n";
    }
    return out;
}

std::string plot_trajectories(const std::vector<fs::path>& csvs,
                              const std::vector<std::string>& labels, TrajectoryMode mode,
                              const std::string& title) {
    if (csvs.empty()) throw ContractError("plot_trajectories: no trajectory files");
    if (labels.size() != csvs.size()) throw ContractError("plot_trajectories: one label per file");
    std::vector<TrajectorySeries> series;
    for (std::size_t i = 0; i < csvs.size(); ++i) {
        std::istringstream in(read_file(csvs[i]));
        TrajectorySeries s{labels[i], {}};
        for (const auto& e : read_trajectory_csv(in)) {
            const double x =
                mode == TrajectoryMode::PrecisionRecall ? e.metrics.recall : e.metrics.coverage;
            s.points.emplace_back(x, e.metrics.precision);
        }
        series.push_back(std::move(s));
    }
    return trajectory_svg(series, mode, title);
}

void write_summary(const fs::path& root) {
    const SummaryTable table = summarize(root);
    write_file(root / "summary.csv", summary_csv(table));
    std::string text = summary_text(table);
    const bool sweep = std::all_of(table.rows.begin(), table.rows.end(), [](const SummaryRow& r) {
        return r.label.find('=') != std::string::npos;
    });
    if (sweep && !table.rows.empty()) text += "\n" + monotonicity_report(table);
    write_file(root / "summary.txt", text);

    // one plot per seed and mode, all labels overlaid
    std::map<std::uint64_t, std::pair<std::vector<fs::path>, std::vector<std::string>>> by_seed;
    for (const auto& r : read_index(root)) {
        by_seed[r.seed].first.push_back(r.dir / "trajectory.csv");
        by_seed[r.seed].second.push_back(r.label);
    }
    for (const auto& [seed, files] : by_seed) {
        for (auto mode : {TrajectoryMode::PrecisionRecall, TrajectoryMode::PrecisionCoverage}) {
            const std::string name = to_string(mode) + "_seed" + std::to_string(seed);
            write_file(root / (name + ".svg"),
                       plot_trajectories(files.first, files.second, mode,
                                         "seed " + std::to_string(seed)));
        }
    }
}

}  // namespace pairgan
