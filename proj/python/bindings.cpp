#include "pairgan/config.hpp"
#include "pairgan/experiment.hpp"
#include "pairgan/losses.hpp"
#include "pairgan/metrics.hpp"
#include "pairgan/synthdata.hpp"
#include "pairgan/trainer.hpp"

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace pairgan;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Matrix to_matrix(const Array& a) {
    if (a.ndim() != 2) throw py::value_error("expected a 2-D array");
    const auto r = static_cast<std::size_t>(a.shape(0));
    const auto c = static_cast<std::size_t>(a.shape(1));
    return Matrix(r, c, std::vector<double>(a.data(), a.data() + r * c));
}

Array to_array(const Matrix& m) {
    Array out({m.rows(), m.cols()});
    std::copy(m.values().begin(), m.values().end(), out.mutable_data());
    return out;
}

py::dict report_dict(const MetricReport& r) {
    py::dict d;
    d["precision"] = r.precision;
    d["recall"] = r.recall;
    d["density"] = r.density;
    d["coverage"] = r.coverage;
    d["k"] = r.k;
    d["n_real"] = r.n_real;
    d["n_fake"] = r.n_fake;
    return d;
}

py::dict record_dict(const RunRecord& r) {
    py::dict d;
    d["label"] = r.label;
    d["seed"] = r.seed;
    d["dir"] = r.dir.string();
    d["ok"] = r.ok;
    d["error"] = r.error;
    d["final"] = report_dict(r.final_report);
    d["wall_seconds"] = r.wall_seconds;
    return d;
}

TrainConfig config_from(const std::string& text, std::optional<std::uint64_t> seed) {
    TrainConfig c = parse_config(text.find('\n') != std::string::npos ? text : load_document(text));
    if (seed) c.seed = *seed;
    return c;
}

std::vector<RunSpec> plan_document(const std::string& text, const fs::path& out,
                                   std::optional<std::uint64_t> seed) {
    switch (classify_document(text)) {
        case DocumentKind::Suite: {
            ExperimentSuite s = parse_suite(text);
            if (seed) s.seeds = {*seed};
            return plan_suite(s, out);
        }
        case DocumentKind::Sweep: {
            SweepSpec s = parse_sweep(text);
            if (seed) s.seeds = {*seed};
            return plan_sweep(s, out);
        }
        case DocumentKind::Run: break;
    }
    throw ConfigError("not a suite or sweep document");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Pairing-regularized GAN toys: training, PRDC metrics, suites and plots.";

    py::register_exception<TrainingError>(m, "TrainingError", PyExc_RuntimeError);

    m.def("presets", &preset_names, "Names of the built-in suite and sweep documents.");
    m.def("preset", &preset_text, py::arg("name"));
    m.def(
        "normalize_config",
        [](const std::string& text) { return serialize_config(parse_config(text)); },
        py::arg("text"), "Parses a run document and returns its canonical form.");

    m.def(
        "prdc",
        [](const Array& real, const Array& fake, std::size_t k) {
            return report_dict(prdc(to_matrix(real), to_matrix(fake), k));
        },
        py::arg("real"), py::arg("fake"), py::arg("k") = 5);
    m.def(
        "knn_radii", [](const Array& points, std::size_t k) { return knn_radii(to_matrix(points), k); },
        py::arg("points"), py::arg("k") = 5);

    m.def(
        "pairing_loss",
        [](const Array& logits) {
            ad::Tape tape;
            return pairing_loss(tape.constant(to_matrix(logits))).value().item();
        },
        py::arg("logits"), "Mean cross-entropy of each row against its diagonal entry.");

    m.def(
        "sample_target",
        [](const std::string& kind, std::size_t n, std::uint64_t seed) {
            TrainConfig c = default_config_for(parse_target_kind(kind));
            Rng rng(seed);
            return to_array(sample_target(c.target, n, rng));
        },
        py::arg("kind"), py::arg("n"), py::arg("seed") = 0);
    m.def(
        "sample_derangement",
        [](std::size_t b, std::uint64_t seed) {
            Rng rng(seed);
            return sample_derangement(b, rng);
        },
        py::arg("b"), py::arg("seed") = 0);

    m.def(
        "train",
        [](const std::string& config, std::optional<std::uint64_t> seed) {
            const TrainConfig c = config_from(config, seed);
            RunResult r;
            {
                py::gil_scoped_release release;
                r = train(c);
            }
            py::list traj;
            for (const auto& e : r.trajectory) {
                py::dict row = report_dict(e.metrics);
                row["step"] = e.step;
                row["L_D"] = e.losses.d_total;
                row["L_G_adv"] = e.losses.g_adv;
                row["L_pair"] = e.losses.pair;
                row["r1"] = e.losses.r1;
                row["ms"] = e.losses.ms;
                traj.append(row);
            }
            py::dict d;
            d["trajectory"] = traj;
            d["final"] = report_dict(r.final_report);
            d["wall_seconds"] = r.wall_seconds;
            return d;
        },
        py::arg("config"), py::arg("seed") = py::none(),
        "Trains a run document in memory and returns its trajectory.");

    m.def(
        "run",
        [](const std::string& config, const std::string& out, const std::string& label,
           std::optional<std::uint64_t> seed) {
            const RunSpec spec{label, config_from(config, seed), out};
            RunRecord r;
            {
                py::gil_scoped_release release;
                r = run_experiment(spec);
            }
            return record_dict(r);
        },
        py::arg("config"), py::arg("out"), py::arg("label") = "run", py::arg("seed") = py::none(),
        "Trains one configuration and writes its run directory.");

    m.def(
        "run_suite",
        [](const std::string& document, const std::string& out, unsigned workers,
           std::optional<std::uint64_t> seed) {
            // inline text, a preset name, or a path
            const std::string text = document.find('\n') != std::string::npos
                                         ? document
                                         : load_document(document);
            const auto specs = plan_document(text, out, seed);
            write_run_index(out, specs);
            std::vector<RunRecord> records;
            {
                py::gil_scoped_release release;
                records = run_all(specs, std::max(1u, workers));
                write_summary(out);
            }
            py::list l;
            for (const auto& r : records) l.append(record_dict(r));
            return l;
        },
        py::arg("document"), py::arg("out"), py::arg("workers") = 1, py::arg("seed") = py::none(),
        "Runs a suite or sweep document (or preset name) and writes its summary.");

    m.def(
        "summarize",
        [](const std::string& root) {
            write_summary(root);
            return summary_csv(summarize(root));
        },
        py::arg("root"), "Rewrites summary files for a suite directory; returns summary.csv.");

    m.def(
        "scatter_svg",
        [](const Array& real, const Array& fake, const std::string& title,
           std::optional<double> extent) {
            return scatter_svg(to_matrix(real), to_matrix(fake), title, extent);
        },
        py::arg("real"), py::arg("fake"), py::arg("title") = "samples",
        py::arg("extent") = py::none());

    m.def("fnv1a_hex", [](const py::bytes& b) { return fnv1a_hex(std::string(b)); });
}
