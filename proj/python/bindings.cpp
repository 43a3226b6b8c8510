#include "preyclass/artifact.hpp"
#include "preyclass/budget.hpp"
#include "preyclass/cli.hpp"
#include "preyclass/data.hpp"
#include "preyclass/error.hpp"
#include "preyclass/eval.hpp"
#include "preyclass/features.hpp"
#include "preyclass/windowing.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace preyclass;

namespace {

Label to_label(int v) { return label_from_int(v); }
int from_label(Label l) { return static_cast<int>(l); }

std::vector<std::size_t> all_indices(std::size_t n) {
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    return idx;
}

py::dict autonomy_dict(const Autonomy& a) {
    py::dict d;
    d["seconds"] = a.seconds;
    d["hours"] = a.hours;
    d["days"] = a.days;
    return d;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Prey-handling classification: synthetic data, windowing, features, classifiers and memory budgets";

    static py::exception<Error> error(m, "PreyclassError");
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            py::set_error(error, e.what());
        }
    });

    py::class_<TimeSeries>(m, "TimeSeries")
        .def_property_readonly("rate", &TimeSeries::rate)
        .def("__len__", &TimeSeries::size)
        .def("count", [](const TimeSeries& s, int label) { return s.count(to_label(label)); })
        .def("labels",
             [](const TimeSeries& s) {
                 std::vector<int> out;
                 for (const auto& x : s.samples()) out.push_back(from_label(x.label));
                 return out;
             })
        .def("rows",
             [](const TimeSeries& s) {
                 std::vector<std::tuple<double, double, double, double, double, int>> out;
                 for (const auto& x : s.samples())
                     out.emplace_back(x.t, x.heave, x.surge, x.sway, x.depth, from_label(x.label));
                 return out;
             },
             "Samples as (t, heave, surge, sway, depth, label) tuples")
        .def("slice", &TimeSeries::slice, py::arg("first"), py::arg("count"))
        .def("to_csv", [](const TimeSeries& s) { return emit_csv(s); });

    py::class_<LabeledVector>(m, "LabeledVector")
        .def(py::init([](std::vector<double> values, int label) { return LabeledVector{std::move(values), to_label(label)}; }),
             py::arg("values"), py::arg("label"))
        .def_readwrite("values", &LabeledVector::values)
        .def_property(
            "label", [](const LabeledVector& v) { return from_label(v.label); },
            [](LabeledVector& v, int l) { v.label = to_label(l); })
        .def("__len__", [](const LabeledVector& v) { return v.values.size(); });

    m.def(
        "synthesize",
        [](double duration, double rate, std::uint64_t seed, double noise_std) {
            SynthConfig cfg;
            cfg.duration = duration;
            cfg.rate = rate;
            cfg.seed = seed;
            cfg.noise_std = noise_std;
            return synthesize(cfg);
        },
        py::arg("duration") = 600.0, py::arg("rate") = 25.0, py::arg("seed") = kDefaultSeed,
        py::arg("noise_std") = SynthConfig{}.noise_std, "Synthetic two-regime labeled stream");
    m.def("parse_csv", py::overload_cast<const std::string&>(&parse_csv), py::arg("text"));

    m.def(
        "segment",
        [](const TimeSeries& s, double window_s, double overlap_s) {
            return segment(s, WindowConfig{window_s, overlap_s, s.rate()});
        },
        py::arg("series"), py::arg("window_s") = 1.0, py::arg("overlap_s") = 0.5);
    m.def(
        "balance", [](const std::vector<LabeledVector>& w, std::uint64_t seed) { return balance(w, seed); },
        py::arg("windows"), py::arg("seed") = kDefaultSeed);
    m.def("extract", &extract, py::arg("window"), "The 30 statistical features of a window");
    m.def(
        "extract_all", [](const std::vector<LabeledVector>& w) { return extract_all(w); }, py::arg("windows"));

    py::class_<ModelArtifact>(m, "Model")
        .def_property_readonly("family", [](const ModelArtifact& a) { return to_string(a.family()); })
        .def("score", [](const ModelArtifact& a, const std::vector<double>& x) { return predict_score(a, x); })
        .def("predict", [](const ModelArtifact& a, const std::vector<double>& x) { return from_label(predict(a, x)); })
        .def("classify_stream",
             [](const ModelArtifact& a, const TimeSeries& s) {
                 const auto* esn = std::get_if<EsnModel>(&a.model);
                 if (!esn) throw StateError("classify_stream needs an ESN model");
                 std::vector<int> out;
                 for (auto l : classify_stream(*esn, s)) out.push_back(from_label(l));
                 return out;
             })
        .def("footprint_kb", [](const ModelArtifact& a) { return footprint(a).footprint_kb; })
        .def("parameter_count", [](const ModelArtifact& a) { return footprint(a).parameter_count; })
        .def("to_json", [](const ModelArtifact& a) { return to_json(a).dump(2); })
        .def_static("from_json", [](const std::string& text) {
            std::istringstream in(text);
            return load_artifact(in);
        });

    m.def(
        "train_idnn",
        [](const std::vector<LabeledVector>& rows, std::size_t hidden, const std::string& kind, double eta,
           double lambda, std::size_t epochs, std::uint64_t seed, bool standardize) {
            TrainSettings st;
            st.epochs = epochs;
            VectorTask task(Family::idnn, rows, standardize, st);
            py::gil_scoped_release release;
            return task.fit(IdnnHyper{hidden_kind_from_string(kind), hidden, eta, 0.0, lambda}, all_indices(rows.size()),
                            seed);
        },
        py::arg("rows"), py::arg("hidden") = 5, py::arg("kind") = "sigmoid", py::arg("eta") = 0.1,
        py::arg("weight_decay") = 0.0, py::arg("epochs") = 1000, py::arg("seed") = 1, py::arg("standardize") = true);
    m.def(
        "train_svm",
        [](const std::vector<LabeledVector>& rows, const std::string& kernel, double C, double sigma,
           bool standardize) {
            TrainSettings st;
            st.svm_sigma = sigma;
            VectorTask task(Family::svm, rows, standardize, st);
            py::gil_scoped_release release;
            return task.fit(SvmHyper{kernel_kind_from_string(kernel), C}, all_indices(rows.size()), 0);
        },
        py::arg("rows"), py::arg("kernel") = "rbf", py::arg("C") = 10.0, py::arg("sigma") = 1.0,
        py::arg("standardize") = true);
    m.def(
        "train_esn",
        [](const TimeSeries& s, std::size_t units, double scaling, double leaky, double connectivity,
           double spectral_radius, double ridge, std::size_t washout, std::uint64_t seed) {
            TrainSettings st;
            st.esn_connectivity = connectivity;
            st.esn_spectral_radius = spectral_radius;
            st.esn_ridge = ridge;
            st.esn_washout = washout;
            StreamTask task({s}, st);
            py::gil_scoped_release release;
            return task.fit(EsnHyper{scaling, leaky, units}, all_indices(1), seed);
        },
        py::arg("series"), py::arg("units") = 5, py::arg("scaling") = 0.01, py::arg("leaky") = 0.5,
        py::arg("connectivity") = 0.005, py::arg("spectral_radius") = 0.9, py::arg("ridge") = 1e-6,
        py::arg("washout") = 25, py::arg("seed") = 1);

    m.def(
        "accuracy",
        [](const std::vector<int>& truth, const std::vector<int>& predicted) {
            std::vector<Label> t, p;
            for (int v : truth) t.push_back(to_label(v));
            for (int v : predicted) p.push_back(to_label(v));
            return metrics(confusion(t, p)).accuracy;
        },
        py::arg("truth"), py::arg("predicted"));
    m.def(
        "metrics",
        [](std::size_t tp, std::size_t tn, std::size_t fp, std::size_t fn) {
            const auto r = metrics({tp, tn, fp, fn});
            py::dict d;
            d["accuracy"] = r.accuracy;
            d["precision"] = r.precision;
            d["recall"] = r.recall;
            d["f1"] = r.f1;
            return d;
        },
        py::arg("tp"), py::arg("tn"), py::arg("fp"), py::arg("fn"));
    m.def("kfold_split", &kfold_split, py::arg("n"), py::arg("k") = 10, py::arg("seed") = kDefaultSeed);

    m.def(
        "idnn_footprint_kb",
        [](std::size_t n_in, std::size_t hidden, double bpp) {
            return footprint_from_count(idnn_parameter_count(n_in, hidden), bpp).footprint_kb;
        },
        py::arg("n_in"), py::arg("hidden"), py::arg("bytes_per_param") = kDefaultBytesPerParam);
    m.def(
        "autonomy",
        [](const std::string& mode, double rate, double capacity_bytes) {
            return autonomy_dict(autonomy({capacity_bytes, storage_mode_from_string(mode), rate}));
        },
        py::arg("mode"), py::arg("rate"), py::arg("capacity_bytes") = kDefaultCapacityBytes,
        "Time until storage is full; rate in bytes/s (raw) or bits/s (classified)");

    m.def(
        "run_cli",
        [](const std::vector<std::string>& args) {
            std::ostringstream out, err;
            int code;
            {
                py::gil_scoped_release release;
                code = run_cli(args, out, err);
            }
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"), "Runs the command-line interface in-process; returns (exit_code, stdout, stderr)");
}
