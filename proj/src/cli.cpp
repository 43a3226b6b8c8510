#include "preyclass/cli.hpp"

#include "preyclass/artifact.hpp"
#include "preyclass/budget.hpp"
#include "preyclass/data.hpp"
#include "preyclass/error.hpp"
#include "preyclass/eval.hpp"
#include "preyclass/features.hpp"
#include "preyclass/report.hpp"
#include "preyclass/windowing.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>

namespace preyclass {

namespace {

namespace fs = std::filesystem;

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

bool is_stdout(const std::string& path) { return path.empty() || path == "-"; }

void check_distinct(const std::string& in, const std::string& out) {
    if (is_stdout(out) || in.empty()) return;
    std::error_code ec;
    if (in == out || (fs::exists(out, ec) && fs::equivalent(in, out, ec)))
        throw UsageError("input and output paths must differ");
}

void write_output(const std::string& path, std::ostream& out, const std::function<void(std::ostream&)>& fn) {
    if (is_stdout(path)) {
        fn(out);
        return;
    }
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("cannot open '" + path + "' for writing");
    fn(f);
    f.flush();
    if (!f) throw Error("failed writing '" + path + "'");
}

std::ifstream open_input(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open '" + path + "' for reading");
    return f;
}

TimeSeries load_series(const std::string& path) {
    auto f = open_input(path);
    return parse_csv(f);
}

VectorTable load_vectors(const std::string& path) {
    auto f = open_input(path);
    return read_vectors_csv(f);
}

bool resolve_standardize(const std::string& mode, const VectorTable& table) {
    if (mode == "on") return true;
    if (mode == "off") return false;
    return table.prefix == "f";
}

struct EsnFlags {
    std::size_t units = 5;
    double scaling = 0.01;
    double leaky = 0.5;
    double connectivity = 0.005;
    double spectral_radius = 0.9;
    double ridge = 1e-6;
    std::size_t washout = 25;

    void add(CLI::App* app, bool with_hyper) {
        if (with_hyper) {
            app->add_option("--units", units, "Reservoir units")->capture_default_str();
            app->add_option("--scaling", scaling, "Input scaling")->capture_default_str();
            app->add_option("--leaky", leaky, "Leak rate in (0, 1]")->capture_default_str();
        }
        app->add_option("--connectivity", connectivity, "Fraction of nonzero recurrent weights")->capture_default_str();
        app->add_option("--spectral-radius", spectral_radius, "Target spectral radius")->capture_default_str();
        app->add_option("--ridge", ridge, "Readout ridge regularizer")->capture_default_str();
        app->add_option("--washout", washout, "Steps excluded from readout fitting")->capture_default_str();
    }
};

struct Options {
    // shared
    std::string in, out, format = "csv";
    std::uint64_t seed = kDefaultSeed;
    // synth
    SynthConfig synth;
    // window
    WindowConfig window;
    bool balance = true;
    // train / select
    std::string family = "idnn";
    std::string standardize = "auto";
    std::size_t hidden = 5;
    std::string kind = "sigmoid";
    double eta = 0.1, alpha = 0.0, lambda = 0.0;
    std::size_t epochs = 1000;
    std::string kernel = "rbf";
    double C = 10.0, sigma = 1.0;
    EsnFlags esn;
    std::string grid = "compact";
    std::size_t folds = 10, splits = 5, jobs = 1;
    double ratio = 0.7;
    double segment_s = 30.0;
    std::string cv_out;
    // footprint
    std::string model;
    std::size_t inputs = 0, n_sv = 0, dim = 0;
    double bytes_per_param = kDefaultBytesPerParam;
    // autonomy
    double capacity_mib = 8.0;
    std::string mode;
    double bytes_per_s = 0.0, bits_per_s = 0.0;
    // report
    std::string out_dir;
    std::vector<std::string> reports;
};

void add_seed(CLI::App* app, std::uint64_t& seed) {
    app->add_option("--seed", seed, "Random seed")->envname(kSeedEnv)->capture_default_str();
}

void add_format(CLI::App* app, std::string& format) {
    app->add_option("--format", format, "Report format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
}

TrainSettings settings_from(const Options& o) {
    TrainSettings s;
    s.epochs = o.epochs;
    s.svm_sigma = o.sigma;
    s.esn_connectivity = o.esn.connectivity;
    s.esn_spectral_radius = o.esn.spectral_radius;
    s.esn_ridge = o.esn.ridge;
    s.esn_washout = o.esn.washout;
    return s;
}

void cmd_synth(const Options& o, std::ostream& out) {
    SynthConfig cfg = o.synth;
    cfg.seed = o.seed;
    const auto series = synthesize(cfg);
    write_output(o.out, out, [&](std::ostream& s) { emit_csv(series, s); });
}

void cmd_window(const Options& o, std::ostream& out) {
    check_distinct(o.in, o.out);
    const auto series = load_series(o.in);
    WindowConfig cfg = o.window;
    cfg.rate = series.rate();
    auto windows = segment(series, cfg);
    if (o.balance) windows = balance(windows, o.seed);
    write_output(o.out, out, [&](std::ostream& s) { write_vectors_csv(windows, "v", s); });
}

void cmd_featurize(const Options& o, std::ostream& out) {
    check_distinct(o.in, o.out);
    const auto table = load_vectors(o.in);
    if (table.prefix != "v") throw ArgumentError("featurize expects a windows table (columns v1..vN)");
    const auto features = extract_all(table.rows);
    write_output(o.out, out, [&](std::ostream& s) { write_vectors_csv(features, "f", s); });
}

Hyper hyper_from(const Options& o, Family f) {
    switch (f) {
    case Family::idnn: return IdnnHyper{hidden_kind_from_string(o.kind), o.hidden, o.eta, o.alpha, o.lambda};
    case Family::svm: return SvmHyper{kernel_kind_from_string(o.kernel), o.C};
    case Family::esn: return EsnHyper{o.esn.scaling, o.esn.leaky, o.esn.units};
    }
    throw ArgumentError("unknown family");
}

void cmd_train(const Options& o, std::ostream& out) {
    check_distinct(o.in, o.out);
    const Family fam = family_from_string(o.family);
    ModelArtifact artifact;
    if (fam == Family::esn) {
        const auto series = load_series(o.in);
        StreamTask task({series}, settings_from(o));
        const std::size_t idx[] = {0};
        artifact = task.fit(hyper_from(o, fam), idx, o.seed);
    } else {
        auto table = load_vectors(o.in);
        const bool standardize = resolve_standardize(o.standardize, table);
        VectorTask task(fam, std::move(table.rows), standardize, settings_from(o));
        std::vector<std::size_t> idx(task.size());
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
        artifact = task.fit(hyper_from(o, fam), idx, o.seed);
    }
    write_output(o.out, out, [&](std::ostream& s) { save_artifact(artifact, s); });
}

void cmd_select(const Options& o, std::ostream& out) {
    check_distinct(o.in, o.out);
    check_distinct(o.in, o.cv_out);
    const Family fam = family_from_string(o.family);
    const GridSpec grid = o.grid == "full" ? GridSpec::full(fam) : GridSpec::compact(fam);
    SplitOptions so;
    so.n_splits = o.splits;
    so.train_ratio = o.ratio;
    so.folds = o.folds;
    so.seed = o.seed;
    so.jobs = std::max<std::size_t>(1, o.jobs);

    EvaluationReport rep;
    if (fam == Family::esn) {
        const auto series = load_series(o.in);
        const auto chunk = static_cast<std::size_t>(std::llround(o.segment_s * series.rate()));
        StreamTask task(split_stream(series, std::max<std::size_t>(1, chunk)), settings_from(o));
        rep = split_average(task, grid, so);
    } else {
        auto table = load_vectors(o.in);
        const bool standardize = resolve_standardize(o.standardize, table);
        VectorTask task(fam, std::move(table.rows), standardize, settings_from(o));
        rep = split_average(task, grid, so);
    }
    write_output(o.out, out, [&](std::ostream& s) {
        if (o.format == "json") s << report_to_json(rep).dump(2) << '\n';
        else write_report_csv(rep, s);
    });
    if (!o.cv_out.empty()) write_output(o.cv_out, out, [&](std::ostream& s) { write_cv_table_csv(rep, s); });
}

void cmd_footprint(const Options& o, std::ostream& out, bool family_given) {
    std::vector<FootprintRow> rows;
    if (!o.model.empty()) {
        auto f = open_input(o.model);
        const auto a = load_artifact(f);
        rows.push_back({o.model, footprint(a, o.bytes_per_param), {}, {}});
    } else if (family_given) {
        const Family fam = family_from_string(o.family);
        std::size_t count = 0;
        std::string name;
        switch (fam) {
        case Family::idnn:
            if (o.inputs == 0) throw UsageError("footprint --family idnn needs --inputs and --hidden");
            count = idnn_parameter_count(o.inputs, o.hidden);
            name = "idnn " + std::to_string(o.inputs) + "-" + std::to_string(o.hidden) + "-1";
            break;
        case Family::svm:
            if (o.dim == 0) throw UsageError("footprint --family svm needs --n-sv and --dim");
            count = svm_parameter_count(o.n_sv, o.dim);
            name = "svm " + std::to_string(o.n_sv) + " x " + std::to_string(o.dim);
            break;
        case Family::esn: {
            EsnConfig cfg;
            cfg.n_reservoir = o.esn.units;
            cfg.connectivity = o.esn.connectivity;
            cfg.validate();
            count = esn_parameter_count(o.esn.units * kChannels, cfg.recurrent_nnz(), o.esn.units);
            name = "esn " + std::to_string(o.esn.units) + " units, connectivity " + format_number(o.esn.connectivity);
            break;
        }
        }
        rows.push_back({name, footprint_from_count(count, o.bytes_per_param), {}, {}});
    } else {
        rows = reference_footprint_rows(o.bytes_per_param, o.esn.connectivity);
    }
    write_output(o.out, out, [&](std::ostream& s) {
        if (o.format == "json") s << footprint_to_json(rows).dump(2) << '\n';
        else write_footprint_csv(rows, s);
    });
}

void cmd_autonomy(const Options& o, std::ostream& out, bool window_given) {
    const double capacity = o.capacity_mib * 1024.0 * 1024.0;
    std::vector<AutonomyRow> rows;
    if (o.mode.empty()) {
        rows = reference_autonomy_rows(capacity);
    } else {
        StorageScenario s;
        s.capacity_bytes = capacity;
        s.mode = storage_mode_from_string(o.mode);
        if (s.mode == StorageMode::raw_logging) {
            s.rate = o.bytes_per_s;
        } else if (o.bits_per_s > 0.0 || !window_given) {
            s.rate = o.bits_per_s;
        } else {
            s.rate = classification_rate(o.window);
        }
        rows.push_back({to_string(s.mode), s, autonomy(s)});
    }
    write_output(o.out, out, [&](std::ostream& s) {
        if (o.format == "json") s << autonomy_to_json(rows).dump(2) << '\n';
        else write_autonomy_csv(rows, s);
    });
}

void cmd_report(const Options& o) {
    fs::create_directories(o.out_dir);
    const bool json_out = o.format == "json";
    const std::string ext = json_out ? ".json" : ".csv";

    std::vector<nlohmann::json> reports;
    for (const auto& path : o.reports) {
        auto f = open_input(path);
        nlohmann::json j;
        try {
            f >> j;
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(1, "'" + path + "' is not a JSON evaluation report: " + e.what());
        }
        if (!j.contains("family") || !j.contains("selected")) throw ParseError(0, "'" + path + "' is not an evaluation report");
        reports.push_back(std::move(j));
    }

    auto footprints = reference_footprint_rows(kDefaultBytesPerParam, o.esn.connectivity);
    for (const auto& j : reports) {
        std::string cfg = j.at("family").get<std::string>() + " selected:";
        for (auto& [k, v] : j.at("selected").items()) cfg += " " + k + "=" + v.get<std::string>();
        FootprintRow row{cfg, footprint_from_count(0), j.at("test_acc").get<double>(), j.at("test_f1").get<double>()};
        row.fp.footprint_kb = j.at("footprint_kb").get<double>();
        row.fp.parameter_count = static_cast<std::size_t>(std::llround(row.fp.footprint_kb * 1024.0 / row.fp.bytes_per_param));
        footprints.push_back(row);
    }
    write_output((fs::path(o.out_dir) / ("footprint" + ext)).string(), std::cout, [&](std::ostream& s) {
        if (json_out) s << footprint_to_json(footprints).dump(2) << '\n';
        else write_footprint_csv(footprints, s);
    });

    const auto autonomy_rows = reference_autonomy_rows(o.capacity_mib * 1024.0 * 1024.0);
    write_output((fs::path(o.out_dir) / ("autonomy" + ext)).string(), std::cout, [&](std::ostream& s) {
        if (json_out) s << autonomy_to_json(autonomy_rows).dump(2) << '\n';
        else write_autonomy_csv(autonomy_rows, s);
    });

    write_output((fs::path(o.out_dir) / ("selection" + ext)).string(), std::cout, [&](std::ostream& s) {
        if (json_out) {
            s << nlohmann::json(reports).dump(2) << '\n';
            return;
        }
        s << "family,hyperparameters,mean_val_acc,test_acc,test_f1,acc_std,f1_std,footprint_kb\n";
        for (const auto& j : reports) {
            std::string hp;
            for (auto& [k, v] : j.at("selected").items()) hp += (hp.empty() ? "" : ";") + k + "=" + v.get<std::string>();
            s << j.at("family").get<std::string>() << ',' << hp << ',' << format_number(j.at("mean_val_acc").get<double>())
              << ',' << format_number(j.at("test_acc").get<double>()) << ','
              << format_number(j.at("test_f1").get<double>()) << ',' << format_number(j.at("acc_std").get<double>())
              << ',' << format_number(j.at("f1_std").get<double>()) << ','
              << format_number(j.at("footprint_kb").get<double>()) << '\n';
        }
    });
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"On-board prey-handling classification: data, training, selection and memory budgets", "preyclass"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_config("--config", "", "Read flags from a TOML/INI file (command-line flags take precedence)");

    Options o;

    auto* synth = app.add_subcommand("synth", "Generate a synthetic labeled stream (CSV)");
    synth->add_option("--out", o.out, "Output CSV path (default stdout)");
    synth->add_option("--duration", o.synth.duration, "Seconds of data")->capture_default_str();
    synth->add_option("--rate", o.synth.rate, "Sampling rate in Hz")->capture_default_str();
    synth->add_option("--bout-mean", o.synth.bout_mean, "Mean prey-handling bout length (s)")->capture_default_str();
    synth->add_option("--bout-min", o.synth.bout_min, "Minimum bout length (s)")->capture_default_str();
    synth->add_option("--swim-mean", o.synth.swim_mean, "Mean swimming segment length (s)")->capture_default_str();
    synth->add_option("--swim-min", o.synth.swim_min, "Minimum swimming segment length (s)")->capture_default_str();
    synth->add_option("--burst-amp", o.synth.burst_amp, "Burst amplitude (g)")->capture_default_str();
    synth->add_option("--noise-std", o.synth.noise_std, "Accelerometer noise std (g)")->capture_default_str();
    add_seed(synth, o.seed);

    auto* window = app.add_subcommand("window", "Cut a stream CSV into labeled windows");
    window->add_option("--in", o.in, "Input stream CSV")->required();
    window->add_option("--out", o.out, "Output windows CSV (default stdout)");
    window->add_option("--window-s", o.window.window_seconds, "Window length (s)")->capture_default_str();
    window->add_option("--overlap-s", o.window.overlap_seconds, "Overlap between windows (s)")->capture_default_str();
    window->add_flag("--balance,!--no-balance", o.balance, "Undersample the majority class (default on)");
    add_seed(window, o.seed);

    auto* featurize = app.add_subcommand("featurize", "Extract the 30 statistical features of every window");
    featurize->add_option("--in", o.in, "Input windows CSV")->required();
    featurize->add_option("--out", o.out, "Output features CSV (default stdout)");

    auto add_family = [&](CLI::App* sub) {
        sub->add_option("--family", o.family, "Model family")->check(CLI::IsMember({"idnn", "svm", "esn"}))->required();
    };
    auto add_training_flags = [&](CLI::App* sub) {
        sub->add_option("--epochs", o.epochs, "IDNN training epochs")->capture_default_str();
        sub->add_option("--sigma", o.sigma, "RBF kernel width for the SVM")->capture_default_str();
        sub->add_option("--standardize", o.standardize, "Standardize inputs: auto (features only), on, off")
            ->check(CLI::IsMember({"auto", "on", "off"}))
            ->capture_default_str();
    };

    auto* train = app.add_subcommand("train", "Train one model and write its JSON artifact");
    add_family(train);
    train->add_option("--in", o.in, "Windows/features CSV (idnn, svm) or stream CSV (esn)")->required();
    train->add_option("--out", o.out, "Output model JSON (default stdout)");
    train->add_option("--hidden", o.hidden, "IDNN hidden units")->capture_default_str();
    train->add_option("--kind", o.kind, "IDNN hidden kind")->check(CLI::IsMember({"sigmoid", "rbf"}))->capture_default_str();
    train->add_option("--eta", o.eta, "IDNN Rprop initial step")->capture_default_str();
    train->add_option("--alpha", o.alpha, "IDNN momentum (gradient-descent trainer only)")->capture_default_str();
    train->add_option("--lambda", o.lambda, "IDNN weight decay")->capture_default_str();
    train->add_option("--kernel", o.kernel, "SVM kernel")->check(CLI::IsMember({"linear", "rbf", "poly3"}))->capture_default_str();
    train->add_option("-C,--C", o.C, "SVM soft-margin constant")->capture_default_str();
    add_training_flags(train);
    o.esn.add(train, true);
    add_seed(train, o.seed);

    auto* select = app.add_subcommand("select", "Grid search with k-fold CV averaged over random 70/30 splits");
    add_family(select);
    select->add_option("--in", o.in, "Windows/features CSV (idnn, svm) or stream CSV (esn)")->required();
    select->add_option("--out", o.out, "Evaluation report path (default stdout)");
    select->add_option("--cv-out", o.cv_out, "Also write the per-cell CV table (CSV)");
    add_format(select, o.format);
    select->add_option("--grid", o.grid, "Candidate grid")->check(CLI::IsMember({"compact", "full"}))->capture_default_str();
    select->add_option("--folds", o.folds, "Cross-validation folds")->capture_default_str();
    select->add_option("--splits", o.splits, "Random train/test splits")->capture_default_str();
    select->add_option("--ratio", o.ratio, "Training fraction of each split")->capture_default_str();
    select->add_option("--jobs", o.jobs, "Worker threads for grid cells")->capture_default_str();
    select->add_option("--segment-s", o.segment_s, "ESN: stream segment length used as the CV unit (s)")->capture_default_str();
    add_training_flags(select);
    o.esn.add(select, false);
    add_seed(select, o.seed);

    auto* fp = app.add_subcommand("footprint", "Memory footprint of a model artifact or architecture");
    fp->add_option("--model", o.model, "Model artifact JSON");
    auto* fp_family = fp->add_option("--family", o.family, "Architecture family (without --model)")
                          ->check(CLI::IsMember({"idnn", "svm", "esn"}));
    fp->add_option("--inputs", o.inputs, "IDNN input width");
    fp->add_option("--hidden", o.hidden, "IDNN hidden units")->capture_default_str();
    fp->add_option("--n-sv", o.n_sv, "SVM support vectors");
    fp->add_option("--dim", o.dim, "SVM input dimension");
    fp->add_option("--units", o.esn.units, "ESN reservoir units")->capture_default_str();
    fp->add_option("--connectivity", o.esn.connectivity, "ESN recurrent connectivity")->capture_default_str();
    fp->add_option("--bytes-per-param", o.bytes_per_param, "Bytes per stored parameter")->capture_default_str();
    fp->add_option("--out", o.out, "Output path (default stdout)");
    add_format(fp, o.format);

    auto* au = app.add_subcommand("autonomy", "Time until on-board storage is full");
    au->add_option("--capacity-mib", o.capacity_mib, "Storage capacity in MiB")->capture_default_str();
    au->add_option("--mode", o.mode, "raw or classified (omit for the reference scenarios)")
        ->check(CLI::IsMember({"raw", "classified"}));
    au->add_option("--bytes-per-s", o.bytes_per_s, "Raw logging rate (bytes/s)");
    au->add_option("--bits-per-s", o.bits_per_s, "Classified output rate (bits/s)");
    auto* au_window = au->add_option("--window-s", o.window.window_seconds, "Derive bits/s from a window length");
    au->add_option("--overlap-s", o.window.overlap_seconds, "... and its overlap")->capture_default_str();
    au->add_option("--out", o.out, "Output path (default stdout)");
    add_format(au, o.format);

    auto* rep = app.add_subcommand("report", "Write footprint, autonomy and selection tables to a directory");
    rep->add_option("--out-dir", o.out_dir, "Output directory")->required();
    rep->add_option("--reports", o.reports, "Evaluation reports written by `select --format json`");
    rep->add_option("--capacity-mib", o.capacity_mib, "Storage capacity in MiB")->capture_default_str();
    rep->add_option("--connectivity", o.esn.connectivity, "ESN recurrent connectivity")->capture_default_str();
    add_format(rep, o.format);

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            app.exit(e, out, err);
            return 0;
        }
        err << "error: " << e.what() << '\n';
        const CLI::App* which = &app;
        for (auto* sub : app.get_subcommands()) which = sub;
        err << which->help();
        return 2;
    }

    try {
        if (synth->parsed()) cmd_synth(o, out);
        else if (window->parsed()) cmd_window(o, out);
        else if (featurize->parsed()) cmd_featurize(o, out);
        else if (train->parsed()) cmd_train(o, out);
        else if (select->parsed()) cmd_select(o, out);
        else if (fp->parsed()) cmd_footprint(o, out, fp_family->count() > 0);
        else if (au->parsed()) cmd_autonomy(o, out, au_window->count() > 0);
        else if (rep->parsed()) cmd_report(o);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

} // namespace preyclass
