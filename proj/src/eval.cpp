#include "preyclass/eval.hpp"

#include "preyclass/error.hpp"
#include "preyclass/rng.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <map>
#include <mutex>
#include <numeric>
#include <thread>

namespace preyclass {

void ConfusionMatrix::add(Label truth, Label predicted) {
    if (truth == Label::positive) (predicted == Label::positive ? tp : fn)++;
    else (predicted == Label::positive ? fp : tn)++;
}

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& o) {
    tp += o.tp;
    tn += o.tn;
    fp += o.fp;
    fn += o.fn;
    return *this;
}

Metrics metrics(const ConfusionMatrix& cm) {
    if (cm.total() == 0) throw ArgumentError("metrics of an empty confusion matrix");
    const auto d = [](std::size_t v) { return static_cast<double>(v); };
    Metrics m;
    m.accuracy = d(cm.tp + cm.tn) / d(cm.total());
    m.precision = cm.tp + cm.fp == 0 ? 0.0 : d(cm.tp) / d(cm.tp + cm.fp);
    m.recall = cm.tp + cm.fn == 0 ? 0.0 : d(cm.tp) / d(cm.tp + cm.fn);
    m.f1 = m.precision + m.recall == 0.0 ? 0.0 : 2.0 * m.precision * m.recall / (m.precision + m.recall);
    return m;
}

ConfusionMatrix confusion(std::span<const Label> truth, std::span<const Label> predicted) {
    if (truth.size() != predicted.size()) throw ArgumentError("truth and prediction lengths differ");
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < truth.size(); ++i) cm.add(truth[i], predicted[i]);
    return cm;
}

std::vector<std::vector<std::size_t>> kfold_split(std::size_t n, std::size_t k, std::uint64_t seed) {
    if (k < 2 || k > n) throw ArgumentError("need 2 <= k <= n for k-fold (k=" + std::to_string(k) +
                                            ", n=" + std::to_string(n) + ")");
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    Rng rng(seed);
    rng.shuffle(idx);
    std::vector<std::vector<std::size_t>> folds(k);
    for (std::size_t i = 0; i < n; ++i) folds[i % k].push_back(idx[i]);
    for (auto& f : folds) std::sort(f.begin(), f.end());
    return folds;
}

std::vector<std::vector<std::size_t>> stratified_kfold(std::span<const std::size_t> indices,
                                                       std::span<const Label> labels, std::size_t k,
                                                       std::uint64_t seed) {
    if (k < 2 || k > indices.size())
        throw ArgumentError("need 2 <= k <= n for k-fold (k=" + std::to_string(k) +
                            ", n=" + std::to_string(indices.size()) + ")");
    std::vector<std::size_t> pos, neg;
    for (auto i : indices) (labels[i] == Label::positive ? pos : neg).push_back(i);
    Rng rng(seed);
    rng.shuffle(pos);
    rng.shuffle(neg);
    std::vector<std::vector<std::size_t>> folds(k);
    std::size_t slot = 0;
    for (auto i : pos) folds[slot++ % k].push_back(i);
    for (auto i : neg) folds[slot++ % k].push_back(i);
    for (auto& f : folds) std::sort(f.begin(), f.end());
    return folds;
}

TrainTestSplit stratified_split(std::span<const Label> labels, double train_ratio, std::uint64_t seed) {
    if (!(train_ratio > 0.0 && train_ratio < 1.0)) throw ArgumentError("train ratio must be in (0, 1)");
    std::vector<std::size_t> cls[2];
    for (std::size_t i = 0; i < labels.size(); ++i) cls[labels[i] == Label::positive ? 1 : 0].push_back(i);
    Rng rng(seed);
    for (auto& c : cls) rng.shuffle(c);

    // Largest-remainder allocation so the total is exactly round(ratio * n).
    const auto total = static_cast<std::size_t>(std::llround(train_ratio * static_cast<double>(labels.size())));
    std::size_t take[2];
    double frac[2];
    for (int c = 0; c < 2; ++c) {
        const double want = train_ratio * static_cast<double>(cls[c].size());
        take[c] = static_cast<std::size_t>(std::floor(want));
        frac[c] = want - std::floor(want);
    }
    std::size_t left = total - std::min(total, take[0] + take[1]);
    const int order[2] = {frac[1] > frac[0] ? 1 : 0, frac[1] > frac[0] ? 0 : 1};
    for (int c : order)
        if (left > 0 && take[c] < cls[c].size()) {
            ++take[c];
            --left;
        }

    TrainTestSplit s;
    for (int c = 0; c < 2; ++c) {
        s.train.insert(s.train.end(), cls[c].begin(), cls[c].begin() + static_cast<std::ptrdiff_t>(take[c]));
        s.test.insert(s.test.end(), cls[c].begin() + static_cast<std::ptrdiff_t>(take[c]), cls[c].end());
    }
    std::sort(s.train.begin(), s.train.end());
    std::sort(s.test.begin(), s.test.end());
    return s;
}

namespace {

std::string fmt_num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

template <typename T>
void require_nonempty(const std::vector<T>& v, const char* name) {
    if (v.empty()) throw ConfigError(std::string("grid list '") + name + "' is empty");
}

} // namespace

std::string describe(const Hyper& h) {
    return std::visit(
        [](const auto& c) -> std::string {
            using T = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<T, IdnnHyper>)
                return "kind=" + to_string(c.kind) + " hidden=" + std::to_string(c.hidden) + " eta=" + fmt_num(c.eta) +
                       " alpha=" + fmt_num(c.alpha) + " lambda=" + fmt_num(c.lambda);
            else if constexpr (std::is_same_v<T, SvmHyper>)
                return "kernel=" + to_string(c.kernel) + " C=" + fmt_num(c.C);
            else
                return "units=" + std::to_string(c.units) + " scaling=" + fmt_num(c.scaling) +
                       " leaky=" + fmt_num(c.leaky);
        },
        h);
}

GridSpec GridSpec::full(Family f) {
    GridSpec g;
    g.family = f;
    switch (f) {
    case Family::idnn:
        g.kinds = {HiddenKind::sigmoid, HiddenKind::rbf};
        g.hidden = {1, 2, 3, 4, 5, 50, 100};
        g.eta = {0.1, 0.01, 0.001, 0.0001};
        g.alpha = {0.0, 0.0001, 0.001, 0.01, 0.1};
        g.lambda = {0.0, 0.0001, 0.001, 0.01, 0.1};
        break;
    case Family::svm:
        g.kernels = {KernelKind::rbf, KernelKind::linear, KernelKind::poly3};
        g.C = {100, 10, 1, 0.5};
        break;
    case Family::esn:
        g.units = {5, 10, 50, 100};
        g.scaling = {0.01, 0.1, 0.5, 1.0};
        g.leaky = {0.1, 0.3, 0.5, 0.7, 1.0};
        break;
    }
    return g;
}

GridSpec GridSpec::compact(Family f) {
    GridSpec g;
    g.family = f;
    switch (f) {
    case Family::idnn:
        g.kinds = {HiddenKind::sigmoid, HiddenKind::rbf};
        g.hidden = {5, 50};
        g.eta = {0.1};
        g.alpha = {0.0};
        g.lambda = {0.01};
        break;
    case Family::svm:
        g.kernels = {KernelKind::rbf, KernelKind::linear};
        g.C = {10, 1};
        break;
    case Family::esn:
        g.units = {5, 10};
        g.scaling = {0.01, 0.1};
        g.leaky = {0.5, 1.0};
        break;
    }
    return g;
}

void GridSpec::validate() const {
    switch (family) {
    case Family::idnn:
        require_nonempty(kinds, "hidden_kind");
        require_nonempty(hidden, "hidden");
        require_nonempty(eta, "eta");
        require_nonempty(alpha, "alpha");
        require_nonempty(lambda, "lambda");
        break;
    case Family::svm:
        require_nonempty(kernels, "kernel");
        require_nonempty(C, "C");
        break;
    case Family::esn:
        require_nonempty(units, "units");
        require_nonempty(scaling, "scaling");
        require_nonempty(leaky, "leaky");
        break;
    }
}

std::vector<Hyper> GridSpec::cells() const {
    validate();
    std::vector<Hyper> out;
    switch (family) {
    case Family::idnn:
        for (auto k : kinds)
            for (auto h : hidden)
                for (auto e : eta)
                    for (auto a : alpha)
                        for (auto l : lambda) out.push_back(IdnnHyper{k, h, e, a, l});
        break;
    case Family::svm:
        for (auto k : kernels)
            for (auto c : C) out.push_back(SvmHyper{k, c});
        break;
    case Family::esn:
        for (auto u : units)
            for (auto s : scaling)
                for (auto l : leaky) out.push_back(EsnHyper{s, l, u});
        break;
    }
    return out;
}

std::vector<Label> Task::strata() const {
    std::vector<Label> out(size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = stratum(i);
    return out;
}

VectorTask::VectorTask(Family family, std::vector<LabeledVector> rows, bool standardize, TrainSettings settings)
    : family_(family), rows_(std::move(rows)), standardize_(standardize), settings_(std::move(settings)) {
    if (family_ == Family::esn) throw ArgumentError("ESN models are trained on streams, not vectors");
    if (rows_.empty()) throw ArgumentError("empty dataset");
    const auto d = rows_.front().values.size();
    for (const auto& r : rows_)
        if (r.values.size() != d) throw ArgumentError("dataset rows have inconsistent widths");
}

ModelArtifact VectorTask::fit(const Hyper& h, std::span<const std::size_t> idx, std::uint64_t seed) const {
    std::vector<LabeledVector> train;
    train.reserve(idx.size());
    for (auto i : idx) train.push_back(rows_[i]);

    ModelArtifact a;
    if (standardize_) {
        a.standardizer = Standardizer::fit(train);
        train = a.standardizer.apply(train);
    }
    if (const auto* c = std::get_if<IdnnHyper>(&h)) {
        if (family_ != Family::idnn) throw ArgumentError("IDNN hyperparameters given to a non-IDNN task");
        IdnnConfig cfg;
        cfg.n_in = rows_.front().values.size();
        cfg.n_hidden = c->hidden;
        cfg.hidden_kind = c->kind;
        cfg.eta = c->eta;
        cfg.alpha = c->alpha;
        cfg.lambda = c->lambda;
        cfg.epochs = settings_.epochs;
        cfg.seed = seed;
        a.model = IdnnArtifact{cfg, train_rprop(cfg, train).model};
    } else if (const auto* s = std::get_if<SvmHyper>(&h)) {
        if (family_ != Family::svm) throw ArgumentError("SVM hyperparameters given to a non-SVM task");
        KernelSpec k{s->kernel, settings_.svm_sigma, settings_.poly_c};
        SmoOptions opt = settings_.smo;
        opt.seed = seed;
        a.model = train_smo(train, k, s->C, opt);
    } else {
        throw ArgumentError("ESN hyperparameters given to a vector task");
    }
    return a;
}

ConfusionMatrix VectorTask::evaluate(const ModelArtifact& m, std::span<const std::size_t> idx) const {
    ConfusionMatrix cm;
    for (auto i : idx) cm.add(rows_[i].label, predict(m, rows_[i].values));
    return cm;
}

StreamTask::StreamTask(std::vector<TimeSeries> segments, TrainSettings settings)
    : segments_(std::move(segments)), settings_(std::move(settings)) {
    if (segments_.empty()) throw ArgumentError("no stream segments");
    for (const auto& s : segments_) {
        std::vector<Label> labels;
        labels.reserve(s.size());
        for (const auto& x : s.samples()) labels.push_back(x.label);
        strata_.push_back(labels.empty() ? Label::negative : label_window(labels));
    }
}

ModelArtifact StreamTask::fit(const Hyper& h, std::span<const std::size_t> idx, std::uint64_t seed) const {
    const auto* c = std::get_if<EsnHyper>(&h);
    if (!c) throw ArgumentError("stream tasks take ESN hyperparameters");
    EsnConfig cfg;
    cfg.n_reservoir = c->units;
    cfg.input_scaling = c->scaling;
    cfg.leaky = c->leaky;
    cfg.connectivity = settings_.esn_connectivity;
    cfg.spectral_radius = settings_.esn_spectral_radius;
    cfg.ridge_beta = settings_.esn_ridge;
    cfg.washout = settings_.esn_washout;
    cfg.seed = seed;
    std::vector<TimeSeries> train;
    train.reserve(idx.size());
    std::size_t positives = 0, negatives = 0;
    for (auto i : idx) {
        train.push_back(segments_[i]);
        positives += segments_[i].count(Label::positive);
        negatives += segments_[i].count(Label::negative);
    }
    if (positives == 0 || negatives == 0) throw TrainingError("training streams contain a single class");
    ModelArtifact a;
    a.model = fit_readout(init_esn(cfg), train);
    return a;
}

ConfusionMatrix StreamTask::evaluate(const ModelArtifact& m, std::span<const std::size_t> idx) const {
    const auto* esn = std::get_if<EsnModel>(&m.model);
    if (!esn) throw ArgumentError("stream tasks evaluate ESN models");
    ConfusionMatrix cm;
    for (auto i : idx) {
        const auto& s = segments_[i];
        const auto pred = classify_stream(*esn, s);
        for (std::size_t t = esn->config.washout; t < s.size(); ++t) cm.add(s[t].label, pred[t]);
    }
    return cm;
}

void parallel_for(std::size_t n, std::size_t jobs, const std::function<void(std::size_t)>& fn) {
    jobs = std::max<std::size_t>(1, std::min(jobs, n));
    if (jobs == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex mu;
    std::vector<std::thread> workers;
    for (std::size_t w = 0; w < jobs; ++w)
        workers.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(mu);
                    if (!first_error) first_error = std::current_exception();
                }
            }
        });
    for (auto& t : workers) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

GridResult grid_search(const Task& task, std::span<const Hyper> cells, std::span<const std::size_t> train_idx,
                       std::size_t k, std::uint64_t seed, std::size_t jobs) {
    if (cells.empty()) throw ConfigError("empty grid");
    const auto labels = task.strata();
    const auto folds = stratified_kfold(train_idx, labels, k, seed);

    struct FoldOutcome {
        bool ok = false;
        double acc = 0.0, kb = 0.0;
        std::string error;
    };
    std::vector<FoldOutcome> outcomes(cells.size() * k);
    parallel_for(outcomes.size(), jobs, [&](std::size_t unit) {
        const std::size_t cell = unit / k, fold = unit % k;
        std::vector<std::size_t> fit_idx;
        for (std::size_t f = 0; f < k; ++f)
            if (f != fold) fit_idx.insert(fit_idx.end(), folds[f].begin(), folds[f].end());
        std::sort(fit_idx.begin(), fit_idx.end());
        FoldOutcome& out = outcomes[unit];
        try {
            const auto model = task.fit(cells[cell], fit_idx, derive_seed(seed, fold));
            out.acc = metrics(task.evaluate(model, folds[fold])).accuracy;
            out.kb = footprint(model).footprint_kb;
            out.ok = true;
        } catch (const Error& e) {
            out.error = e.what();
        }
    });

    GridResult res;
    res.table.reserve(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) {
        CellResult r;
        r.hyper = cells[c];
        std::size_t ok = 0;
        for (std::size_t f = 0; f < k; ++f) {
            const auto& o = outcomes[c * k + f];
            if (o.ok) {
                r.mean_val_acc += o.acc;
                r.footprint_kb += o.kb;
                ++ok;
            } else {
                ++r.failed_folds;
                r.error = o.error;
            }
        }
        if (ok == 0) r.excluded = true;
        else {
            r.mean_val_acc /= static_cast<double>(ok);
            r.footprint_kb /= static_cast<double>(ok);
        }
        res.table.push_back(std::move(r));
    }

    bool found = false;
    for (std::size_t c = 0; c < res.table.size(); ++c) {
        const auto& r = res.table[c];
        if (r.excluded) continue;
        if (!found) {
            res.best = c;
            found = true;
            continue;
        }
        const auto& b = res.table[res.best];
        if (r.mean_val_acc > b.mean_val_acc || (r.mean_val_acc == b.mean_val_acc && r.footprint_kb < b.footprint_kb))
            res.best = c;
    }
    if (!found) throw TrainingError("every grid cell failed on every fold: " + res.table.back().error);
    return res;
}

namespace {

void mean_std(const std::vector<double>& v, double& mean, double& std) {
    mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    std = std::sqrt(ss / static_cast<double>(v.size()));
}

} // namespace

EvaluationReport split_average(const Task& task, const GridSpec& grid, const SplitOptions& opt) {
    if (grid.family != task.family()) throw ConfigError("grid family does not match the dataset task");
    if (opt.n_splits < 1) throw ConfigError("need at least one split");
    const auto cells = grid.cells();
    const auto labels = task.strata();
    if (std::find(labels.begin(), labels.end(), Label::positive) == labels.end() ||
        std::find(labels.begin(), labels.end(), Label::negative) == labels.end())
        throw TrainingError("dataset contains a single class");

    EvaluationReport rep;
    rep.family = task.family();
    std::vector<double> accs, f1s;
    for (std::size_t s = 0; s < opt.n_splits; ++s) {
        const std::uint64_t split_seed = derive_seed(opt.seed, s);
        const auto split = stratified_split(labels, opt.train_ratio, split_seed);
        const auto gr = grid_search(task, cells, split.train, opt.folds, split_seed, opt.jobs);

        SplitResult r;
        r.seed = split_seed;
        r.selected = gr.selected().hyper;
        r.mean_val_acc = gr.selected().mean_val_acc;
        const auto model = task.fit(r.selected, split.train, derive_seed(split_seed, opt.folds));
        r.test_cm = task.evaluate(model, split.test);
        r.test = metrics(r.test_cm);
        r.footprint_kb = footprint(model).footprint_kb;
        r.n_train = split.train.size();
        r.n_test = split.test.size();
        r.cv_table = gr.table;
        accs.push_back(r.test.accuracy);
        f1s.push_back(r.test.f1);
        rep.splits.push_back(std::move(r));
    }
    mean_std(accs, rep.acc_mean, rep.acc_std);
    mean_std(f1s, rep.f1_mean, rep.f1_std);
    return rep;
}

Hyper EvaluationReport::selected() const {
    if (splits.empty()) throw StateError("empty evaluation report");
    std::size_t best = 0, best_count = 0;
    for (std::size_t i = 0; i < splits.size(); ++i) {
        const auto count = static_cast<std::size_t>(std::count_if(
            splits.begin(), splits.end(), [&](const SplitResult& s) { return s.selected == splits[i].selected; }));
        if (count > best_count) {
            best = i;
            best_count = count;
        }
    }
    return splits[best].selected;
}

double EvaluationReport::mean_footprint_kb() const {
    double s = 0.0;
    for (const auto& r : splits) s += r.footprint_kb;
    return splits.empty() ? 0.0 : s / static_cast<double>(splits.size());
}

double EvaluationReport::mean_val_acc() const {
    double s = 0.0;
    for (const auto& r : splits) s += r.mean_val_acc;
    return splits.empty() ? 0.0 : s / static_cast<double>(splits.size());
}

} // namespace preyclass
