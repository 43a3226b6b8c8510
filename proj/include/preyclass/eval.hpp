#pragma once

#include "preyclass/artifact.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace preyclass {

struct ConfusionMatrix {
    std::size_t tp = 0, tn = 0, fp = 0, fn = 0;

    void add(Label truth, Label predicted);
    std::size_t total() const { return tp + tn + fp + fn; }
    ConfusionMatrix& operator+=(const ConfusionMatrix& o);
    bool operator==(const ConfusionMatrix&) const = default;
};

struct Metrics {
    double accuracy = 0, precision = 0, recall = 0, f1 = 0;
};

/// F1 is the harmonic mean 2PR / (P + R). Zero denominators give 0.
/// Throws ArgumentError on an empty matrix.
Metrics metrics(const ConfusionMatrix& cm);

/// k disjoint folds covering 0..n-1 with sizes differing by at most one.
std::vector<std::vector<std::size_t>> kfold_split(std::size_t n, std::size_t k, std::uint64_t seed);

/// Folds over `indices`, stratified by label: each class is shuffled and dealt
/// round-robin, so fold sizes still differ by at most one.
std::vector<std::vector<std::size_t>> stratified_kfold(std::span<const std::size_t> indices,
                                                       std::span<const Label> labels, std::size_t k,
                                                       std::uint64_t seed);

struct TrainTestSplit {
    std::vector<std::size_t> train, test;
};

/// Stratified split with round(ratio * n) training examples in total.
TrainTestSplit stratified_split(std::span<const Label> labels, double train_ratio, std::uint64_t seed);

// Hyperparameter cells --------------------------------------------------------

struct IdnnHyper {
    HiddenKind kind = HiddenKind::sigmoid;
    std::size_t hidden = 5;
    double eta = 0.1, alpha = 0.0, lambda = 0.0;
    bool operator==(const IdnnHyper&) const = default;
};

struct SvmHyper {
    KernelKind kernel = KernelKind::rbf;
    double C = 10.0;
    bool operator==(const SvmHyper&) const = default;
};

struct EsnHyper {
    double scaling = 0.01, leaky = 0.5;
    std::size_t units = 5;
    bool operator==(const EsnHyper&) const = default;
};

using Hyper = std::variant<IdnnHyper, SvmHyper, EsnHyper>;

std::string describe(const Hyper& h);

/// Candidate lists per family. cells() enumerates the cartesian product; the
/// last listed parameter varies fastest.
struct GridSpec {
    Family family = Family::idnn;
    // idnn
    std::vector<HiddenKind> kinds;
    std::vector<std::size_t> hidden;
    std::vector<double> eta, alpha, lambda;
    // svm
    std::vector<KernelKind> kernels;
    std::vector<double> C;
    // esn
    std::vector<double> scaling, leaky;
    std::vector<std::size_t> units;

    /// The full candidate sets of the validation schema (IDNN: 1400 cells,
    /// SVM: 12, ESN: 80 after discretizing the continuous ranges).
    static GridSpec full(Family f);
    /// A small subset of the full grid that runs in about a minute on the
    /// default synthetic data.
    static GridSpec compact(Family f);

    void validate() const; // throws ConfigError on an empty list
    std::vector<Hyper> cells() const;
};

// Tasks --------------------------------------------------------------------------

/// Settings shared by every fit in a selection run.
struct TrainSettings {
    std::size_t epochs = 1000;
    double svm_sigma = 1.0;
    double poly_c = 1.0;
    SmoOptions smo;
    double esn_connectivity = 0.005;
    double esn_spectral_radius = 0.9;
    double esn_ridge = 1e-6;
    std::size_t esn_washout = 25;
};

/// A dataset plus the family-specific recipe to fit and score a model on a
/// subset of its examples.
class Task {
public:
    virtual ~Task() = default;
    virtual Family family() const = 0;
    virtual std::size_t size() const = 0;
    /// Class used for stratification.
    virtual Label stratum(std::size_t i) const = 0;
    virtual ModelArtifact fit(const Hyper& h, std::span<const std::size_t> idx, std::uint64_t seed) const = 0;
    virtual ConfusionMatrix evaluate(const ModelArtifact& m, std::span<const std::size_t> idx) const = 0;

    std::vector<Label> strata() const;
};

/// IDNN or SVM over labeled vectors. With `standardize`, a Standardizer is fit
/// on each training subset and stored in the artifact.
class VectorTask final : public Task {
public:
    VectorTask(Family family, std::vector<LabeledVector> rows, bool standardize, TrainSettings settings = {});

    Family family() const override { return family_; }
    std::size_t size() const override { return rows_.size(); }
    Label stratum(std::size_t i) const override { return rows_[i].label; }
    ModelArtifact fit(const Hyper& h, std::span<const std::size_t> idx, std::uint64_t seed) const override;
    ConfusionMatrix evaluate(const ModelArtifact& m, std::span<const std::size_t> idx) const override;

private:
    Family family_;
    std::vector<LabeledVector> rows_;
    bool standardize_;
    TrainSettings settings_;
};

/// ESN over stream segments. Each segment starts from the zero state; its
/// first `washout` steps are excluded from fitting and scoring.
class StreamTask final : public Task {
public:
    StreamTask(std::vector<TimeSeries> segments, TrainSettings settings = {});

    Family family() const override { return Family::esn; }
    std::size_t size() const override { return segments_.size(); }
    Label stratum(std::size_t i) const override { return strata_[i]; }
    ModelArtifact fit(const Hyper& h, std::span<const std::size_t> idx, std::uint64_t seed) const override;
    ConfusionMatrix evaluate(const ModelArtifact& m, std::span<const std::size_t> idx) const override;

private:
    std::vector<TimeSeries> segments_;
    std::vector<Label> strata_;
    TrainSettings settings_;
};

ConfusionMatrix confusion(std::span<const Label> truth, std::span<const Label> predicted);

// Selection ----------------------------------------------------------------------

struct CellResult {
    Hyper hyper;
    double mean_val_acc = 0.0;
    double footprint_kb = 0.0; // mean over the folds that trained
    std::size_t failed_folds = 0;
    std::string error;         // last fold error message, if any
    bool excluded = false;     // failed on every fold
};

struct GridResult {
    std::vector<CellResult> table; // in grid order
    std::size_t best = 0;
    const CellResult& selected() const { return table[best]; }
};

/// k-fold CV over `train_idx` for every cell. Selects the highest mean
/// validation accuracy; ties go to the smaller footprint, then grid order.
/// Fold models are seeded identically for every cell. `jobs` bounds the worker
/// threads; the result does not depend on it.
GridResult grid_search(const Task& task, std::span<const Hyper> cells, std::span<const std::size_t> train_idx,
                       std::size_t k, std::uint64_t seed, std::size_t jobs = 1);

struct SplitResult {
    std::uint64_t seed = 0;
    Hyper selected;
    double mean_val_acc = 0.0;
    ConfusionMatrix test_cm;
    Metrics test;
    double footprint_kb = 0.0;
    std::size_t n_train = 0, n_test = 0;
    std::vector<CellResult> cv_table;
};

struct EvaluationReport {
    Family family = Family::idnn;
    std::vector<SplitResult> splits;
    double acc_mean = 0, acc_std = 0, f1_mean = 0, f1_std = 0;
    /// Most frequently selected cell; ties go to the earliest split.
    Hyper selected() const;
    double mean_footprint_kb() const;
    double mean_val_acc() const;
};

struct SplitOptions {
    std::size_t n_splits = 5;
    double train_ratio = 0.7;
    std::size_t folds = 10;
    std::uint64_t seed = 42;
    std::size_t jobs = 1;
};

/// For each split: stratified 70/30 partition, grid search on the training
/// part, refit of the selected cell on the whole training part, test scoring.
/// Split s uses derive_seed(seed, s) for every family, so runs are paired.
/// Standard deviations are population standard deviations over splits.
EvaluationReport split_average(const Task& task, const GridSpec& grid, const SplitOptions& opt);

/// Runs fn(i) for i in [0, n) on up to `jobs` threads. Exceptions propagate.
void parallel_for(std::size_t n, std::size_t jobs, const std::function<void(std::size_t)>& fn);

} // namespace preyclass
