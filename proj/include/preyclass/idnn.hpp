#pragma once

#include "preyclass/windowing.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace preyclass {

enum class HiddenKind { sigmoid, rbf };

std::string to_string(HiddenKind k);
HiddenKind hidden_kind_from_string(const std::string& s);

struct IdnnConfig {
    std::size_t n_in = 30;
    std::size_t n_hidden = 5;
    HiddenKind hidden_kind = HiddenKind::sigmoid;
    double eta = 0.1;    // Rprop initial step; learning rate for train_gd
    double alpha = 0.0;  // momentum, train_gd only
    double lambda = 0.0; // weight decay
    std::size_t epochs = 1000;
    std::uint64_t seed = 1;

    void validate() const; // throws ConfigError
};

/// Single-hidden-layer network with a tanh output unit.
///
/// Sigmoid kind: hidden unit j is tanh(hidden.row(j) . x + hidden_param(j)).
/// RBF kind: hidden.row(j) is a center and hidden_param(j) its width sigma_j,
/// unit j is exp(-|x - c_j|^2 / (2 sigma_j^2)).
struct IdnnModel {
    HiddenKind kind = HiddenKind::sigmoid;
    Eigen::MatrixXd hidden;       // n_hidden x n_in
    Eigen::VectorXd hidden_param; // bias (sigmoid) or width (rbf)
    Eigen::VectorXd out_w;        // n_hidden
    double out_b = 0.0;

    std::size_t n_in() const { return static_cast<std::size_t>(hidden.cols()); }
    std::size_t n_hidden() const { return static_cast<std::size_t>(hidden.rows()); }

    /// A model of the same shape with every parameter zero; used as the
    /// gradient container.
    IdnnModel zeros_like() const;

    std::size_t parameter_count() const;
    /// Packs hidden (row-major), hidden_param, out_w, out_b.
    Eigen::VectorXd pack() const;
    void unpack(const Eigen::VectorXd& p);

    void validate() const; // throws ArgumentError
};

/// Row-stacked inputs plus +-1 targets.
struct Batch {
    Eigen::MatrixXd x; // n x n_in
    Eigen::VectorXd y; // n

    static Batch from(std::span<const LabeledVector> rows);
    std::size_t size() const { return static_cast<std::size_t>(x.rows()); }
};

/// Score in (-1, 1). Throws ArgumentError on a dimension mismatch.
double forward(const IdnnModel& m, std::span<const double> x);
Eigen::VectorXd forward(const IdnnModel& m, const Eigen::MatrixXd& x);

inline Label score_label(double score) { return score >= 0.0 ? Label::positive : Label::negative; }

/// Mean squared error over the batch plus lambda times the squared norm of
/// the connection weights (sigmoid input weights and output weights; biases,
/// RBF centers and widths are not decayed).
double loss(const IdnnModel& m, const Batch& batch, double lambda);

/// Exact gradient of loss() with respect to every parameter, in model shape.
IdnnModel gradient(const IdnnModel& m, const Batch& batch, double lambda, double* loss_out = nullptr);

/// Initial parameters: weights uniform in [-0.1, 0.1]; RBF centers are
/// distinct training inputs, widths the median pairwise center distance.
IdnnModel init_idnn(const IdnnConfig& cfg, const Batch& batch);

struct IdnnTrainResult {
    IdnnModel model;
    /// Entry 0 is the initial loss; entry e the loss of the retained
    /// (best-so-far) parameters after epoch e. Non-increasing.
    std::vector<double> loss_trace;
};

/// Full-batch Rprop- with step growth 1.2, shrink 0.5, steps clamped to
/// [1e-6, 50]. Returns the best parameters seen.
IdnnTrainResult train_rprop(const IdnnConfig& cfg, std::span<const LabeledVector> data);

/// Plain gradient descent with momentum (eta, alpha). Same retention rule.
IdnnTrainResult train_gd(const IdnnConfig& cfg, std::span<const LabeledVector> data);

} // namespace preyclass
