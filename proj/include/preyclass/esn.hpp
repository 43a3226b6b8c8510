#pragma once

#include "preyclass/data.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace preyclass {

struct EsnConfig {
    std::size_t n_reservoir = 5;
    double input_scaling = 0.01;
    double leaky = 0.5;          // leak rate a in (0, 1]
    double connectivity = 0.005; // fraction of nonzero recurrent weights
    double spectral_radius = 0.9;
    double ridge_beta = 1e-6;
    std::size_t washout = 25;
    std::uint64_t seed = 1;

    void validate() const; // throws ConfigError

    /// max(n_reservoir, round(connectivity * n_reservoir^2))
    std::size_t recurrent_nnz() const;
};

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Leaky-integrator echo state network with a linear readout:
///   x' = (1 - a) x + a tanh(W_in u + W x),   y = w_out . x + b_out
struct EsnModel {
    EsnConfig config;
    Eigen::MatrixXd w_in; // n x 4
    SparseMatrix w;       // n x n
    Eigen::VectorXd w_out;
    double b_out = 0.0;
    bool trained = false;

    std::size_t size() const { return static_cast<std::size_t>(w_in.rows()); }
};

/// Largest eigenvalue modulus of a square matrix.
double spectral_radius(const Eigen::MatrixXd& m);

/// W_in uniform in [-input_scaling, input_scaling]; W has recurrent_nnz()
/// distinct positions with uniform [-1, 1] values, redrawn if nilpotent, then
/// rescaled to the target spectral radius.
EsnModel init_esn(const EsnConfig& cfg);

Eigen::VectorXd step(const EsnModel& m, const Eigen::VectorXd& state, std::span<const double> input);

/// Inputs of one sample in channel order.
std::array<double, kChannels> sample_input(const SensorSample& s);

/// Reservoir states for every timestep, starting from the zero state. n_steps x n.
Eigen::MatrixXd run_states(const EsnModel& m, const TimeSeries& series);

struct Readout {
    Eigen::VectorXd w;
    double b = 0.0;
};

/// argmin_{w,b} sum_t (w . x_t + b - y_t)^2 + beta |w|^2 over the rows x_t of
/// `states`, solved in closed form. The bias is not penalized.
Readout ridge_readout(const Eigen::MatrixXd& states, const Eigen::VectorXd& targets, double beta);

/// Closed-form ridge readout over the post-washout states of each series
/// (the state is reset to zero at the start of each). The bias is not
/// penalized. Never modifies W or W_in.
EsnModel fit_readout(const EsnModel& m, std::span<const TimeSeries> series);
EsnModel fit_readout(const EsnModel& m, const TimeSeries& series);

/// Readout score per timestep; throws StateError on an untrained model.
std::vector<double> stream_scores(const EsnModel& m, const TimeSeries& series);
std::vector<Label> classify_stream(const EsnModel& m, const TimeSeries& series);

} // namespace preyclass
