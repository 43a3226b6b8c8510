#include "preyclass/esn.hpp"

#include "preyclass/error.hpp"
#include "preyclass/rng.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numeric>

namespace preyclass {

void EsnConfig::validate() const {
    if (n_reservoir < 1) throw ConfigError("reservoir needs at least one unit");
    if (!(leaky > 0.0 && leaky <= 1.0)) throw ConfigError("leak rate must be in (0, 1]");
    if (!(connectivity > 0.0 && connectivity <= 1.0)) throw ConfigError("connectivity must be in (0, 1]");
    if (!(spectral_radius > 0.0)) throw ConfigError("spectral radius must be > 0");
    if (!(input_scaling >= 0.0)) throw ConfigError("input scaling must be >= 0");
    if (!(ridge_beta >= 0.0)) throw ConfigError("ridge beta must be >= 0");
}

std::size_t EsnConfig::recurrent_nnz() const {
    const double n = static_cast<double>(n_reservoir);
    const auto dense = static_cast<std::size_t>(std::llround(connectivity * n * n));
    return std::max(n_reservoir, dense);
}

double spectral_radius(const Eigen::MatrixXd& m) {
    if (m.rows() != m.cols()) throw ArgumentError("spectral radius of a non-square matrix");
    if (m.size() == 0) return 0.0;
    Eigen::EigenSolver<Eigen::MatrixXd> es(m, false);
    if (es.info() != Eigen::Success) throw NumericalError("eigenvalue computation failed");
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

EsnModel init_esn(const EsnConfig& cfg) {
    cfg.validate();
    const std::size_t n = cfg.n_reservoir;
    const std::size_t nnz = cfg.recurrent_nnz();
    if (nnz > n * n) throw ArgumentError("requested " + std::to_string(nnz) + " recurrent weights in a " +
                                         std::to_string(n) + "x" + std::to_string(n) + " matrix");
    Rng rng(cfg.seed);
    EsnModel m;
    m.config = cfg;
    const auto ni = static_cast<Eigen::Index>(n);
    m.w_in.resize(ni, static_cast<Eigen::Index>(kChannels));
    for (Eigen::Index i = 0; i < m.w_in.rows(); ++i)
        for (Eigen::Index j = 0; j < m.w_in.cols(); ++j)
            m.w_in(i, j) = rng.uniform(-cfg.input_scaling, cfg.input_scaling);

    // Sparse draws can be nilpotent for small reservoirs. Their computed
    // eigenvalues are rounding noise, so the rescaled radius is checked and
    // the draw repeated when it misses the target.
    constexpr int kMaxDraws = 1000;
    std::vector<std::size_t> cells(n * n);
    for (int attempt = 0; attempt < kMaxDraws; ++attempt) {
        std::iota(cells.begin(), cells.end(), std::size_t{0});
        std::vector<Eigen::Triplet<double>> trip;
        trip.reserve(nnz);
        for (std::size_t k = 0; k < nnz; ++k) {
            const auto j = k + static_cast<std::size_t>(rng.below(cells.size() - k));
            std::swap(cells[k], cells[j]);
            trip.emplace_back(static_cast<Eigen::Index>(cells[k] / n), static_cast<Eigen::Index>(cells[k] % n),
                              rng.uniform(-1.0, 1.0));
        }
        SparseMatrix w(ni, ni);
        w.setFromTriplets(trip.begin(), trip.end());
        const double r = spectral_radius(Eigen::MatrixXd(w));
        if (!(r > 1e-8)) continue;
        SparseMatrix scaled = (cfg.spectral_radius / r) * w;
        if (std::abs(spectral_radius(Eigen::MatrixXd(scaled)) - cfg.spectral_radius) > 1e-9 * cfg.spectral_radius)
            continue;
        m.w = std::move(scaled);
        m.w.makeCompressed();
        m.w_out = Eigen::VectorXd::Zero(ni);
        return m;
    }
    throw NumericalError("could not draw a recurrent matrix with nonzero spectral radius");
}

std::array<double, kChannels> sample_input(const SensorSample& s) { return {s.heave, s.surge, s.sway, s.depth}; }

Eigen::VectorXd step(const EsnModel& m, const Eigen::VectorXd& state, std::span<const double> input) {
    if (static_cast<std::size_t>(state.size()) != m.size())
        throw ArgumentError("state size " + std::to_string(state.size()) + " does not match reservoir size " +
                            std::to_string(m.size()));
    if (input.size() != kChannels) throw ArgumentError("input must have 4 values");
    const Eigen::Map<const Eigen::VectorXd> u(input.data(), static_cast<Eigen::Index>(input.size()));
    const double a = m.config.leaky;
    const Eigen::VectorXd pre = m.w_in * u + m.w * state;
    return (1.0 - a) * state + a * pre.array().tanh().matrix();
}

Eigen::MatrixXd run_states(const EsnModel& m, const TimeSeries& series) {
    const auto n = static_cast<Eigen::Index>(m.size());
    Eigen::MatrixXd states(static_cast<Eigen::Index>(series.size()), n);
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    for (std::size_t t = 0; t < series.size(); ++t) {
        const auto u = sample_input(series[t]);
        x = step(m, x, u);
        states.row(static_cast<Eigen::Index>(t)) = x.transpose();
    }
    return states;
}

Readout ridge_readout(const Eigen::MatrixXd& states, const Eigen::VectorXd& targets, double beta) {
    if (states.rows() != targets.size()) throw ArgumentError("state and target counts differ");
    if (!(beta >= 0.0)) throw ArgumentError("ridge beta must be >= 0");
    const Eigen::Index n = states.cols();
    if (states.rows() <= n) throw TrainingError("need more than reservoir size steps to fit the readout");
    Eigen::MatrixXd design(states.rows(), n + 1);
    design.leftCols(n) = states;
    design.col(n).setOnes();
    Eigen::MatrixXd gram = design.transpose() * design;
    const Eigen::VectorXd rhs = design.transpose() * targets;
    gram.diagonal().head(n).array() += beta;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
    const Eigen::VectorXd pivots = ldlt.vectorD();
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive() || !(pivots.minCoeff() > 1e-14 * pivots.maxCoeff()))
        throw NumericalError("readout normal matrix is singular; use ridge beta > 0");
    const Eigen::VectorXd sol = ldlt.solve(rhs);
    if (!sol.allFinite()) throw NumericalError("readout solution is not finite; use ridge beta > 0");
    return {sol.head(n), sol[n]};
}

EsnModel fit_readout(const EsnModel& m, std::span<const TimeSeries> series) {
    const auto n = static_cast<Eigen::Index>(m.size());
    const std::size_t washout = m.config.washout;
    Eigen::Index rows = 0;
    for (const auto& s : series) {
        if (s.size() <= washout)
            throw TrainingError("series of " + std::to_string(s.size()) + " steps is not longer than the washout");
        rows += static_cast<Eigen::Index>(s.size() - washout);
    }
    Eigen::MatrixXd states(rows, n);
    Eigen::VectorXd y(rows);
    Eigen::Index r = 0;
    for (const auto& s : series) {
        const Eigen::MatrixXd all = run_states(m, s);
        const auto keep = static_cast<Eigen::Index>(s.size() - washout);
        states.middleRows(r, keep) = all.bottomRows(keep);
        for (Eigen::Index t = 0; t < keep; ++t) y[r + t] = to_target(s[washout + static_cast<std::size_t>(t)].label);
        r += keep;
    }
    const Readout ro = ridge_readout(states, y, m.config.ridge_beta);
    EsnModel out = m;
    out.w_out = ro.w;
    out.b_out = ro.b;
    out.trained = true;
    return out;
}

EsnModel fit_readout(const EsnModel& m, const TimeSeries& series) {
    if (series.size() <= m.config.washout + m.size())
        throw TrainingError("series must be longer than washout + reservoir size");
    return fit_readout(m, std::span<const TimeSeries>(&series, 1));
}

std::vector<double> stream_scores(const EsnModel& m, const TimeSeries& series) {
    if (!m.trained) throw StateError("ESN readout has not been trained");
    const auto n = static_cast<Eigen::Index>(m.size());
    std::vector<double> out;
    out.reserve(series.size());
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    for (std::size_t t = 0; t < series.size(); ++t) {
        const auto u = sample_input(series[t]);
        x = step(m, x, u);
        out.push_back(m.w_out.dot(x) + m.b_out);
    }
    return out;
}

std::vector<Label> classify_stream(const EsnModel& m, const TimeSeries& series) {
    const auto scores = stream_scores(m, series);
    std::vector<Label> out;
    out.reserve(scores.size());
    for (double s : scores) out.push_back(s >= 0.0 ? Label::positive : Label::negative);
    return out;
}

} // namespace preyclass
