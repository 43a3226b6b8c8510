#include "preyclass/error.hpp"
#include "preyclass/esn.hpp"
#include "preyclass/rng.hpp"

#include <doctest.h>

using namespace preyclass;

namespace {

TimeSeries short_stream(double seconds, std::uint64_t seed) {
    SynthConfig cfg;
    cfg.duration = seconds;
    cfg.seed = seed;
    return synthesize(cfg);
}

Eigen::MatrixXd dense(const SparseMatrix& w) { return Eigen::MatrixXd(w); }

} // namespace

TEST_CASE("init_esn: 5 units at 0.5% connectivity keep 5 recurrent weights") {
    EsnConfig cfg;
    CHECK(cfg.recurrent_nnz() == 5);
    const auto m = init_esn(cfg);
    CHECK(m.w.nonZeros() == 5);
    CHECK(m.w_in.rows() == 5);
    CHECK(m.w_in.cols() == 4);
    CHECK(m.w_out.size() == 5);
    CHECK_FALSE(m.trained);
}

TEST_CASE("init_esn: spectral radius equals the target within 1e-6") {
    for (std::size_t n : {5u, 10u, 50u, 100u})
        for (double c : {0.005, 0.05, 0.2, 1.0})
            for (double rho : {0.5, 0.9, 1.2}) {
                EsnConfig cfg;
                cfg.n_reservoir = n;
                cfg.connectivity = c;
                cfg.spectral_radius = rho;
                cfg.seed = n * 31 + static_cast<std::uint64_t>(c * 1000);
                const auto m = init_esn(cfg);
                INFO("n=" << n << " c=" << c << " rho=" << rho);
                CHECK(std::abs(spectral_radius(dense(m.w)) - rho) < 1e-6);
                CHECK(static_cast<std::size_t>(m.w.nonZeros()) == cfg.recurrent_nnz());
            }
}

TEST_CASE("init_esn: input weights within the scaling bound, deterministic per seed") {
    EsnConfig cfg;
    cfg.n_reservoir = 20;
    cfg.input_scaling = 0.3;
    const auto a = init_esn(cfg), b = init_esn(cfg);
    CHECK(a.w_in.cwiseAbs().maxCoeff() <= 0.3);
    CHECK(a.w_in == b.w_in);
    CHECK(dense(a.w) == dense(b.w));
    cfg.seed = 2;
    CHECK_FALSE(init_esn(cfg).w_in == a.w_in);
}

TEST_CASE("EsnConfig validation") {
    EsnConfig cfg;
    cfg.leaky = 0;
    CHECK_THROWS_AS(init_esn(cfg), ConfigError);
    cfg = {};
    cfg.connectivity = 1.5;
    CHECK_THROWS_AS(init_esn(cfg), ConfigError);
    cfg = {};
    cfg.n_reservoir = 0;
    CHECK_THROWS_AS(init_esn(cfg), ConfigError);
}

TEST_CASE("step: leak disabled and zero fixed point") {
    EsnConfig cfg;
    cfg.n_reservoir = 6;
    cfg.connectivity = 0.5;
    cfg.input_scaling = 0.7;
    cfg.leaky = 1.0;
    const auto m = init_esn(cfg);
    Rng rng(4);
    Eigen::VectorXd x(6);
    for (auto& v : x) v = rng.uniform(-1, 1);
    const std::array<double, 4> u{0.2, -0.4, 0.9, 1.5};
    const Eigen::Map<const Eigen::VectorXd> uv(u.data(), 4);
    const Eigen::VectorXd want = (m.w_in * uv + m.w * x).array().tanh().matrix();
    CHECK((step(m, x, u) - want).norm() < 1e-15);

    const std::array<double, 4> zero{};
    CHECK(step(m, Eigen::VectorXd::Zero(6), zero).norm() == 0.0);
    CHECK_THROWS_AS(step(m, Eigen::VectorXd::Zero(5), zero), ArgumentError);
}

TEST_CASE("echo state property: initial conditions are forgotten") {
    EsnConfig cfg;
    cfg.n_reservoir = 10;
    cfg.connectivity = 0.3;
    cfg.input_scaling = 0.5;
    const auto m = init_esn(cfg);
    Rng rng(8);
    Eigen::VectorXd a(10), b(10);
    for (auto& v : a) v = rng.uniform(-1, 1);
    for (auto& v : b) v = rng.uniform(-1, 1);
    for (int t = 0; t < 500; ++t) {
        std::array<double, 4> u;
        for (auto& v : u) v = rng.normal();
        a = step(m, a, u);
        b = step(m, b, u);
    }
    CHECK((a - b).norm() < 1e-6);
}

TEST_CASE("ridge_readout recovers a linear teacher") {
    Rng rng(21);
    Eigen::MatrixXd x(200, 6);
    for (Eigen::Index i = 0; i < x.rows(); ++i)
        for (Eigen::Index j = 0; j < x.cols(); ++j) x(i, j) = rng.uniform(-1, 1);
    Eigen::VectorXd v(6);
    v << 0.5, -1.25, 2.0, 0.0, 0.3, -0.7;
    const double c = 0.4;
    const Eigen::VectorXd y = (x * v).array() + c;
    const auto ro = ridge_readout(x, y, 1e-12);
    CHECK((ro.w - v).cwiseAbs().maxCoeff() < 1e-6);
    CHECK(std::abs(ro.b - c) < 1e-6);
}

TEST_CASE("fit_readout with beta = 0: residual orthogonal to every state coordinate") {
    EsnConfig cfg;
    cfg.n_reservoir = 8;
    cfg.connectivity = 0.25;
    cfg.input_scaling = 0.5;
    cfg.ridge_beta = 0.0;
    const auto m = init_esn(cfg);
    const auto series = short_stream(60, 3);
    const auto fit = fit_readout(m, series);
    const Eigen::MatrixXd states = run_states(m, series);
    double max_dot = 0, sum = 0;
    for (Eigen::Index j = 0; j < states.cols(); ++j) {
        double dot = 0;
        for (std::size_t t = cfg.washout; t < series.size(); ++t) {
            const auto ti = static_cast<Eigen::Index>(t);
            const double r = fit.w_out.dot(states.row(ti)) + fit.b_out - to_target(series[t].label);
            dot += r * states(ti, j);
            if (j == 0) sum += r;
        }
        max_dot = std::max(max_dot, std::abs(dot));
    }
    CHECK(max_dot < 1e-6);
    CHECK(std::abs(sum) < 1e-6);
}

TEST_CASE("fit_readout leaves the reservoir untouched") {
    EsnConfig cfg;
    cfg.n_reservoir = 10;
    const auto m = init_esn(cfg);
    const auto fit = fit_readout(m, short_stream(60, 4));
    CHECK(fit.w_in == m.w_in);
    CHECK(dense(fit.w) == dense(m.w));
    CHECK(fit.trained);
}

TEST_CASE("fit_readout errors") {
    EsnConfig cfg;
    const auto m = init_esn(cfg);
    const auto s = short_stream(60, 5);
    CHECK_THROWS_AS(fit_readout(m, s.slice(0, cfg.washout + cfg.n_reservoir)), TrainingError);
    // Constant input drives every state to the same trajectory: singular with beta = 0.
    std::vector<SensorSample> flat(200);
    for (std::size_t i = 0; i < flat.size(); ++i) {
        flat[i].t = static_cast<double>(i) / 25.0;
        flat[i].label = i % 2 ? Label::positive : Label::negative;
    }
    EsnConfig zero_beta = cfg;
    zero_beta.ridge_beta = 0.0;
    CHECK_THROWS_AS(fit_readout(init_esn(zero_beta), TimeSeries(25.0, flat)), NumericalError);
}

TEST_CASE("classify_stream: one output per step, causal, deterministic") {
    EsnConfig cfg;
    const auto m = fit_readout(init_esn(cfg), short_stream(120, 6));
    const auto test = short_stream(60, 7);
    const auto labels = classify_stream(m, test);
    CHECK(labels.size() == test.size());
    CHECK(classify_stream(m, test) == labels);
    const auto prefix = classify_stream(m, test.slice(0, 500));
    CHECK(std::equal(prefix.begin(), prefix.end(), labels.begin()));
    CHECK_THROWS_AS(classify_stream(init_esn(cfg), test), StateError);
}
