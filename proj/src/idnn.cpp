#include "preyclass/idnn.hpp"

#include "preyclass/error.hpp"
#include "preyclass/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace preyclass {

namespace {

constexpr double kRpropGrow = 1.2;
constexpr double kRpropShrink = 0.5;
constexpr double kRpropMinStep = 1e-6;
constexpr double kRpropMaxStep = 50.0;
constexpr double kMinWidth = 1e-3;

// Squared distances between every row of x and every row of c.
Eigen::MatrixXd squared_distances(const Eigen::MatrixXd& x, const Eigen::MatrixXd& c) {
    Eigen::MatrixXd d = -2.0 * x * c.transpose();
    d.colwise() += x.rowwise().squaredNorm();
    d.rowwise() += c.rowwise().squaredNorm().transpose();
    return d.cwiseMax(0.0);
}

struct Activations {
    Eigen::MatrixXd dist; // rbf only
    Eigen::MatrixXd h;    // n x H
    Eigen::VectorXd s;    // n
};

Activations run(const IdnnModel& m, const Eigen::MatrixXd& x) {
    if (static_cast<std::size_t>(x.cols()) != m.n_in())
        throw ArgumentError("input width " + std::to_string(x.cols()) + " does not match model width " +
                            std::to_string(m.n_in()));
    Activations a;
    if (m.kind == HiddenKind::sigmoid) {
        a.h = x * m.hidden.transpose();
        a.h.rowwise() += m.hidden_param.transpose();
        a.h = a.h.array().tanh();
    } else {
        a.dist = squared_distances(x, m.hidden);
        const Eigen::RowVectorXd inv = (-0.5 / m.hidden_param.array().square()).matrix().transpose();
        a.h = (a.dist.array().rowwise() * inv.array()).exp();
    }
    a.s = ((a.h * m.out_w).array() + m.out_b).tanh();
    return a;
}

double decay_norm(const IdnnModel& m) {
    double r = m.out_w.squaredNorm();
    if (m.kind == HiddenKind::sigmoid) r += m.hidden.squaredNorm();
    return r;
}

void check_training_data(std::span<const LabeledVector> data, std::size_t n_in) {
    if (data.size() < 2) throw TrainingError("need at least 2 training examples");
    bool pos = false, neg = false;
    for (const auto& r : data) {
        if (r.values.size() != n_in)
            throw ArgumentError("example width " + std::to_string(r.values.size()) + " does not match n_in " +
                                std::to_string(n_in));
        (r.label == Label::positive ? pos : neg) = true;
    }
    if (!(pos && neg)) throw TrainingError("training data contains a single class");
}

void clamp_widths(IdnnModel& m) {
    if (m.kind == HiddenKind::rbf) m.hidden_param = m.hidden_param.cwiseMax(kMinWidth);
}

} // namespace

std::string to_string(HiddenKind k) { return k == HiddenKind::sigmoid ? "sigmoid" : "rbf"; }

HiddenKind hidden_kind_from_string(const std::string& s) {
    if (s == "sigmoid" || s == "sigm") return HiddenKind::sigmoid;
    if (s == "rbf") return HiddenKind::rbf;
    throw ArgumentError("unknown hidden kind '" + s + "' (expected sigmoid or rbf)");
}

void IdnnConfig::validate() const {
    if (n_in < 1) throw ConfigError("n_in must be >= 1");
    if (n_hidden < 1) throw ConfigError("n_hidden must be >= 1");
    if (!(eta > 0.0)) throw ConfigError("eta must be > 0");
    if (!(alpha >= 0.0)) throw ConfigError("alpha must be >= 0");
    if (!(lambda >= 0.0)) throw ConfigError("lambda must be >= 0");
}

IdnnModel IdnnModel::zeros_like() const {
    IdnnModel g;
    g.kind = kind;
    g.hidden = Eigen::MatrixXd::Zero(hidden.rows(), hidden.cols());
    g.hidden_param = Eigen::VectorXd::Zero(hidden_param.size());
    g.out_w = Eigen::VectorXd::Zero(out_w.size());
    g.out_b = 0.0;
    return g;
}

std::size_t IdnnModel::parameter_count() const {
    return static_cast<std::size_t>(hidden.size() + hidden_param.size() + out_w.size() + 1);
}

Eigen::VectorXd IdnnModel::pack() const {
    Eigen::VectorXd p(static_cast<Eigen::Index>(parameter_count()));
    Eigen::Index k = 0;
    for (Eigen::Index j = 0; j < hidden.rows(); ++j)
        for (Eigen::Index i = 0; i < hidden.cols(); ++i) p[k++] = hidden(j, i);
    p.segment(k, hidden_param.size()) = hidden_param;
    k += hidden_param.size();
    p.segment(k, out_w.size()) = out_w;
    k += out_w.size();
    p[k] = out_b;
    return p;
}

void IdnnModel::unpack(const Eigen::VectorXd& p) {
    if (static_cast<std::size_t>(p.size()) != parameter_count()) throw ArgumentError("parameter vector size mismatch");
    Eigen::Index k = 0;
    for (Eigen::Index j = 0; j < hidden.rows(); ++j)
        for (Eigen::Index i = 0; i < hidden.cols(); ++i) hidden(j, i) = p[k++];
    hidden_param = p.segment(k, hidden_param.size());
    k += hidden_param.size();
    out_w = p.segment(k, out_w.size());
    k += out_w.size();
    out_b = p[k];
}

void IdnnModel::validate() const {
    if (hidden.rows() < 1 || hidden.cols() < 1) throw ArgumentError("empty network");
    if (hidden_param.size() != hidden.rows() || out_w.size() != hidden.rows())
        throw ArgumentError("inconsistent network shapes");
    if (!hidden.allFinite() || !hidden_param.allFinite() || !out_w.allFinite() || !std::isfinite(out_b))
        throw ArgumentError("non-finite network parameter");
    if (kind == HiddenKind::rbf && (hidden_param.array() <= 0.0).any())
        throw ArgumentError("rbf widths must be positive");
}

Batch Batch::from(std::span<const LabeledVector> rows) {
    Batch b;
    if (rows.empty()) return b;
    const auto d = static_cast<Eigen::Index>(rows.front().values.size());
    b.x.resize(static_cast<Eigen::Index>(rows.size()), d);
    b.y.resize(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (static_cast<Eigen::Index>(rows[i].values.size()) != d) throw ArgumentError("rows have inconsistent widths");
        const auto r = static_cast<Eigen::Index>(i);
        b.x.row(r) = Eigen::Map<const Eigen::RowVectorXd>(rows[i].values.data(), d);
        b.y[r] = to_target(rows[i].label);
    }
    return b;
}

double forward(const IdnnModel& m, std::span<const double> x) {
    if (x.size() != m.n_in())
        throw ArgumentError("input width " + std::to_string(x.size()) + " does not match model width " +
                            std::to_string(m.n_in()));
    const Eigen::MatrixXd row = Eigen::Map<const Eigen::RowVectorXd>(x.data(), static_cast<Eigen::Index>(x.size()));
    return run(m, row).s[0];
}

Eigen::VectorXd forward(const IdnnModel& m, const Eigen::MatrixXd& x) { return run(m, x).s; }

double loss(const IdnnModel& m, const Batch& batch, double lambda) {
    if (batch.size() == 0) throw ArgumentError("empty batch");
    const auto a = run(m, batch.x);
    return (a.s - batch.y).squaredNorm() / static_cast<double>(batch.size()) + lambda * decay_norm(m);
}

IdnnModel gradient(const IdnnModel& m, const Batch& batch, double lambda, double* loss_out) {
    if (batch.size() == 0) throw ArgumentError("empty batch");
    const auto a = run(m, batch.x);
    const double n = static_cast<double>(batch.size());
    const Eigen::VectorXd r = a.s - batch.y;
    if (loss_out) *loss_out = r.squaredNorm() / n + lambda * decay_norm(m);

    IdnnModel g = m.zeros_like();
    // d loss / d z at the output pre-activation
    const Eigen::VectorXd dz = ((2.0 / n) * r.array() * (1.0 - a.s.array().square())).matrix();
    g.out_w = a.h.transpose() * dz + 2.0 * lambda * m.out_w;
    g.out_b = dz.sum();
    const Eigen::MatrixXd dh = dz * m.out_w.transpose(); // n x H

    if (m.kind == HiddenKind::sigmoid) {
        const Eigen::MatrixXd dpre = (dh.array() * (1.0 - a.h.array().square())).matrix();
        g.hidden = dpre.transpose() * batch.x + 2.0 * lambda * m.hidden;
        g.hidden_param = dpre.colwise().sum().transpose();
    } else {
        const Eigen::ArrayXXd dh_h = dh.array() * a.h.array();
        const Eigen::RowVectorXd inv2 = (-0.5 / m.hidden_param.array().square()).matrix().transpose();
        // d loss / d dist_ij
        const Eigen::MatrixXd ddist = (dh_h.rowwise() * inv2.array()).matrix();
        const Eigen::VectorXd col = ddist.colwise().sum().transpose();
        g.hidden = -2.0 * (ddist.transpose() * batch.x - col.asDiagonal() * m.hidden);
        const Eigen::VectorXd inv3 = m.hidden_param.array().cube().inverse().matrix();
        g.hidden_param = ((dh_h * a.dist.array()).colwise().sum().transpose() * inv3.array()).matrix();
    }
    return g;
}

IdnnModel init_idnn(const IdnnConfig& cfg, const Batch& batch) {
    cfg.validate();
    Rng rng(cfg.seed);
    const auto h = static_cast<Eigen::Index>(cfg.n_hidden);
    const auto d = static_cast<Eigen::Index>(cfg.n_in);
    IdnnModel m;
    m.kind = cfg.hidden_kind;
    m.hidden.resize(h, d);
    m.hidden_param.resize(h);
    m.out_w.resize(h);

    if (m.kind == HiddenKind::sigmoid) {
        for (Eigen::Index j = 0; j < h; ++j)
            for (Eigen::Index i = 0; i < d; ++i) m.hidden(j, i) = rng.uniform(-0.1, 0.1);
        for (Eigen::Index j = 0; j < h; ++j) m.hidden_param[j] = rng.uniform(-0.1, 0.1);
    } else {
        if (batch.size() == 0) throw TrainingError("rbf initialization needs training data");
        // Distinct examples first; cycles through a fresh permutation once
        // more centers than examples are requested. Candidates are put in
        // lexicographic order before shuffling so the choice does not depend
        // on the order of the training rows.
        std::vector<std::size_t> canonical(batch.size());
        std::iota(canonical.begin(), canonical.end(), std::size_t{0});
        std::sort(canonical.begin(), canonical.end(), [&](std::size_t a, std::size_t b) {
            const auto ra = batch.x.row(static_cast<Eigen::Index>(a));
            const auto rb = batch.x.row(static_cast<Eigen::Index>(b));
            if (std::lexicographical_compare(ra.begin(), ra.end(), rb.begin(), rb.end())) return true;
            if (std::lexicographical_compare(rb.begin(), rb.end(), ra.begin(), ra.end())) return false;
            return batch.y[static_cast<Eigen::Index>(a)] < batch.y[static_cast<Eigen::Index>(b)];
        });
        std::vector<std::size_t> order;
        for (Eigen::Index j = 0; j < h; ++j) {
            if (order.empty()) {
                order = canonical;
                rng.shuffle(order);
                std::reverse(order.begin(), order.end());
            }
            m.hidden.row(j) = batch.x.row(static_cast<Eigen::Index>(order.back()));
            order.pop_back();
        }
        std::vector<double> dists;
        for (Eigen::Index a = 0; a < h; ++a)
            for (Eigen::Index b = a + 1; b < h; ++b) dists.push_back((m.hidden.row(a) - m.hidden.row(b)).norm());
        double width = 1.0;
        if (!dists.empty()) {
            std::nth_element(dists.begin(), dists.begin() + static_cast<std::ptrdiff_t>(dists.size() / 2), dists.end());
            width = dists[dists.size() / 2];
        }
        if (!(width > kMinWidth)) width = 1.0;
        m.hidden_param.setConstant(width);
    }
    for (Eigen::Index j = 0; j < h; ++j) m.out_w[j] = rng.uniform(-0.1, 0.1);
    m.out_b = rng.uniform(-0.1, 0.1);
    return m;
}

IdnnTrainResult train_rprop(const IdnnConfig& cfg, std::span<const LabeledVector> data) {
    cfg.validate();
    check_training_data(data, cfg.n_in);
    const Batch batch = Batch::from(data);

    IdnnModel m = init_idnn(cfg, batch);
    Eigen::VectorXd p = m.pack();
    const auto np = p.size();
    Eigen::VectorXd step = Eigen::VectorXd::Constant(np, cfg.eta);
    Eigen::VectorXd prev = Eigen::VectorXd::Zero(np);

    IdnnTrainResult res;
    res.loss_trace.reserve(cfg.epochs + 1);
    IdnnModel best = m;
    double best_loss = 0.0;

    for (std::size_t epoch = 0; epoch <= cfg.epochs; ++epoch) {
        double cur = 0.0;
        const Eigen::VectorXd g = gradient(m, batch, cfg.lambda, &cur).pack();
        if (epoch == 0 || cur < best_loss) {
            best_loss = cur;
            best = m;
        }
        res.loss_trace.push_back(best_loss);
        if (epoch == cfg.epochs) break;

        for (Eigen::Index i = 0; i < np; ++i) {
            const double s = g[i] * prev[i];
            if (s > 0.0) step[i] = std::min(step[i] * kRpropGrow, kRpropMaxStep);
            else if (s < 0.0) step[i] = std::max(step[i] * kRpropShrink, kRpropMinStep);
            if (g[i] > 0.0) p[i] -= step[i];
            else if (g[i] < 0.0) p[i] += step[i];
        }
        prev = g;
        m.unpack(p);
        clamp_widths(m);
        p = m.pack();
    }
    res.model = std::move(best);
    return res;
}

IdnnTrainResult train_gd(const IdnnConfig& cfg, std::span<const LabeledVector> data) {
    cfg.validate();
    check_training_data(data, cfg.n_in);
    const Batch batch = Batch::from(data);

    IdnnModel m = init_idnn(cfg, batch);
    Eigen::VectorXd p = m.pack();
    Eigen::VectorXd velocity = Eigen::VectorXd::Zero(p.size());

    IdnnTrainResult res;
    IdnnModel best = m;
    double best_loss = 0.0;
    for (std::size_t epoch = 0; epoch <= cfg.epochs; ++epoch) {
        double cur = 0.0;
        const Eigen::VectorXd g = gradient(m, batch, cfg.lambda, &cur).pack();
        if (epoch == 0 || cur < best_loss) {
            best_loss = cur;
            best = m;
        }
        res.loss_trace.push_back(best_loss);
        if (epoch == cfg.epochs) break;
        velocity = cfg.alpha * velocity - cfg.eta * g;
        p += velocity;
        m.unpack(p);
        clamp_widths(m);
        p = m.pack();
    }
    res.model = std::move(best);
    return res;
}

} // namespace preyclass
