#include "preyclass/svm.hpp"

#include "preyclass/error.hpp"
#include "preyclass/rng.hpp"

#include <algorithm>
#include <cmath>

namespace preyclass {

std::string to_string(KernelKind k) {
    switch (k) {
    case KernelKind::linear: return "linear";
    case KernelKind::rbf: return "rbf";
    case KernelKind::poly3: return "poly3";
    }
    return "?";
}

KernelKind kernel_kind_from_string(const std::string& s) {
    if (s == "linear") return KernelKind::linear;
    if (s == "rbf") return KernelKind::rbf;
    if (s == "poly3" || s == "poly") return KernelKind::poly3;
    throw ArgumentError("unknown kernel '" + s + "' (expected linear, rbf or poly3)");
}

void KernelSpec::validate() const {
    if (!(sigma > 0.0)) throw ConfigError("rbf sigma must be > 0");
    if (!std::isfinite(c)) throw ConfigError("polynomial constant must be finite");
}

double kernel(const KernelSpec& k, std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size())
        throw ArgumentError("kernel dimension mismatch: " + std::to_string(x.size()) + " vs " + std::to_string(y.size()));
    switch (k.kind) {
    case KernelKind::linear: {
        double s = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
        return s;
    }
    case KernelKind::rbf: {
        double s = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double d = x[i] - y[i];
            s += d * d;
        }
        return std::exp(-s / (2.0 * k.sigma * k.sigma));
    }
    case KernelKind::poly3: {
        double s = k.c;
        for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
        return s * s * s;
    }
    }
    return 0.0;
}

void SvmModel::validate() const {
    kernel.validate();
    if (!(C > 0.0)) throw ArgumentError("C must be > 0");
    for (const auto& s : support) {
        if (s.x.size() != dim) throw ArgumentError("support vector dimension mismatch");
        if (!(s.alpha > 0.0) || s.alpha > C * (1.0 + 1e-12)) throw ArgumentError("support vector alpha outside (0, C]");
    }
    if (!std::isfinite(b)) throw ArgumentError("non-finite bias");
}

namespace {

class Smo {
public:
    Smo(std::span<const LabeledVector> data, const KernelSpec& k, double C, const SmoOptions& opt)
        : n_(data.size()), C_(C), opt_(opt), rng_(opt.seed) {
        y_.resize(n_);
        for (std::size_t i = 0; i < n_; ++i) y_[i] = to_target(data[i].label);
        K_.resize(n_ * n_);
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = i; j < n_; ++j) {
                const double v = kernel(k, data[i].values, data[j].values);
                K_[i * n_ + j] = v;
                K_[j * n_ + i] = v;
            }
        alpha_.assign(n_, 0.0);
        // f = 0 initially, so E_i = -y_i
        err_.resize(n_);
        for (std::size_t i = 0; i < n_; ++i) err_[i] = -y_[i];
    }

    SmoSolution run() {
        std::size_t passes = 0;
        bool examine_all = true;
        std::size_t changed = 0;
        while (changed > 0 || examine_all) {
            if (passes >= opt_.max_passes) throw ConvergenceError(passes, "SMO did not converge");
            ++passes;
            changed = 0;
            for (std::size_t i = 0; i < n_; ++i)
                if (examine_all || is_free(i)) changed += examine(i);
            if (examine_all) examine_all = false;
            else if (changed == 0) examine_all = true;
        }
        return {alpha_, b_, passes};
    }

private:
    double k(std::size_t i, std::size_t j) const { return K_[i * n_ + j]; }
    bool is_free(std::size_t i) const { return alpha_[i] > 0.0 && alpha_[i] < C_; }

    std::size_t examine(std::size_t i2) {
        const double r2 = err_[i2] * y_[i2];
        if (!((r2 < -opt_.tol && alpha_[i2] < C_) || (r2 > opt_.tol && alpha_[i2] > 0.0))) return 0;

        // Second-choice heuristic: maximize |E1 - E2| over free examples.
        std::size_t best = n_;
        double best_gap = -1.0;
        std::size_t n_free = 0;
        for (std::size_t i = 0; i < n_; ++i) {
            if (!is_free(i)) continue;
            ++n_free;
            const double gap = std::abs(err_[i] - err_[i2]);
            if (gap > best_gap) {
                best_gap = gap;
                best = i;
            }
        }
        if (n_free > 1 && best != n_ && take_step(best, i2)) return 1;

        const auto start_free = static_cast<std::size_t>(rng_.below(n_));
        for (std::size_t off = 0; off < n_; ++off) {
            const std::size_t i1 = (start_free + off) % n_;
            if (is_free(i1) && take_step(i1, i2)) return 1;
        }
        const auto start_all = static_cast<std::size_t>(rng_.below(n_));
        for (std::size_t off = 0; off < n_; ++off) {
            const std::size_t i1 = (start_all + off) % n_;
            if (take_step(i1, i2)) return 1;
        }
        return 0;
    }

    bool take_step(std::size_t i1, std::size_t i2) {
        if (i1 == i2) return false;
        const double a1 = alpha_[i1], a2 = alpha_[i2];
        const double y1 = y_[i1], y2 = y_[i2];
        const double e1 = err_[i1], e2 = err_[i2];
        const double s = y1 * y2;

        double lo, hi;
        if (y1 != y2) {
            lo = std::max(0.0, a2 - a1);
            hi = std::min(C_, C_ + a2 - a1);
        } else {
            lo = std::max(0.0, a1 + a2 - C_);
            hi = std::min(C_, a1 + a2);
        }
        if (lo >= hi) return false;

        const double k11 = k(i1, i1), k12 = k(i1, i2), k22 = k(i2, i2);
        const double eta = k11 + k22 - 2.0 * k12;
        double a2n;
        if (eta > 0.0) {
            a2n = std::clamp(a2 + y2 * (e1 - e2) / eta, lo, hi);
        } else {
            // Objective at the two ends of the segment.
            const double f1 = y1 * (e1 - b_) - a1 * k11 - s * a2 * k12;
            const double f2 = y2 * (e2 - b_) - s * a1 * k12 - a2 * k22;
            const double l1 = a1 + s * (a2 - lo), h1 = a1 + s * (a2 - hi);
            const double obj_lo = l1 * f1 + lo * f2 + 0.5 * l1 * l1 * k11 + 0.5 * lo * lo * k22 + s * lo * l1 * k12;
            const double obj_hi = h1 * f1 + hi * f2 + 0.5 * h1 * h1 * k11 + 0.5 * hi * hi * k22 + s * hi * h1 * k12;
            if (obj_lo < obj_hi - opt_.alpha_eps) a2n = lo;
            else if (obj_lo > obj_hi + opt_.alpha_eps) a2n = hi;
            else a2n = a2;
        }
        const double snap = 1e-12 * C_;
        if (a2n < snap) a2n = 0.0;
        else if (a2n > C_ - snap) a2n = C_;
        if (std::abs(a2n - a2) < opt_.alpha_eps * (a2n + a2 + opt_.alpha_eps)) return false;

        double a1n = a1 + s * (a2 - a2n);
        if (a1n < snap) a1n = 0.0;
        else if (a1n > C_ - snap) a1n = C_;

        // Threshold update for f(x) = sum + b, so E = f - y.
        const double d1 = y1 * (a1n - a1), d2 = y2 * (a2n - a2);
        const double b1 = b_ - e1 - d1 * k11 - d2 * k12;
        const double b2 = b_ - e2 - d1 * k12 - d2 * k22;
        double bn;
        if (a1n > 0.0 && a1n < C_) bn = b1;
        else if (a2n > 0.0 && a2n < C_) bn = b2;
        else bn = 0.5 * (b1 + b2);
        const double db = bn - b_;

        for (std::size_t i = 0; i < n_; ++i) err_[i] += d1 * k(i1, i) + d2 * k(i2, i) + db;
        alpha_[i1] = a1n;
        alpha_[i2] = a2n;
        b_ = bn;
        return true;
    }

    std::size_t n_;
    double C_;
    SmoOptions opt_;
    Rng rng_;
    std::vector<double> y_, K_, alpha_, err_;
    double b_ = 0.0;
};

} // namespace

SmoSolution solve_smo(std::span<const LabeledVector> data, const KernelSpec& k, double C, const SmoOptions& opt) {
    k.validate();
    if (!(C > 0.0)) throw ConfigError("C must be > 0");
    if (data.empty()) throw TrainingError("no training data");
    const std::size_t dim = data.front().values.size();
    bool pos = false, neg = false;
    for (const auto& r : data) {
        if (r.values.size() != dim) throw ArgumentError("training rows have inconsistent widths");
        (r.label == Label::positive ? pos : neg) = true;
    }
    if (!(pos && neg)) throw TrainingError("training data contains a single class");
    return Smo(data, k, C, opt).run();
}

SvmModel train_smo(std::span<const LabeledVector> data, const KernelSpec& k, double C, const SmoOptions& opt) {
    const SmoSolution sol = solve_smo(data, k, C, opt);
    SvmModel m;
    m.kernel = k;
    m.C = C;
    m.dim = data.front().values.size();
    m.b = sol.b;
    for (std::size_t i = 0; i < data.size(); ++i)
        if (sol.alpha[i] > opt.retain_threshold) m.support.push_back({data[i].values, data[i].label, sol.alpha[i]});
    return m;
}

double decide(const SvmModel& m, std::span<const double> x) {
    if (x.size() != m.dim)
        throw ArgumentError("input width " + std::to_string(x.size()) + " does not match model width " +
                            std::to_string(m.dim));
    double f = m.b;
    for (const auto& s : m.support) f += s.alpha * to_target(s.y) * kernel(m.kernel, s.x, x);
    return f;
}

double dual_objective(std::span<const LabeledVector> data, std::span<const double> alpha, const KernelSpec& k) {
    if (alpha.size() != data.size()) throw ArgumentError("alpha count mismatch");
    double lin = 0.0, quad = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        lin += alpha[i];
        if (alpha[i] == 0.0) continue;
        for (std::size_t j = 0; j < data.size(); ++j) {
            if (alpha[j] == 0.0) continue;
            quad += alpha[i] * alpha[j] * to_target(data[i].label) * to_target(data[j].label) *
                    kernel(k, data[i].values, data[j].values);
        }
    }
    return lin - 0.5 * quad;
}

double dual_objective(const SvmModel& m) {
    std::vector<LabeledVector> rows;
    std::vector<double> alpha;
    for (const auto& s : m.support) {
        rows.push_back({s.x, s.y});
        alpha.push_back(s.alpha);
    }
    return dual_objective(rows, alpha, m.kernel);
}

} // namespace preyclass
