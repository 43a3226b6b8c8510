#pragma once

// Independent reference implementations used to check the library.
// Nothing here calls into the code under test except for plain data types.

#include "preyclass/data.hpp"
#include "preyclass/idnn.hpp"
#include "preyclass/svm.hpp"
#include "preyclass/windowing.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <vector>

namespace oracle {

// Brute-force statistics in long double, straight from the definitions.
struct Stats {
    long double mean, std, min, max, skew, kurt;
};

inline Stats stats(const std::vector<double>& x) {
    const auto n = static_cast<long double>(x.size());
    long double s = 0;
    for (double v : x) s += v;
    const long double mean = s / n;
    long double m2 = 0, m3 = 0, m4 = 0;
    for (double v : x) {
        const long double d = v - mean;
        m2 += d * d;
        m3 += d * d * d;
        m4 += d * d * d * d;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    Stats r{mean, std::sqrt(m2), *std::min_element(x.begin(), x.end()), *std::max_element(x.begin(), x.end()), 0, 0};
    if (r.min != r.max) {
        r.skew = m3 / std::pow(m2, 1.5L);
        r.kurt = m4 / (m2 * m2) - 3.0L;
    }
    return r;
}

inline long double corr(const std::vector<double>& x, const std::vector<double>& y) {
    const auto n = static_cast<long double>(x.size());
    long double sx = 0, sy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
    }
    const long double mx = sx / n, my = sy / n;
    long double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0 || syy == 0) return 0;
    return sxy / std::sqrt(sxx * syy);
}

// The 30 features of a channel-major window.
inline std::vector<long double> features(const std::vector<double>& window) {
    const std::size_t w = window.size() / 4;
    std::array<std::vector<double>, 4> ch;
    for (std::size_t c = 0; c < 4; ++c) ch[c].assign(window.begin() + c * w, window.begin() + (c + 1) * w);
    std::vector<long double> out;
    for (const auto& c : ch) {
        const auto s = stats(c);
        out.insert(out.end(), {s.mean, s.std, s.min, s.max, s.skew, s.kurt});
    }
    for (std::size_t a = 0; a < 4; ++a)
        for (std::size_t b = a + 1; b < 4; ++b) out.push_back(corr(ch[a], ch[b]));
    return out;
}

// Relative error with an absolute floor for values near zero.
inline double rel_err(long double got, long double want, long double floor = 1e-12L) {
    return static_cast<double>(std::abs(got - want) / std::max(std::abs(want), floor));
}

// Central finite differences of the loss over the packed parameter vector.
inline Eigen::VectorXd fd_gradient(const preyclass::IdnnModel& m, const preyclass::Batch& b, double lambda,
                                   double h = 1e-6) {
    const Eigen::VectorXd p = m.pack();
    Eigen::VectorXd g(p.size());
    preyclass::IdnnModel probe = m;
    for (Eigen::Index i = 0; i < p.size(); ++i) {
        Eigen::VectorXd q = p;
        q[i] = p[i] + h;
        probe.unpack(q);
        const double up = preyclass::loss(probe, b, lambda);
        q[i] = p[i] - h;
        probe.unpack(q);
        const double down = preyclass::loss(probe, b, lambda);
        g[i] = (up - down) / (2 * h);
    }
    return g;
}

// Kernel evaluated from its definition.
inline double kernel(const preyclass::KernelSpec& k, const std::vector<double>& x, const std::vector<double>& y) {
    double dot = 0, d2 = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        dot += x[i] * y[i];
        d2 += (x[i] - y[i]) * (x[i] - y[i]);
    }
    switch (k.kind) {
    case preyclass::KernelKind::linear: return dot;
    case preyclass::KernelKind::rbf: return std::exp(-d2 / (2 * k.sigma * k.sigma));
    case preyclass::KernelKind::poly3: return std::pow(dot + k.c, 3);
    }
    return 0;
}

struct QpResult {
    std::vector<double> alpha;
    double b = 0;
    double objective = 0;
};

// Projection onto {0 <= a <= C, sum a_i y_i = 0}: bisection on the multiplier
// of the equality constraint.
inline std::vector<double> project(const std::vector<double>& v, const std::vector<double>& y, double C) {
    auto at = [&](double mu, std::vector<double>* out) {
        double s = 0;
        for (std::size_t i = 0; i < v.size(); ++i) {
            const double a = std::clamp(v[i] - mu * y[i], 0.0, C);
            if (out) (*out)[i] = a;
            s += a * y[i];
        }
        return s;
    };
    double lo = -1.0, hi = 1.0;
    while (at(lo, nullptr) < 0) lo *= 2;
    while (at(hi, nullptr) > 0) hi *= 2;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (at(mid, nullptr) > 0) lo = mid;
        else hi = mid;
    }
    std::vector<double> out(v.size());
    at(0.5 * (lo + hi), &out);
    return out;
}

// Dense accelerated projected-gradient solver for the soft-margin dual
//   max  sum a - 1/2 a'Qa,  Q_ij = y_i y_j k(x_i, x_j).
inline QpResult solve_dual(const std::vector<preyclass::LabeledVector>& data, const preyclass::KernelSpec& k,
                           double C, int iterations = 60000) {
    const std::size_t n = data.size();
    Eigen::MatrixXd K(n, n);
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        y[i] = preyclass::to_target(data[i].label);
        for (std::size_t j = 0; j < n; ++j) K(i, j) = kernel(k, data[i].values, data[j].values);
    }
    Eigen::MatrixXd Q(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) Q(i, j) = y[i] * y[j] * K(i, j);
    const double L = std::max(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(Q).eigenvalues().maxCoeff(), 1e-12);

    auto objective = [&](const std::vector<double>& a) {
        const Eigen::Map<const Eigen::VectorXd> av(a.data(), static_cast<Eigen::Index>(n));
        return av.sum() - 0.5 * av.dot(Q * av);
    };
    std::vector<double> a(n, 0.0), z = a, prev = a;
    double t = 1.0;
    double best_obj = objective(a);
    std::vector<double> best = a;
    for (int it = 0; it < iterations; ++it) {
        const Eigen::Map<const Eigen::VectorXd> zv(z.data(), static_cast<Eigen::Index>(n));
        const Eigen::VectorXd grad = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(n)) - Q * zv;
        std::vector<double> v(n);
        for (std::size_t i = 0; i < n; ++i) v[i] = z[i] + grad[static_cast<Eigen::Index>(i)] / L;
        prev = a;
        a = project(v, y, C);
        const double tn = 0.5 * (1 + std::sqrt(1 + 4 * t * t));
        for (std::size_t i = 0; i < n; ++i) z[i] = a[i] + (t - 1) / tn * (a[i] - prev[i]);
        t = tn;
        double moved = 0;
        for (std::size_t i = 0; i < n; ++i) moved = std::max(moved, std::abs(a[i] - prev[i]));
        const double o = objective(a);
        if (o > best_obj) {
            best_obj = o;
            best = a;
        } else {
            // adaptive restart
            z = a;
            t = 1.0;
        }
        if (moved < 1e-14 * std::max(1.0, C)) break;
    }
    QpResult r{best, 0.0, best_obj};
    // Threshold from free vectors, else the midpoint of the feasible interval.
    double sum = 0;
    std::size_t free_count = 0;
    double lo = -std::numeric_limits<double>::infinity(), hi = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        double f = 0;
        for (std::size_t j = 0; j < n; ++j) f += best[j] * y[j] * K(j, i);
        const double gap = y[i] - f;
        const double eps = 1e-6 * C;
        if (best[i] > eps && best[i] < C - eps) {
            sum += gap;
            ++free_count;
        } else if ((best[i] <= eps) == (y[i] > 0)) {
            lo = std::max(lo, gap);
        } else {
            hi = std::min(hi, gap);
        }
    }
    if (free_count > 0) r.b = sum / static_cast<double>(free_count);
    else if (std::isfinite(lo) && std::isfinite(hi)) r.b = 0.5 * (lo + hi);
    else r.b = std::isfinite(lo) ? lo : hi;
    return r;
}

struct KktAudit {
    double max_violation = 0;
    double equality_residual = 0;
    bool box_ok = true;
};

// KKT conditions of the soft-margin dual on every training example:
//   alpha = 0      =>  y f(x) >= 1 - tol
//   0 < alpha < C  =>  |y f(x) - 1| <= tol
//   alpha = C      =>  y f(x) <= 1 + tol
inline KktAudit kkt(const std::vector<preyclass::LabeledVector>& data, const std::vector<double>& alpha, double b,
                    const preyclass::KernelSpec& k, double C, double bound_eps = 1e-8) {
    KktAudit r;
    const std::size_t n = data.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (alpha[i] < -1e-12 || alpha[i] > C * (1 + 1e-12)) r.box_ok = false;
        r.equality_residual += alpha[i] * preyclass::to_target(data[i].label);
    }
    r.equality_residual = std::abs(r.equality_residual);
    for (std::size_t i = 0; i < n; ++i) {
        double f = b;
        for (std::size_t j = 0; j < n; ++j)
            f += alpha[j] * preyclass::to_target(data[j].label) * kernel(k, data[j].values, data[i].values);
        const double m = preyclass::to_target(data[i].label) * f;
        double v = 0;
        if (alpha[i] <= bound_eps) v = std::max(0.0, 1 - m);
        else if (alpha[i] >= C - bound_eps * std::max(1.0, C)) v = std::max(0.0, m - 1);
        else v = std::abs(m - 1);
        r.max_violation = std::max(r.max_violation, v);
    }
    return r;
}

inline double dual_objective(const std::vector<preyclass::LabeledVector>& data, const std::vector<double>& alpha,
                             const preyclass::KernelSpec& k) {
    double s = 0, q = 0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        s += alpha[i];
        for (std::size_t j = 0; j < data.size(); ++j)
            q += alpha[i] * alpha[j] * preyclass::to_target(data[i].label) * preyclass::to_target(data[j].label) *
                 kernel(k, data[i].values, data[j].values);
    }
    return s - 0.5 * q;
}

} // namespace oracle
