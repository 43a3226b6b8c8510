#include "preyclass/features.hpp"

#include "preyclass/error.hpp"

#include <algorithm>
#include <cmath>

namespace preyclass {

// Moments are accumulated in long double: channels such as depth carry a large
// offset relative to their spread, and the centered sums cancel.
ChannelStats channel_stats(std::span<const double> x) {
    if (x.empty()) throw ArgumentError("empty channel");
    const auto n = static_cast<long double>(x.size());
    ChannelStats s;
    auto [lo, hi] = std::minmax_element(x.begin(), x.end());
    s.min = *lo;
    s.max = *hi;
    if (s.min == s.max) {
        s.mean = s.min;
        return s;
    }
    long double sum = 0.0L;
    for (double v : x) sum += v;
    const long double mean = sum / n;
    long double m2 = 0.0L, m3 = 0.0L, m4 = 0.0L;
    for (double v : x) {
        const long double d = v - mean;
        const long double d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    const long double sd = std::sqrt(m2);
    s.mean = static_cast<double>(mean);
    s.std = static_cast<double>(sd);
    s.skew = static_cast<double>(m3 / (m2 * sd));
    s.kurtosis = static_cast<double>(m4 / (m2 * m2) - 3.0L);
    return s;
}

double pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.empty()) throw ArgumentError("correlation needs equal, non-empty inputs");
    const auto [xl, xh] = std::minmax_element(x.begin(), x.end());
    const auto [yl, yh] = std::minmax_element(y.begin(), y.end());
    if (*xl == *xh || *yl == *yh) return 0.0;
    const auto n = static_cast<long double>(x.size());
    long double mx = 0.0L, my = 0.0L;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    long double sxy = 0.0L, sxx = 0.0L, syy = 0.0L;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const long double dx = x[i] - mx, dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    const auto r = static_cast<double>(sxy / std::sqrt(sxx * syy));
    return std::clamp(r, -1.0, 1.0);
}

FeatureVector extract(const Window& w) {
    const std::size_t len = w.values.size();
    if (len % kChannels != 0) throw ArgumentError("window length must be a multiple of 4");
    const std::size_t per = len / kChannels;
    if (per < 2) throw ArgumentError("need at least 2 samples per channel");

    std::span<const double> all(w.values);
    std::array<std::span<const double>, kChannels> ch;
    for (std::size_t c = 0; c < kChannels; ++c) ch[c] = all.subspan(c * per, per);

    FeatureVector f;
    f.label = w.label;
    f.values.reserve(kFeatureCount);
    for (std::size_t c = 0; c < kChannels; ++c) {
        const auto s = channel_stats(ch[c]);
        f.values.insert(f.values.end(), {s.mean, s.std, s.min, s.max, s.skew, s.kurtosis});
    }
    for (std::size_t a = 0; a < kChannels; ++a)
        for (std::size_t b = a + 1; b < kChannels; ++b) f.values.push_back(pearson(ch[a], ch[b]));
    return f;
}

std::vector<FeatureVector> extract_all(std::span<const Window> windows) {
    std::vector<FeatureVector> out;
    out.reserve(windows.size());
    for (const auto& w : windows) out.push_back(extract(w));
    return out;
}

Standardizer Standardizer::fit(std::span<const LabeledVector> rows) {
    if (rows.empty()) throw ArgumentError("cannot standardize an empty dataset");
    const std::size_t d = rows.front().values.size();
    Standardizer s;
    s.mean.assign(d, 0.0);
    s.scale.assign(d, 0.0);
    for (const auto& r : rows) {
        if (r.values.size() != d) throw ArgumentError("rows have inconsistent widths");
        for (std::size_t j = 0; j < d; ++j) s.mean[j] += r.values[j];
    }
    const auto n = static_cast<double>(rows.size());
    for (auto& m : s.mean) m /= n;
    for (const auto& r : rows)
        for (std::size_t j = 0; j < d; ++j) {
            const double dv = r.values[j] - s.mean[j];
            s.scale[j] += dv * dv;
        }
    for (auto& v : s.scale) {
        v = std::sqrt(v / n);
        if (!(v > 0.0)) v = 1.0;
    }
    return s;
}

std::vector<double> Standardizer::apply(std::span<const double> x) const {
    if (empty()) return {x.begin(), x.end()};
    if (x.size() != mean.size()) throw ArgumentError("standardizer width mismatch");
    std::vector<double> out(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) out[j] = (x[j] - mean[j]) / scale[j];
    return out;
}

std::vector<LabeledVector> Standardizer::apply(std::span<const LabeledVector> rows) const {
    std::vector<LabeledVector> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back({apply(r.values), r.label});
    return out;
}

} // namespace preyclass
