#include "preyclass/data.hpp"

#include "preyclass/error.hpp"
#include "preyclass/rng.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string_view>

namespace preyclass {

Label label_from_int(long v) {
    if (v == -1) return Label::negative;
    if (v == 1) return Label::positive;
    throw ArgumentError("label must be -1 or 1, got " + std::to_string(v));
}

double SensorSample::channel(std::size_t c) const {
    switch (c) {
    case 0: return heave;
    case 1: return surge;
    case 2: return sway;
    case 3: return depth;
    default: throw ArgumentError("channel index out of range: " + std::to_string(c));
    }
}

TimeSeries::TimeSeries(double rate, std::vector<SensorSample> samples)
    : rate_(rate), samples_(std::move(samples)) {
    if (!(rate_ > 0.0) || !std::isfinite(rate_)) throw ArgumentError("sampling rate must be positive");
    for (std::size_t i = 0; i < samples_.size(); ++i) {
        const auto& s = samples_[i];
        if (!std::isfinite(s.t) || !std::isfinite(s.heave) || !std::isfinite(s.surge) ||
            !std::isfinite(s.sway) || !std::isfinite(s.depth))
            throw ArgumentError("non-finite value in sample " + std::to_string(i));
        if (s.label != Label::negative && s.label != Label::positive)
            throw ArgumentError("invalid label in sample " + std::to_string(i));
        if (i > 0 && !(s.t > samples_[i - 1].t))
            throw OrderingError("timestamps not strictly increasing at sample " + std::to_string(i));
    }
}

TimeSeries TimeSeries::slice(std::size_t first, std::size_t count) const {
    if (first > samples_.size() || count > samples_.size() - first)
        throw ArgumentError("slice out of range");
    auto b = samples_.begin() + static_cast<std::ptrdiff_t>(first);
    return TimeSeries(rate_, std::vector<SensorSample>(b, b + static_cast<std::ptrdiff_t>(count)));
}

std::size_t TimeSeries::count(Label l) const {
    return static_cast<std::size_t>(
        std::count_if(samples_.begin(), samples_.end(), [l](const SensorSample& s) { return s.label == l; }));
}

namespace {

std::string_view trim_cr(std::string_view s) {
    while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.remove_suffix(1);
    return s;
}

double parse_double(std::string_view field, std::size_t line) {
    double v = 0.0;
    const char* first = field.data();
    const char* last = field.data() + field.size();
    if (!field.empty() && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || field.empty())
        throw ParseError(line, "non-numeric field '" + std::string(field) + "'");
    if (!std::isfinite(v)) throw ParseError(line, "non-finite field '" + std::string(field) + "'");
    return v;
}

Label parse_label(std::string_view field, std::size_t line) {
    if (field == "1") return Label::positive;
    if (field == "-1") return Label::negative;
    throw ParseError(line, "label must be -1 or 1, got '" + std::string(field) + "'");
}

double median(std::vector<double> v) {
    const std::size_t n = v.size();
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(n / 2), v.end());
    const double hi = v[n / 2];
    if (n % 2 == 1) return hi;
    const double lo = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(n / 2));
    return 0.5 * (lo + hi);
}

std::string format_g9(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

} // namespace

TimeSeries parse_csv(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line)) throw ParseError(1, "missing header");
    ++line_no;
    if (trim_cr(line) != kSeriesHeader)
        throw ParseError(1, std::string("header must be '") + kSeriesHeader + "'");

    std::vector<SensorSample> samples;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view row = trim_cr(line);
        if (row.empty()) continue;
        std::string_view fields[6];
        std::size_t n = 0, start = 0;
        for (std::size_t i = 0; i <= row.size(); ++i) {
            if (i == row.size() || row[i] == ',') {
                if (n == 6) throw ParseError(line_no, "expected 6 fields");
                fields[n++] = row.substr(start, i - start);
                start = i + 1;
            }
        }
        if (n != 6) throw ParseError(line_no, "expected 6 fields, got " + std::to_string(n));
        SensorSample s;
        s.t = parse_double(fields[0], line_no);
        s.heave = parse_double(fields[1], line_no);
        s.surge = parse_double(fields[2], line_no);
        s.sway = parse_double(fields[3], line_no);
        s.depth = parse_double(fields[4], line_no);
        s.label = parse_label(fields[5], line_no);
        if (!samples.empty() && !(s.t > samples.back().t))
            throw OrderingError("line " + std::to_string(line_no) + ": timestamp " + std::string(fields[0]) +
                                " does not increase");
        samples.push_back(s);
    }

    double rate = 25.0;
    if (samples.size() >= 2) {
        std::vector<double> gaps;
        gaps.reserve(samples.size() - 1);
        for (std::size_t i = 1; i < samples.size(); ++i) gaps.push_back(samples[i].t - samples[i - 1].t);
        rate = 1.0 / median(std::move(gaps));
    }
    return TimeSeries(rate, std::move(samples));
}

TimeSeries parse_csv(const std::string& text) {
    std::istringstream in(text);
    return parse_csv(in);
}

void emit_csv(const TimeSeries& series, std::ostream& out) {
    out << kSeriesHeader << '\n';
    for (const auto& s : series.samples()) {
        out << format_g9(s.t) << ',' << format_g9(s.heave) << ',' << format_g9(s.surge) << ','
            << format_g9(s.sway) << ',' << format_g9(s.depth) << ','
            << (s.label == Label::positive ? "1" : "-1") << '\n';
    }
}

std::string emit_csv(const TimeSeries& series) {
    std::ostringstream out;
    emit_csv(series, out);
    return out.str();
}

void SynthConfig::validate() const {
    if (!(duration >= 0.0)) throw ConfigError("duration must be >= 0");
    if (!(rate > 0.0)) throw ConfigError("rate must be > 0");
    if (!(noise_std >= 0.0)) throw ConfigError("noise std must be >= 0");
    if (!(bout_min > 0.0) || !(bout_mean >= bout_min)) throw ConfigError("need 0 < bout_min <= bout_mean");
    if (!(swim_min > 0.0) || !(swim_mean >= swim_min)) throw ConfigError("need 0 < swim_min <= swim_mean");
    if (!(dive_period > 0.0)) throw ConfigError("dive period must be > 0");
}

TimeSeries synthesize(const SynthConfig& cfg) {
    cfg.validate();
    constexpr double two_pi = 2.0 * std::numbers::pi;
    Rng rng(cfg.seed);

    const auto n = static_cast<std::size_t>(std::floor(cfg.duration * cfg.rate + 1e-9));
    std::vector<SensorSample> samples;
    samples.reserve(n);

    // Regime boundaries are drawn up front; each segment also fixes its own
    // phases and burst envelope.
    struct Segment {
        double end;
        Label label;
        double phase[3];
        double envelope;
        double plateau;
    };
    std::vector<Segment> segments;
    double t_end = 0.0;
    Label regime = Label::negative;
    while (t_end < cfg.duration) {
        Segment seg{};
        double len = regime == Label::negative ? cfg.swim_min + rng.exponential(cfg.swim_mean - cfg.swim_min)
                                               : cfg.bout_min + rng.exponential(cfg.bout_mean - cfg.bout_min);
        // The first swim never covers more than half the record, so any
        // duration >= 2 * bout_mean contains a handling bout.
        if (segments.empty()) len = std::min(len, 0.5 * cfg.duration);
        seg.end = t_end + len;
        seg.label = regime;
        for (double& p : seg.phase) p = rng.uniform(0.0, two_pi);
        seg.envelope = rng.uniform(0.6, 1.0);
        seg.plateau = cfg.dive_depth + cfg.dive_amp * std::sin(two_pi * t_end / cfg.dive_period);
        segments.push_back(seg);
        t_end = seg.end;
        regime = regime == Label::negative ? Label::positive : Label::negative;
    }

    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / cfg.rate;
        while (k + 1 < segments.size() && t >= segments[k].end) ++k;
        const Segment& seg = segments[k];
        SensorSample s;
        s.t = t;
        s.label = seg.label;
        if (seg.label == Label::negative) {
            const double w = two_pi * cfg.swim_freq * t;
            s.heave = cfg.swim_amp * std::sin(w + seg.phase[0]);
            s.surge = 0.5 * cfg.swim_amp * std::sin(2.0 * w + seg.phase[1]);
            s.sway = 0.6 * cfg.swim_amp * std::sin(w + seg.phase[2]);
            s.depth = cfg.dive_depth + cfg.dive_amp * std::sin(two_pi * t / cfg.dive_period);
        } else {
            const double w = two_pi * cfg.burst_freq * t;
            const double a = cfg.burst_amp * seg.envelope;
            s.heave = cfg.handling_heave + 0.3 * a * std::sin(w + seg.phase[0]);
            s.surge = a * std::sin(w + seg.phase[1]) + 0.5 * a * rng.normal();
            s.sway = a * std::sin(1.3 * w + seg.phase[2]) + 0.5 * a * rng.normal();
            s.depth = seg.plateau;
        }
        s.heave += cfg.noise_std * rng.normal();
        s.surge += cfg.noise_std * rng.normal();
        s.sway += cfg.noise_std * rng.normal();
        s.depth += 0.02 * rng.normal();
        samples.push_back(s);
    }
    return TimeSeries(cfg.rate, std::move(samples));
}

std::vector<TimeSeries> split_stream(const TimeSeries& series, std::size_t chunk_samples) {
    if (chunk_samples == 0) throw ArgumentError("chunk length must be >= 1");
    std::vector<TimeSeries> out;
    const std::size_t n = series.size();
    const std::size_t full = n / chunk_samples;
    if (full == 0) {
        if (n > 0) out.push_back(series);
        return out;
    }
    for (std::size_t c = 0; c < full; ++c) {
        const std::size_t first = c * chunk_samples;
        const std::size_t count = (c + 1 == full) ? n - first : chunk_samples;
        out.push_back(series.slice(first, count));
    }
    return out;
}

} // namespace preyclass
