#include "preyclass/windowing.hpp"

#include "preyclass/error.hpp"
#include "preyclass/rng.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <string_view>

namespace preyclass {

std::size_t WindowConfig::window_samples() const {
    const double w = std::round(window_seconds * rate);
    return w < 0.0 ? 0 : static_cast<std::size_t>(w);
}

std::size_t WindowConfig::overlap_samples() const {
    // The epsilon absorbs representation error such as 0.2 * 25 = 4.999...
    const double o = std::floor(overlap_seconds * rate + 1e-9);
    return o < 0.0 ? 0 : static_cast<std::size_t>(o);
}

void WindowConfig::validate() const {
    if (!(rate > 0.0)) throw ConfigError("window rate must be > 0");
    if (!(overlap_seconds >= 0.0) || !(overlap_seconds < window_seconds))
        throw ConfigError("need 0 <= overlap < window length");
    if (window_samples() < 1) throw ConfigError("window must span at least one sample");
    if (overlap_samples() >= window_samples()) throw ConfigError("overlap must be shorter than the window in samples");
}

std::size_t window_count(std::size_t n, std::size_t window_samples, std::size_t hop) {
    if (window_samples == 0 || hop == 0) throw ArgumentError("window and hop must be >= 1");
    if (n < window_samples) return 0;
    return (n - window_samples) / hop + 1;
}

Label label_window(std::span<const Label> step_labels) {
    if (step_labels.empty()) throw ArgumentError("cannot label an empty window");
    const auto pos = std::count(step_labels.begin(), step_labels.end(), Label::positive);
    const auto neg = static_cast<std::ptrdiff_t>(step_labels.size()) - pos;
    return pos >= neg ? Label::positive : Label::negative;
}

std::vector<Window> segment(const TimeSeries& series, const WindowConfig& cfg) {
    cfg.validate();
    if (std::abs(series.rate() - cfg.rate) > 1e-6 * cfg.rate)
        throw ConfigError("series rate " + std::to_string(series.rate()) + " Hz does not match window rate " +
                          std::to_string(cfg.rate) + " Hz");
    const std::size_t w = cfg.window_samples();
    const std::size_t hop = cfg.hop_samples();
    const std::size_t count = window_count(series.size(), w, hop);

    std::vector<Window> out;
    out.reserve(count);
    std::vector<Label> labels(w);
    for (std::size_t k = 0; k < count; ++k) {
        const std::size_t start = k * hop;
        Window win;
        win.values.resize(kChannels * w);
        for (std::size_t i = 0; i < w; ++i) {
            const auto& s = series[start + i];
            win.values[0 * w + i] = s.heave;
            win.values[1 * w + i] = s.surge;
            win.values[2 * w + i] = s.sway;
            win.values[3 * w + i] = s.depth;
            labels[i] = s.label;
        }
        win.label = label_window(labels);
        out.push_back(std::move(win));
    }
    return out;
}

std::vector<Window> balance(std::span<const Window> windows, std::uint64_t seed) {
    std::vector<std::size_t> pos, neg;
    for (std::size_t i = 0; i < windows.size(); ++i)
        (windows[i].label == Label::positive ? pos : neg).push_back(i);
    if (pos.empty() || neg.empty()) throw BalanceError("cannot balance: only one class present");

    Rng rng(seed);
    auto& major = pos.size() > neg.size() ? pos : neg;
    const std::size_t keep = std::min(pos.size(), neg.size());
    rng.shuffle(major);
    major.resize(keep);

    std::vector<std::size_t> chosen(pos);
    chosen.insert(chosen.end(), neg.begin(), neg.end());
    std::sort(chosen.begin(), chosen.end());
    rng.shuffle(chosen);

    std::vector<Window> out;
    out.reserve(chosen.size());
    for (auto i : chosen) out.push_back(windows[i]);
    return out;
}

void write_vectors_csv(std::span<const LabeledVector> rows, const std::string& prefix, std::ostream& out) {
    const std::size_t width = rows.empty() ? 0 : rows.front().values.size();
    out << "label";
    for (std::size_t j = 0; j < width; ++j) out << ',' << prefix << (j + 1);
    out << '\n';
    char buf[32];
    for (const auto& r : rows) {
        if (r.values.size() != width) throw ArgumentError("rows have inconsistent widths");
        out << (r.label == Label::positive ? "1" : "-1");
        for (double v : r.values) {
            std::snprintf(buf, sizeof buf, "%.17g", v);
            out << ',' << buf;
        }
        out << '\n';
    }
}

VectorTable read_vectors_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError(1, "missing header");
    if (!line.empty() && line.back() == '\r') line.pop_back();

    VectorTable table;
    std::size_t width = 0;
    {
        std::string_view h(line);
        if (h.substr(0, 5) != "label") throw ParseError(1, "header must start with 'label'");
        h.remove_prefix(5);
        while (!h.empty()) {
            if (h.front() != ',') throw ParseError(1, "malformed header");
            h.remove_prefix(1);
            const auto comma = h.find(',');
            std::string_view col = h.substr(0, comma);
            auto pos = col.find_first_of("0123456789");
            if (pos == std::string_view::npos || pos == 0) throw ParseError(1, "malformed column name");
            std::string prefix(col.substr(0, pos));
            if (width == 0) table.prefix = prefix;
            else if (prefix != table.prefix) throw ParseError(1, "mixed column prefixes");
            if (col.substr(pos) != std::to_string(width + 1)) throw ParseError(1, "columns must be numbered 1..N");
            ++width;
            h = comma == std::string_view::npos ? std::string_view{} : h.substr(comma);
        }
    }

    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::string_view row(line);
        LabeledVector v;
        v.values.reserve(width);
        std::size_t field = 0, start = 0;
        for (std::size_t i = 0; i <= row.size(); ++i) {
            if (i != row.size() && row[i] != ',') continue;
            std::string_view f = row.substr(start, i - start);
            start = i + 1;
            if (field == 0) {
                if (f == "1") v.label = Label::positive;
                else if (f == "-1") v.label = Label::negative;
                else throw ParseError(line_no, "label must be -1 or 1");
            } else {
                double x = 0.0;
                auto [p, ec] = std::from_chars(f.data(), f.data() + f.size(), x);
                if (ec != std::errc() || p != f.data() + f.size() || f.empty() || !std::isfinite(x))
                    throw ParseError(line_no, "non-numeric field '" + std::string(f) + "'");
                v.values.push_back(x);
            }
            ++field;
        }
        if (field != width + 1)
            throw ParseError(line_no, "expected " + std::to_string(width + 1) + " fields, got " + std::to_string(field));
        table.rows.push_back(std::move(v));
    }
    return table;
}

} // namespace preyclass
