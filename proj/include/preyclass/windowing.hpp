#pragma once

#include "preyclass/data.hpp"

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace preyclass {

struct WindowConfig {
    double window_seconds = 1.0;
    double overlap_seconds = 0.5;
    double rate = 25.0;

    /// round(window_seconds * rate)
    std::size_t window_samples() const;
    /// floor(overlap_seconds * rate). 12 for 0.5 s at 25 Hz.
    std::size_t overlap_samples() const;
    std::size_t hop_samples() const { return window_samples() - overlap_samples(); }

    void validate() const; // throws ConfigError
};

/// A fixed-length vector with a single label. Used both for flattened raw
/// windows (channel-major: heave block, surge block, sway block, depth block)
/// and for feature vectors.
struct LabeledVector {
    std::vector<double> values;
    Label label = Label::negative;

    bool operator==(const LabeledVector&) const = default;
};

using Window = LabeledVector;

/// Number of complete windows for n samples.
std::size_t window_count(std::size_t n, std::size_t window_samples, std::size_t hop);

/// Cuts the series into complete windows starting at 0, h, 2h, ...
std::vector<Window> segment(const TimeSeries& series, const WindowConfig& cfg);

/// Majority label; an exact tie goes to the positive class.
Label label_window(std::span<const Label> step_labels);

/// Undersamples the majority class to the minority count and shuffles.
std::vector<Window> balance(std::span<const Window> windows, std::uint64_t seed);

/// CSV with header `label,<prefix>1,...,<prefix>N`, one row per vector.
/// Values are written with 17 significant digits so they round-trip exactly.
void write_vectors_csv(std::span<const LabeledVector> rows, const std::string& prefix, std::ostream& out);

struct VectorTable {
    std::string prefix; // "v" for raw windows, "f" for features
    std::vector<LabeledVector> rows;
};

/// Reads a table written by write_vectors_csv. Throws ParseError.
VectorTable read_vectors_csv(std::istream& in);

} // namespace preyclass
