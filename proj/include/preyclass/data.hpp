#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace preyclass {

/// Class label. Prey handling is the positive class.
enum class Label : int { negative = -1, positive = 1 };

inline double to_target(Label l) { return static_cast<double>(static_cast<int>(l)); }
Label label_from_int(long v); // throws ArgumentError unless v is -1 or 1

/// Channel order is fixed throughout the library.
enum class Channel : int { heave = 0, surge = 1, sway = 2, depth = 3 };
inline constexpr std::size_t kChannels = 4;

struct SensorSample {
    double t = 0.0;     // seconds
    double heave = 0.0; // g
    double surge = 0.0; // g
    double sway = 0.0;  // g
    double depth = 0.0; // meters
    Label label = Label::negative;

    double channel(std::size_t c) const;
    bool operator==(const SensorSample&) const = default;
};

/// Ordered, labeled 4-channel stream. Immutable once constructed; the
/// constructor validates every invariant.
class TimeSeries {
public:
    TimeSeries() = default;
    /// Throws OrderingError on non-increasing timestamps, ArgumentError on
    /// non-finite values or rate <= 0.
    TimeSeries(double rate, std::vector<SensorSample> samples);

    double rate() const noexcept { return rate_; }
    std::size_t size() const noexcept { return samples_.size(); }
    bool empty() const noexcept { return samples_.empty(); }
    const SensorSample& operator[](std::size_t i) const { return samples_[i]; }
    std::span<const SensorSample> samples() const noexcept { return samples_; }

    /// Samples [first, first + count) as a new series. Timestamps are kept.
    TimeSeries slice(std::size_t first, std::size_t count) const;

    std::size_t count(Label l) const;

    bool operator==(const TimeSeries&) const = default;

private:
    double rate_ = 25.0;
    std::vector<SensorSample> samples_;
};

inline constexpr const char* kSeriesHeader = "t,heave,surge,sway,depth,label";

/// Parses the `t,heave,surge,sway,depth,label` CSV. The rate is the reciprocal
/// of the median timestamp spacing (25 Hz when fewer than two rows).
TimeSeries parse_csv(std::istream& in);
TimeSeries parse_csv(const std::string& text);

/// Writes the same schema. Numeric fields use 9 significant digits.
void emit_csv(const TimeSeries& series, std::ostream& out);
std::string emit_csv(const TimeSeries& series);

/// Parameters of the synthetic two-regime generator.
struct SynthConfig {
    std::uint64_t seed = 42;
    double duration = 600.0; // seconds
    double rate = 25.0;      // Hz

    double bout_mean = 6.0; // mean prey-handling bout length, seconds
    double bout_min = 2.0;
    double swim_mean = 12.0; // mean swimming segment length, seconds
    double swim_min = 3.0;

    double swim_freq = 1.0;    // Hz, stroke oscillation
    double burst_freq = 4.0;   // Hz, head-jerk oscillation during handling
    double swim_amp = 0.25;    // g
    double burst_amp = 0.8;    // g, surge/sway burst amplitude
    double handling_heave = 0.6; // g, posture offset on heave while handling
    double noise_std = 0.02;   // g

    double dive_depth = 20.0;  // meters, mean depth of the dive profile
    double dive_amp = 15.0;    // meters
    double dive_period = 90.0; // seconds

    void validate() const; // throws ConfigError
};

/// Deterministic function of cfg: alternates swimming segments (label -1) and
/// prey-handling bouts (label +1), starting with swimming.
TimeSeries synthesize(const SynthConfig& cfg);

/// Splits a series into consecutive chunks of `chunk_samples` samples; the
/// trailing remainder is appended to the last chunk.
std::vector<TimeSeries> split_stream(const TimeSeries& series, std::size_t chunk_samples);

} // namespace preyclass
