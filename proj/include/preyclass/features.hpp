#pragma once

#include "preyclass/windowing.hpp"

#include <array>
#include <span>
#include <vector>

namespace preyclass {

inline constexpr std::size_t kFeatureCount = 30;

/// Layout of the 30-value feature vector:
///   [0, 24)  per channel c: mean, std, min, max, skew, kurtosis at 6*c + k
///   [24, 30) Pearson correlations for (heave,surge) (heave,sway) (heave,depth)
///            (surge,sway) (surge,depth) (sway,depth)
///
/// Moments are population moments; kurtosis is excess kurtosis. A channel whose
/// samples are all equal has skew, kurtosis and every correlation it takes part
/// in set to 0.
using FeatureVector = LabeledVector;

struct ChannelStats {
    double mean = 0, std = 0, min = 0, max = 0, skew = 0, kurtosis = 0;
};

ChannelStats channel_stats(std::span<const double> x);

/// Returns 0 when either input is constant.
double pearson(std::span<const double> x, std::span<const double> y);

/// Throws ArgumentError unless the window length is a multiple of 4 with at
/// least two samples per channel.
FeatureVector extract(const Window& w);

std::vector<FeatureVector> extract_all(std::span<const Window> windows);

/// Train-set mean/std standardization applied to feature datasets before
/// SVM and IDNN training.
struct Standardizer {
    std::vector<double> mean;
    std::vector<double> scale; // std, 1 where the std is zero

    static Standardizer fit(std::span<const LabeledVector> rows);
    std::vector<double> apply(std::span<const double> x) const;
    std::vector<LabeledVector> apply(std::span<const LabeledVector> rows) const;
    bool empty() const { return mean.empty(); }
};

} // namespace preyclass
