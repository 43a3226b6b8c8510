#pragma once

#include "preyclass/windowing.hpp"

#include <cstddef>
#include <string>

namespace preyclass {

inline constexpr double kDefaultBytesPerParam = 8.0;
inline constexpr double kDefaultCapacityBytes = 8.0 * 1024.0 * 1024.0; // 8 MiB

/// footprint_kb = parameter_count * bytes_per_param / 1024
struct FootprintReport {
    std::size_t parameter_count = 0;
    double bytes_per_param = kDefaultBytesPerParam;
    double footprint_kb = 0.0;
};

FootprintReport footprint_from_count(std::size_t parameter_count, double bytes_per_param = kDefaultBytesPerParam);

/// Weight-matrix entries only: n_in * n_hidden + n_hidden * n_out.
std::size_t idnn_parameter_count(std::size_t n_in, std::size_t n_hidden, std::size_t n_out = 1);
/// Support vectors, their coefficients, and the bias: n_sv * (dim + 1) + 1.
std::size_t svm_parameter_count(std::size_t n_sv, std::size_t dim);
/// nnz(W_in) + nnz(W) + readout weights + readout bias.
std::size_t esn_parameter_count(std::size_t nnz_in, std::size_t nnz_recurrent, std::size_t n_reservoir);

enum class StorageMode { raw_logging, classified };

std::string to_string(StorageMode m);
StorageMode storage_mode_from_string(const std::string& s);

/// `rate` is bytes per second for raw logging and bits per second for
/// classified output.
struct StorageScenario {
    double capacity_bytes = kDefaultCapacityBytes;
    StorageMode mode = StorageMode::raw_logging;
    double rate = 400.0;
};

struct Autonomy {
    double seconds = 0.0;
    double hours = 0.0;
    double days = 0.0;
};

/// Time until storage is full. Throws ArgumentError on a non-positive rate or
/// capacity.
Autonomy autonomy(const StorageScenario& s);

/// Boolean outputs per second of a window classifier: 1 / nominal hop seconds.
double classification_rate(const WindowConfig& cfg);
/// A stream classifier emits one output per sample.
inline double stream_classification_rate(double sample_rate) { return sample_rate; }

} // namespace preyclass
