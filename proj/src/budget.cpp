#include "preyclass/budget.hpp"

#include "preyclass/error.hpp"

namespace preyclass {

FootprintReport footprint_from_count(std::size_t parameter_count, double bytes_per_param) {
    if (!(bytes_per_param >= 0.0)) throw ArgumentError("bytes per parameter must be >= 0");
    return {parameter_count, bytes_per_param, static_cast<double>(parameter_count) * bytes_per_param / 1024.0};
}

std::size_t idnn_parameter_count(std::size_t n_in, std::size_t n_hidden, std::size_t n_out) {
    return n_in * n_hidden + n_hidden * n_out;
}

std::size_t svm_parameter_count(std::size_t n_sv, std::size_t dim) { return n_sv * (dim + 1) + 1; }

std::size_t esn_parameter_count(std::size_t nnz_in, std::size_t nnz_recurrent, std::size_t n_reservoir) {
    return nnz_in + nnz_recurrent + n_reservoir + 1;
}

std::string to_string(StorageMode m) { return m == StorageMode::raw_logging ? "raw" : "classified"; }

StorageMode storage_mode_from_string(const std::string& s) {
    if (s == "raw" || s == "raw_logging") return StorageMode::raw_logging;
    if (s == "classified") return StorageMode::classified;
    throw ArgumentError("unknown storage mode '" + s + "' (expected raw or classified)");
}

Autonomy autonomy(const StorageScenario& s) {
    if (!(s.capacity_bytes > 0.0)) throw ArgumentError("storage capacity must be > 0");
    if (!(s.rate > 0.0)) throw ArgumentError("data rate must be > 0");
    Autonomy a;
    a.seconds = s.mode == StorageMode::raw_logging ? s.capacity_bytes / s.rate : s.capacity_bytes * 8.0 / s.rate;
    a.hours = a.seconds / 3600.0;
    a.days = a.hours / 24.0;
    return a;
}

double classification_rate(const WindowConfig& cfg) {
    if (!(cfg.window_seconds > 0.0) || !(cfg.overlap_seconds >= 0.0) || !(cfg.overlap_seconds < cfg.window_seconds))
        throw ConfigError("need 0 <= overlap < window length");
    return 1.0 / (cfg.window_seconds - cfg.overlap_seconds);
}

} // namespace preyclass
