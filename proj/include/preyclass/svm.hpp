#pragma once

#include "preyclass/windowing.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace preyclass {

enum class KernelKind { linear, rbf, poly3 };

std::string to_string(KernelKind k);
KernelKind kernel_kind_from_string(const std::string& s);

/// rbf is exp(-|x-y|^2 / (2 sigma^2)); poly3 is the inhomogeneous (x.y + c)^3.
struct KernelSpec {
    KernelKind kind = KernelKind::rbf;
    double sigma = 1.0;
    double c = 1.0;

    void validate() const; // throws ConfigError
    bool operator==(const KernelSpec&) const = default;
};

double kernel(const KernelSpec& k, std::span<const double> x, std::span<const double> y);

struct SupportVector {
    std::vector<double> x;
    Label y = Label::positive;
    double alpha = 0.0; // in (0, C]
};

/// f(x) = sum_i alpha_i y_i k(x_i, x) + b
struct SvmModel {
    KernelSpec kernel;
    double C = 1.0;
    std::size_t dim = 0;
    std::vector<SupportVector> support;
    double b = 0.0;

    void validate() const; // throws ArgumentError
};

struct SmoOptions {
    double tol = 1e-3;             // KKT tolerance
    double alpha_eps = 1e-10;      // smallest accepted alpha change
    double retain_threshold = 1e-8;
    std::size_t max_passes = 10000;
    std::uint64_t seed = 7;        // start offsets of the fallback scans
};

/// Full solver output: one alpha per training example, the threshold and the
/// number of outer passes used.
struct SmoSolution {
    std::vector<double> alpha;
    double b = 0.0;
    std::size_t passes = 0;
};

/// Platt's sequential minimal optimization with the second-choice heuristic
/// and an error cache over all examples. Throws TrainingError on single-class
/// input and ConvergenceError after max_passes outer passes.
SmoSolution solve_smo(std::span<const LabeledVector> data, const KernelSpec& k, double C, const SmoOptions& opt = {});

SvmModel train_smo(std::span<const LabeledVector> data, const KernelSpec& k, double C, const SmoOptions& opt = {});

double decide(const SvmModel& m, std::span<const double> x);

/// Dual objective sum(alpha) - 1/2 sum_ij alpha_i alpha_j y_i y_j k(x_i, x_j).
double dual_objective(std::span<const LabeledVector> data, std::span<const double> alpha, const KernelSpec& k);
double dual_objective(const SvmModel& m);

} // namespace preyclass
