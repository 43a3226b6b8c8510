#pragma once

#include "preyclass/budget.hpp"
#include "preyclass/eval.hpp"

#include <nlohmann/json.hpp>

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace preyclass {

/// Tabular outputs. Numbers use up to 10 significant digits; output is a pure
/// function of the inputs, so identical runs give byte-identical files.

/// Columns: family, split, <family hyperparameters>, mean_val_acc, test_acc,
/// test_f1, acc_std, f1_std, footprint_kb. One row per split plus a final
/// `mean` row.
void write_report_csv(const EvaluationReport& r, std::ostream& out);
nlohmann::json report_to_json(const EvaluationReport& r);

/// Every grid cell of every split: family, split, <hyperparameters>,
/// mean_val_acc, footprint_kb, failed_folds, excluded.
void write_cv_table_csv(const EvaluationReport& r, std::ostream& out);

/// Names of the hyperparameter columns for a family.
std::vector<std::string> hyper_columns(Family f);
std::vector<std::string> hyper_values(const Hyper& h);

struct FootprintRow {
    std::string config;
    FootprintReport fp;
    std::optional<double> acc, f1;
};

/// Columns: config, parameter_count, footprint_kb, acc, f1.
void write_footprint_csv(const std::vector<FootprintRow>& rows, std::ostream& out);
nlohmann::json footprint_to_json(const std::vector<FootprintRow>& rows);

struct AutonomyRow {
    std::string scenario;
    StorageScenario storage;
    Autonomy result;
};

/// Columns: scenario, mode, rate, rate_unit, seconds, hours, days.
void write_autonomy_csv(const std::vector<AutonomyRow>& rows, std::ostream& out);
nlohmann::json autonomy_to_json(const std::vector<AutonomyRow>& rows);

/// The three logging scenarios of the storage analysis: raw 400 B/s,
/// classified 1 s / 0.5 s windows (2 bit/s) and 0.4 s / 0.2 s windows (5 bit/s).
std::vector<AutonomyRow> reference_autonomy_rows(double capacity_bytes = kDefaultCapacityBytes);

/// IDNN configurations 100-50, 30-50, 40-50, 30-5 and ESN reservoirs of 5, 10
/// and 100 units (sparse at `connectivity`, plus a dense 5-unit reservoir).
std::vector<FootprintRow> reference_footprint_rows(double bytes_per_param = kDefaultBytesPerParam,
                                                   double connectivity = 0.005);

std::string format_number(double v);

} // namespace preyclass
