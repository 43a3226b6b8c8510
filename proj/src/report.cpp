#include "preyclass/report.hpp"

#include "preyclass/error.hpp"

#include <cstdio>
#include <ostream>

namespace preyclass {

using nlohmann::json;

std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::vector<std::string> hyper_columns(Family f) {
    switch (f) {
    case Family::idnn: return {"hidden_kind", "hidden", "eta", "alpha", "lambda"};
    case Family::svm: return {"kernel", "C"};
    case Family::esn: return {"units", "scaling", "leaky"};
    }
    return {};
}

std::vector<std::string> hyper_values(const Hyper& h) {
    return std::visit(
        [](const auto& c) -> std::vector<std::string> {
            using T = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<T, IdnnHyper>)
                return {to_string(c.kind), std::to_string(c.hidden), format_number(c.eta), format_number(c.alpha),
                        format_number(c.lambda)};
            else if constexpr (std::is_same_v<T, SvmHyper>)
                return {to_string(c.kernel), format_number(c.C)};
            else
                return {std::to_string(c.units), format_number(c.scaling), format_number(c.leaky)};
        },
        h);
}

namespace {

json hyper_to_json(const Hyper& h) {
    json j = json::object();
    const auto f = static_cast<Family>(h.index());
    const auto cols = hyper_columns(f);
    const auto vals = hyper_values(h);
    for (std::size_t i = 0; i < cols.size(); ++i) j[cols[i]] = vals[i];
    return j;
}

void write_row(std::ostream& out, const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
    out << '\n';
}

} // namespace

void write_report_csv(const EvaluationReport& r, std::ostream& out) {
    std::vector<std::string> header{"family", "split"};
    for (auto& c : hyper_columns(r.family)) header.push_back(c);
    for (auto c : {"mean_val_acc", "test_acc", "test_f1", "acc_std", "f1_std", "footprint_kb"}) header.push_back(c);
    write_row(out, header);
    const std::string fam = to_string(r.family);
    for (std::size_t s = 0; s < r.splits.size(); ++s) {
        const auto& sp = r.splits[s];
        std::vector<std::string> row{fam, std::to_string(s)};
        for (auto& v : hyper_values(sp.selected)) row.push_back(v);
        row.push_back(format_number(sp.mean_val_acc));
        row.push_back(format_number(sp.test.accuracy));
        row.push_back(format_number(sp.test.f1));
        row.push_back("");
        row.push_back("");
        row.push_back(format_number(sp.footprint_kb));
        write_row(out, row);
    }
    std::vector<std::string> row{fam, "mean"};
    for (auto& v : hyper_values(r.selected())) row.push_back(v);
    row.push_back(format_number(r.mean_val_acc()));
    row.push_back(format_number(r.acc_mean));
    row.push_back(format_number(r.f1_mean));
    row.push_back(format_number(r.acc_std));
    row.push_back(format_number(r.f1_std));
    row.push_back(format_number(r.mean_footprint_kb()));
    write_row(out, row);
}

json report_to_json(const EvaluationReport& r) {
    json splits = json::array();
    for (const auto& sp : r.splits) {
        json cv = json::array();
        for (const auto& c : sp.cv_table)
            cv.push_back({{"hyperparameters", hyper_to_json(c.hyper)},
                          {"mean_val_acc", c.mean_val_acc},
                          {"footprint_kb", c.footprint_kb},
                          {"failed_folds", c.failed_folds},
                          {"excluded", c.excluded}});
        splits.push_back({{"seed", sp.seed},
                          {"selected", hyper_to_json(sp.selected)},
                          {"mean_val_acc", sp.mean_val_acc},
                          {"confusion", {{"tp", sp.test_cm.tp}, {"tn", sp.test_cm.tn}, {"fp", sp.test_cm.fp}, {"fn", sp.test_cm.fn}}},
                          {"test_acc", sp.test.accuracy},
                          {"test_precision", sp.test.precision},
                          {"test_recall", sp.test.recall},
                          {"test_f1", sp.test.f1},
                          {"footprint_kb", sp.footprint_kb},
                          {"n_train", sp.n_train},
                          {"n_test", sp.n_test},
                          {"cv_table", std::move(cv)}});
    }
    return {{"family", to_string(r.family)},
            {"selected", hyper_to_json(r.selected())},
            {"mean_val_acc", r.mean_val_acc()},
            {"test_acc", r.acc_mean},
            {"test_f1", r.f1_mean},
            {"acc_std", r.acc_std},
            {"f1_std", r.f1_std},
            {"footprint_kb", r.mean_footprint_kb()},
            {"splits", std::move(splits)}};
}

void write_cv_table_csv(const EvaluationReport& r, std::ostream& out) {
    std::vector<std::string> header{"family", "split"};
    for (auto& c : hyper_columns(r.family)) header.push_back(c);
    for (auto c : {"mean_val_acc", "footprint_kb", "failed_folds", "excluded"}) header.push_back(c);
    write_row(out, header);
    for (std::size_t s = 0; s < r.splits.size(); ++s)
        for (const auto& c : r.splits[s].cv_table) {
            std::vector<std::string> row{to_string(r.family), std::to_string(s)};
            for (auto& v : hyper_values(c.hyper)) row.push_back(v);
            row.push_back(format_number(c.mean_val_acc));
            row.push_back(format_number(c.footprint_kb));
            row.push_back(std::to_string(c.failed_folds));
            row.push_back(c.excluded ? "1" : "0");
            write_row(out, row);
        }
}

void write_footprint_csv(const std::vector<FootprintRow>& rows, std::ostream& out) {
    out << "config,parameter_count,footprint_kb,acc,f1\n";
    for (const auto& r : rows)
        write_row(out, {r.config, std::to_string(r.fp.parameter_count), format_number(r.fp.footprint_kb),
                        r.acc ? format_number(*r.acc) : "", r.f1 ? format_number(*r.f1) : ""});
}

json footprint_to_json(const std::vector<FootprintRow>& rows) {
    json a = json::array();
    for (const auto& r : rows) {
        json j{{"config", r.config},
               {"parameter_count", r.fp.parameter_count},
               {"bytes_per_param", r.fp.bytes_per_param},
               {"footprint_kb", r.fp.footprint_kb}};
        if (r.acc) j["acc"] = *r.acc;
        if (r.f1) j["f1"] = *r.f1;
        a.push_back(std::move(j));
    }
    return a;
}

void write_autonomy_csv(const std::vector<AutonomyRow>& rows, std::ostream& out) {
    out << "scenario,mode,rate,rate_unit,seconds,hours,days\n";
    for (const auto& r : rows)
        write_row(out, {r.scenario, to_string(r.storage.mode), format_number(r.storage.rate),
                        r.storage.mode == StorageMode::raw_logging ? "B/s" : "bit/s", format_number(r.result.seconds),
                        format_number(r.result.hours), format_number(r.result.days)});
}

json autonomy_to_json(const std::vector<AutonomyRow>& rows) {
    json a = json::array();
    for (const auto& r : rows)
        a.push_back({{"scenario", r.scenario},
                     {"mode", to_string(r.storage.mode)},
                     {"capacity_bytes", r.storage.capacity_bytes},
                     {"rate", r.storage.rate},
                     {"rate_unit", r.storage.mode == StorageMode::raw_logging ? "B/s" : "bit/s"},
                     {"seconds", r.result.seconds},
                     {"hours", r.result.hours},
                     {"days", r.result.days}});
    return a;
}

std::vector<AutonomyRow> reference_autonomy_rows(double capacity_bytes) {
    // 100 samples/s of 4-byte integers; one bit per window classification.
    const double raw_rate = 25.0 * 4.0 * 4.0;
    const double rate_1s = classification_rate({1.0, 0.5, 25.0});
    const double rate_04s = classification_rate({0.4, 0.2, 25.0});
    std::vector<AutonomyRow> rows;
    for (auto [name, mode, rate] : {std::tuple{"bio-logging", StorageMode::raw_logging, raw_rate},
                                    std::tuple{"windows-1s", StorageMode::classified, rate_1s},
                                    std::tuple{"windows-0.4s", StorageMode::classified, rate_04s}}) {
        StorageScenario s{capacity_bytes, mode, rate};
        rows.push_back({name, s, autonomy(s)});
    }
    return rows;
}

std::vector<FootprintRow> reference_footprint_rows(double bytes_per_param, double connectivity) {
    std::vector<FootprintRow> rows;
    for (auto [name, n_in, hidden] : {std::tuple{"idnn-raw_1 (100-50-1)", 100, 50},
                                      std::tuple{"idnn-features_1 (30-50-1)", 30, 50},
                                      std::tuple{"idnn-raw_0.4 (40-50-1)", 40, 50},
                                      std::tuple{"idnn-features_0.4 (30-5-1)", 30, 5}})
        rows.push_back({name, footprint_from_count(idnn_parameter_count(n_in, hidden), bytes_per_param), {}, {}});
    for (std::size_t units : {5, 10, 100}) {
        EsnConfig cfg;
        cfg.n_reservoir = units;
        cfg.connectivity = connectivity;
        rows.push_back({"esn-" + std::to_string(units) + " (connectivity " + format_number(connectivity) + ")",
                        footprint_from_count(esn_parameter_count(units * kChannels, cfg.recurrent_nnz(), units),
                                             bytes_per_param),
                        {}, {}});
    }
    rows.push_back({"esn-5 (dense)", footprint_from_count(esn_parameter_count(5 * kChannels, 25, 5), bytes_per_param), {}, {}});
    return rows;
}

} // namespace preyclass
