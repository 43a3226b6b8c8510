#pragma once

#include "preyclass/budget.hpp"
#include "preyclass/esn.hpp"
#include "preyclass/features.hpp"
#include "preyclass/idnn.hpp"
#include "preyclass/svm.hpp"

#include <nlohmann/json.hpp>

#include <iosfwd>
#include <span>
#include <string>
#include <variant>

namespace preyclass {

enum class Family { idnn, svm, esn };

std::string to_string(Family f);
Family family_from_string(const std::string& s);

struct IdnnArtifact {
    IdnnConfig config;
    IdnnModel model;
};

/// Trained parameters of exactly one classifier family, plus the input
/// standardization (empty for raw inputs and for ESN).
struct ModelArtifact {
    std::variant<IdnnArtifact, SvmModel, EsnModel> model;
    Standardizer standardizer;

    Family family() const;
};

/// Score of a window-level classifier on an unscaled input vector. Throws
/// StateError for ESN artifacts.
double predict_score(const ModelArtifact& a, std::span<const double> x);
Label predict(const ModelArtifact& a, std::span<const double> x);

/// Parameter count per family (see budget.hpp); throws StateError for an ESN
/// whose readout has not been trained.
FootprintReport footprint(const ModelArtifact& a, double bytes_per_param = kDefaultBytesPerParam);

nlohmann::json to_json(const ModelArtifact& a);
ModelArtifact artifact_from_json(const nlohmann::json& j); // throws ParseError

void save_artifact(const ModelArtifact& a, std::ostream& out);
ModelArtifact load_artifact(std::istream& in);

} // namespace preyclass
