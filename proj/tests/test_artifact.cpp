#include "preyclass/artifact.hpp"
#include "preyclass/error.hpp"
#include "preyclass/rng.hpp"

#include <doctest.h>

#include <sstream>

using namespace preyclass;

namespace {

std::vector<LabeledVector> blobs(std::size_t n, std::size_t dim, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<LabeledVector> d(n);
    for (std::size_t i = 0; i < n; ++i) {
        d[i].label = i % 2 ? Label::positive : Label::negative;
        for (std::size_t k = 0; k < dim; ++k) d[i].values.push_back(rng.normal() + (i % 2 ? 1.0 : -1.0));
    }
    return d;
}

ModelArtifact round_trip(const ModelArtifact& a) {
    std::stringstream ss;
    save_artifact(a, ss);
    return load_artifact(ss);
}

} // namespace

TEST_CASE("IDNN artifact round trip preserves predictions and footprint") {
    const auto data = blobs(30, 4, 1);
    IdnnConfig cfg;
    cfg.n_in = 4;
    cfg.n_hidden = 3;
    cfg.hidden_kind = HiddenKind::rbf;
    cfg.epochs = 50;
    ModelArtifact a{IdnnArtifact{cfg, train_rprop(cfg, data).model}, Standardizer::fit(data)};
    const auto b = round_trip(a);
    CHECK(b.family() == Family::idnn);
    for (const auto& r : data) CHECK(predict_score(b, r.values) == predict_score(a, r.values));
    CHECK(footprint(a).parameter_count == 4 * 3 + 3);
    CHECK(footprint(b).footprint_kb == footprint(a).footprint_kb);
    const auto j = to_json(a);
    CHECK(j.at("kind") == "idnn");
    CHECK(j.at("dims").at("n_hidden") == 3);
    CHECK(j.at("config").at("epochs") == 50);
}

TEST_CASE("SVM artifact round trip") {
    const auto data = blobs(24, 3, 2);
    ModelArtifact a{train_smo(data, {KernelKind::rbf, 1.0, 1.0}, 10.0), {}};
    const auto b = round_trip(a);
    CHECK(b.family() == Family::svm);
    for (const auto& r : data) CHECK(predict_score(b, r.values) == predict_score(a, r.values));
    const auto& m = std::get<SvmModel>(a.model);
    CHECK(footprint(a).parameter_count == m.support.size() * 4 + 1);
}

TEST_CASE("ESN artifact round trip and state checks") {
    EsnConfig cfg;
    cfg.n_reservoir = 10;
    cfg.connectivity = 0.2;
    SynthConfig sc;
    sc.duration = 60;
    const auto series = synthesize(sc);
    ModelArtifact untrained{init_esn(cfg), {}};
    CHECK_THROWS_AS(footprint(untrained), StateError);

    ModelArtifact a{fit_readout(init_esn(cfg), series), {}};
    const auto b = round_trip(a);
    const auto& ma = std::get<EsnModel>(a.model);
    const auto& mb = std::get<EsnModel>(b.model);
    CHECK(stream_scores(ma, series) == stream_scores(mb, series));
    CHECK(footprint(a).parameter_count == 40 + 20 + 10 + 1);
    CHECK_THROWS_AS(predict(a, std::vector<double>(4, 0.0)), StateError);
    CHECK(to_json(a).at("w").at(0).size() == 3);
}

TEST_CASE("load_artifact rejects malformed documents") {
    std::istringstream not_json("{ nope");
    CHECK_THROWS_AS(load_artifact(not_json), ParseError);
    std::istringstream wrong_kind(R"({"kind": "tree"})");
    CHECK_THROWS_AS(load_artifact(wrong_kind), ParseError);
    std::istringstream missing(R"({"kind": "svm", "C": 1})");
    CHECK_THROWS_AS(load_artifact(missing), ParseError);
}
