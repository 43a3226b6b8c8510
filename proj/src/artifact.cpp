#include "preyclass/artifact.hpp"

#include "preyclass/error.hpp"

#include <istream>
#include <ostream>

namespace preyclass {

using nlohmann::json;

std::string to_string(Family f) {
    switch (f) {
    case Family::idnn: return "idnn";
    case Family::svm: return "svm";
    case Family::esn: return "esn";
    }
    return "?";
}

Family family_from_string(const std::string& s) {
    if (s == "idnn") return Family::idnn;
    if (s == "svm") return Family::svm;
    if (s == "esn") return Family::esn;
    throw ArgumentError("unknown model family '" + s + "' (expected idnn, svm or esn)");
}

Family ModelArtifact::family() const { return static_cast<Family>(model.index()); }

double predict_score(const ModelArtifact& a, std::span<const double> x) {
    const auto scaled = a.standardizer.apply(x);
    if (const auto* idnn = std::get_if<IdnnArtifact>(&a.model)) return forward(idnn->model, scaled);
    if (const auto* svm = std::get_if<SvmModel>(&a.model)) return decide(*svm, scaled);
    throw StateError("ESN models classify streams, not windows");
}

Label predict(const ModelArtifact& a, std::span<const double> x) { return score_label(predict_score(a, x)); }

FootprintReport footprint(const ModelArtifact& a, double bytes_per_param) {
    std::size_t count = 0;
    if (const auto* idnn = std::get_if<IdnnArtifact>(&a.model)) {
        count = idnn_parameter_count(idnn->model.n_in(), idnn->model.n_hidden());
    } else if (const auto* svm = std::get_if<SvmModel>(&a.model)) {
        count = svm_parameter_count(svm->support.size(), svm->dim);
    } else {
        const auto& esn = std::get<EsnModel>(a.model);
        if (!esn.trained) throw StateError("ESN readout has not been trained");
        const auto nnz_in = static_cast<std::size_t>((esn.w_in.array() != 0.0).count());
        count = esn_parameter_count(nnz_in, static_cast<std::size_t>(esn.w.nonZeros()), esn.size());
    }
    return footprint_from_count(count, bytes_per_param);
}

namespace {

json matrix_to_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json r = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) r.push_back(m(i, j));
        rows.push_back(std::move(r));
    }
    return rows;
}

Eigen::MatrixXd matrix_from_json(const json& j, Eigen::Index cols) {
    Eigen::MatrixXd m(static_cast<Eigen::Index>(j.size()), cols);
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (j[i].size() != static_cast<std::size_t>(cols)) throw ParseError(0, "matrix row has wrong width");
        for (Eigen::Index c = 0; c < cols; ++c) m(static_cast<Eigen::Index>(i), c) = j[i][static_cast<std::size_t>(c)].get<double>();
    }
    return m;
}

json vector_to_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Eigen::VectorXd vector_from_json(const json& j) {
    const auto v = j.get<std::vector<double>>();
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

json standardizer_to_json(const Standardizer& s) { return {{"mean", s.mean}, {"scale", s.scale}}; }

Standardizer standardizer_from_json(const json& j) {
    Standardizer s;
    if (j.is_null()) return s;
    s.mean = j.at("mean").get<std::vector<double>>();
    s.scale = j.at("scale").get<std::vector<double>>();
    if (s.mean.size() != s.scale.size()) throw ParseError(0, "standardizer vectors differ in length");
    return s;
}

json idnn_to_json(const IdnnArtifact& a) {
    const auto& m = a.model;
    return {{"kind", "idnn"},
            {"dims", {{"n_in", m.n_in()}, {"n_hidden", m.n_hidden()}, {"n_out", 1}}},
            {"hidden_kind", to_string(m.kind)},
            {"hidden", matrix_to_json(m.hidden)},
            {"hidden_param", vector_to_json(m.hidden_param)},
            {"out_w", vector_to_json(m.out_w)},
            {"out_b", m.out_b},
            {"config", {{"eta", a.config.eta}, {"alpha", a.config.alpha}, {"lambda", a.config.lambda},
                        {"epochs", a.config.epochs}}},
            {"seed", a.config.seed}};
}

IdnnArtifact idnn_from_json(const json& j) {
    IdnnArtifact a;
    const auto n_in = j.at("dims").at("n_in").get<std::size_t>();
    const auto n_hidden = j.at("dims").at("n_hidden").get<std::size_t>();
    a.model.kind = hidden_kind_from_string(j.at("hidden_kind").get<std::string>());
    a.model.hidden = matrix_from_json(j.at("hidden"), static_cast<Eigen::Index>(n_in));
    a.model.hidden_param = vector_from_json(j.at("hidden_param"));
    a.model.out_w = vector_from_json(j.at("out_w"));
    a.model.out_b = j.at("out_b").get<double>();
    if (a.model.n_hidden() != n_hidden) throw ParseError(0, "hidden matrix does not match dims");
    a.model.validate();
    const auto& c = j.at("config");
    a.config.n_in = n_in;
    a.config.n_hidden = n_hidden;
    a.config.hidden_kind = a.model.kind;
    a.config.eta = c.at("eta").get<double>();
    a.config.alpha = c.at("alpha").get<double>();
    a.config.lambda = c.at("lambda").get<double>();
    a.config.epochs = c.at("epochs").get<std::size_t>();
    a.config.seed = j.at("seed").get<std::uint64_t>();
    return a;
}

json svm_to_json(const SvmModel& m) {
    json sv = json::array(), alpha = json::array(), y = json::array();
    for (const auto& s : m.support) {
        sv.push_back(s.x);
        alpha.push_back(s.alpha);
        y.push_back(static_cast<int>(s.y));
    }
    return {{"kind", "svm"},
            {"kernel", {{"kind", to_string(m.kernel.kind)}, {"sigma", m.kernel.sigma}, {"c", m.kernel.c}}},
            {"C", m.C},
            {"dim", m.dim},
            {"support_vectors", std::move(sv)},
            {"alpha", std::move(alpha)},
            {"y", std::move(y)},
            {"b", m.b}};
}

SvmModel svm_from_json(const json& j) {
    SvmModel m;
    const auto& k = j.at("kernel");
    m.kernel.kind = kernel_kind_from_string(k.at("kind").get<std::string>());
    m.kernel.sigma = k.at("sigma").get<double>();
    m.kernel.c = k.at("c").get<double>();
    m.C = j.at("C").get<double>();
    m.dim = j.at("dim").get<std::size_t>();
    m.b = j.at("b").get<double>();
    const auto& sv = j.at("support_vectors");
    const auto& alpha = j.at("alpha");
    const auto& y = j.at("y");
    if (sv.size() != alpha.size() || sv.size() != y.size()) throw ParseError(0, "support vector arrays differ in length");
    for (std::size_t i = 0; i < sv.size(); ++i)
        m.support.push_back({sv[i].get<std::vector<double>>(), label_from_int(y[i].get<long>()), alpha[i].get<double>()});
    m.validate();
    return m;
}

json esn_to_json(const EsnModel& m) {
    const auto& c = m.config;
    json w = json::array();
    for (Eigen::Index r = 0; r < m.w.outerSize(); ++r)
        for (SparseMatrix::InnerIterator it(m.w, r); it; ++it) w.push_back({it.row(), it.col(), it.value()});
    return {{"kind", "esn"},
            {"config", {{"n_reservoir", c.n_reservoir}, {"input_scaling", c.input_scaling}, {"leaky", c.leaky},
                        {"connectivity", c.connectivity}, {"spectral_radius", c.spectral_radius},
                        {"ridge_beta", c.ridge_beta}, {"washout", c.washout}}},
            {"seed", c.seed},
            {"w_in", matrix_to_json(m.w_in)},
            {"w", std::move(w)},
            {"w_out", vector_to_json(m.w_out)},
            {"b_out", m.b_out},
            {"trained", m.trained}};
}

EsnModel esn_from_json(const json& j) {
    EsnModel m;
    const auto& c = j.at("config");
    m.config.n_reservoir = c.at("n_reservoir").get<std::size_t>();
    m.config.input_scaling = c.at("input_scaling").get<double>();
    m.config.leaky = c.at("leaky").get<double>();
    m.config.connectivity = c.at("connectivity").get<double>();
    m.config.spectral_radius = c.at("spectral_radius").get<double>();
    m.config.ridge_beta = c.at("ridge_beta").get<double>();
    m.config.washout = c.at("washout").get<std::size_t>();
    m.config.seed = j.at("seed").get<std::uint64_t>();
    m.config.validate();
    const auto n = static_cast<Eigen::Index>(m.config.n_reservoir);
    m.w_in = matrix_from_json(j.at("w_in"), static_cast<Eigen::Index>(kChannels));
    if (m.w_in.rows() != n) throw ParseError(0, "w_in does not match reservoir size");
    std::vector<Eigen::Triplet<double>> trip;
    for (const auto& e : j.at("w")) {
        const auto r = e.at(0).get<Eigen::Index>(), col = e.at(1).get<Eigen::Index>();
        if (r < 0 || r >= n || col < 0 || col >= n) throw ParseError(0, "recurrent weight index out of range");
        trip.emplace_back(r, col, e.at(2).get<double>());
    }
    m.w.resize(n, n);
    m.w.setFromTriplets(trip.begin(), trip.end());
    m.w.makeCompressed();
    m.w_out = vector_from_json(j.at("w_out"));
    if (m.w_out.size() != n) throw ParseError(0, "readout does not match reservoir size");
    m.b_out = j.at("b_out").get<double>();
    m.trained = j.at("trained").get<bool>();
    return m;
}

} // namespace

json to_json(const ModelArtifact& a) {
    json j = std::visit(
        [](const auto& m) -> json {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, IdnnArtifact>) return idnn_to_json(m);
            else if constexpr (std::is_same_v<T, SvmModel>) return svm_to_json(m);
            else return esn_to_json(m);
        },
        a.model);
    if (!a.standardizer.empty()) j["standardizer"] = standardizer_to_json(a.standardizer);
    return j;
}

ModelArtifact artifact_from_json(const json& j) {
    try {
        ModelArtifact a;
        const auto kind = family_from_string(j.at("kind").get<std::string>());
        switch (kind) {
        case Family::idnn: a.model = idnn_from_json(j); break;
        case Family::svm: a.model = svm_from_json(j); break;
        case Family::esn: a.model = esn_from_json(j); break;
        }
        if (j.contains("standardizer")) a.standardizer = standardizer_from_json(j.at("standardizer"));
        return a;
    } catch (const json::exception& e) {
        throw ParseError(0, std::string("invalid model artifact: ") + e.what());
    } catch (const ArgumentError& e) {
        throw ParseError(0, std::string("invalid model artifact: ") + e.what());
    } catch (const ConfigError& e) {
        throw ParseError(0, std::string("invalid model artifact: ") + e.what());
    }
}

void save_artifact(const ModelArtifact& a, std::ostream& out) { out << to_json(a).dump(2) << '\n'; }

ModelArtifact load_artifact(std::istream& in) {
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ParseError(1, std::string("model artifact is not valid JSON: ") + e.what());
    }
    return artifact_from_json(j);
}

} // namespace preyclass
