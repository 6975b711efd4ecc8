#include "anchormva/model_io.hpp"

#include <fstream>
#include <json.hpp>
#include <stdexcept>

namespace anchormva {

namespace {

using nlohmann::json;

json matrix_to_json(const Eigen::MatrixXd& m) {
    std::vector<double> flat;
    flat.reserve(static_cast<size_t>(m.size()));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) flat.push_back(m(i, j));
    return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", flat}};
}

Eigen::MatrixXd matrix_from_json(const json& j) {
    const auto rows = j.at("rows").get<Eigen::Index>();
    const auto cols = j.at("cols").get<Eigen::Index>();
    const auto flat = j.at("data").get<std::vector<double>>();
    if (static_cast<Eigen::Index>(flat.size()) != rows * cols)
        throw std::runtime_error("model file: matrix size mismatch");
    Eigen::MatrixXd m(rows, cols);
    size_t k = 0;
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j2 = 0; j2 < cols; ++j2) m(i, j2) = flat[k++];
    return m;
}

json vector_to_json(const Eigen::RowVectorXd& v) {
    return std::vector<double>(v.data(), v.data() + v.size());
}

Eigen::RowVectorXd vector_from_json(const json& j) {
    auto vals = j.get<std::vector<double>>();
    Eigen::RowVectorXd v(static_cast<Eigen::Index>(vals.size()));
    for (size_t i = 0; i < vals.size(); ++i) v(static_cast<Eigen::Index>(i)) = vals[i];
    return v;
}

std::string kind_key(EstimatorKind k) {
    switch (k) {
        case EstimatorKind::Mlr: return "mlr";
        case EstimatorKind::Ridge: return "ridge";
        case EstimatorKind::Rrr: return "rrr";
        case EstimatorKind::Rrrr: return "rrrr";
        case EstimatorKind::Opls: return "opls";
        case EstimatorKind::Pls: return "pls";
        case EstimatorKind::Cca: return "cca";
    }
    return "mlr";
}

}  // namespace

std::string model_to_json(const FittedModel& model, const std::vector<std::string>& predictors,
                          const std::vector<std::string>& targets) {
    json j;
    j["kind"] = kind_key(model.kind);
    if (model.gamma.kind == GammaMode::Kind::IvLimit)
        j["gamma"] = "inf";
    else
        j["gamma"] = model.gamma.numeric();
    j["rank"] = model.rank;
    j["alpha"] = model.alpha;
    j["d"] = model.w.rows();
    j["p"] = model.w.cols();
    j["w"] = matrix_to_json(model.w);
    if (model.wx.size() > 0) j["wx"] = matrix_to_json(model.wx);
    if (model.wy.size() > 0) j["wy"] = matrix_to_json(model.wy);
    const auto& st = model.standardization;
    if (st.x_mean.size() > 0) {
        j["standardization"] = {
            {"scaled", st.scaled},
            {"constant_column_flag", st.constant_column_flag},
            {"x_mean", vector_to_json(st.x_mean)},   {"x_scale", vector_to_json(st.x_scale)},
            {"y_mean", vector_to_json(st.y_mean)},   {"y_scale", vector_to_json(st.y_scale)},
            {"a_mean", vector_to_json(st.a_mean)},   {"a_scale", vector_to_json(st.a_scale)},
        };
    }
    j["flags"] = {{"incompatible_warning", model.incompatible_warning},
                  {"tie_warning", model.tie_warning},
                  {"early_stop", model.early_stop}};
    if (!predictors.empty()) j["predictors"] = predictors;
    if (!targets.empty()) j["targets"] = targets;
    return j.dump(2);
}

LoadedModel model_from_json(const std::string& text) {
    json j = json::parse(text);
    LoadedModel out;
    FittedModel& m = out.model;
    m.kind = parse_kind(j.at("kind").get<std::string>());
    const auto& g = j.at("gamma");
    if (g.is_string()) {
        m.gamma = GammaMode::parse(g.get<std::string>());
    } else {
        const double gv = g.get<double>();
        m.gamma = gv == 0.0 ? GammaMode::partial_out() : GammaMode::gamma(gv);
    }
    m.rank = j.at("rank").get<int>();
    m.alpha = j.at("alpha").get<double>();
    m.w = matrix_from_json(j.at("w"));
    if (j.contains("wx")) m.wx = matrix_from_json(j.at("wx"));
    if (j.contains("wy")) m.wy = matrix_from_json(j.at("wy"));
    if (j.contains("standardization")) {
        const auto& s = j.at("standardization");
        m.standardization.scaled = s.at("scaled").get<bool>();
        m.standardization.constant_column_flag = s.at("constant_column_flag").get<bool>();
        m.standardization.x_mean = vector_from_json(s.at("x_mean"));
        m.standardization.x_scale = vector_from_json(s.at("x_scale"));
        m.standardization.y_mean = vector_from_json(s.at("y_mean"));
        m.standardization.y_scale = vector_from_json(s.at("y_scale"));
        m.standardization.a_mean = vector_from_json(s.at("a_mean"));
        m.standardization.a_scale = vector_from_json(s.at("a_scale"));
    }
    if (j.contains("flags")) {
        m.incompatible_warning = j["flags"].value("incompatible_warning", false);
        m.tie_warning = j["flags"].value("tie_warning", false);
        m.early_stop = j["flags"].value("early_stop", false);
    }
    if (j.contains("predictors")) out.predictors = j["predictors"].get<std::vector<std::string>>();
    if (j.contains("targets")) out.targets = j["targets"].get<std::vector<std::string>>();
    return out;
}

void save_model(const FittedModel& model, const std::string& path,
                const std::vector<std::string>& predictors,
                const std::vector<std::string>& targets) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write model file: " + path);
    out << model_to_json(model, predictors, targets) << '\n';
}

LoadedModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open model file: " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return model_from_json(text);
}

}  // namespace anchormva
