#include "anchormva/data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <set>
#include <stdexcept>

#include "anchormva/csv.hpp"

namespace anchormva {

ColumnRole parse_role(const std::string& name) {
    if (name == "predictor") return ColumnRole::Predictor;
    if (name == "target") return ColumnRole::Target;
    if (name == "anchor") return ColumnRole::Anchor;
    if (name == "environment" || name == "env") return ColumnRole::Environment;
    if (name == "ignore") return ColumnRole::Ignore;
    throw std::runtime_error("unknown column role: " + name +
                             " (expected predictor|target|anchor|environment|ignore)");
}

DataBlock DataBlock::take_rows(const std::vector<Eigen::Index>& idx) const {
    DataBlock out;
    const auto m = static_cast<Eigen::Index>(idx.size());
    out.x.resize(m, x.cols());
    out.y.resize(m, y.cols());
    out.a.resize(m, a.cols());
    for (Eigen::Index i = 0; i < m; ++i) {
        out.x.row(i) = x.row(idx[static_cast<size_t>(i)]);
        out.y.row(i) = y.row(idx[static_cast<size_t>(i)]);
        out.a.row(i) = a.row(idx[static_cast<size_t>(i)]);
    }
    if (!env.empty()) {
        out.env.reserve(idx.size());
        for (auto i : idx) out.env.push_back(env[static_cast<size_t>(i)]);
    }
    out.x_names = x_names;
    out.y_names = y_names;
    out.a_names = a_names;
    out.has_anchor = has_anchor;
    return out;
}

namespace {

bool is_missing_token(const std::string& s) {
    return s.empty() || s == "NA" || s == "NaN" || s == "nan" || s == "na";
}

bool parse_number(const std::string& s, double& out) {
    const char* begin = s.c_str();
    char* end = nullptr;
    out = std::strtod(begin, &end);
    return end != begin && *end == '\0';
}

}  // namespace

DataBlock load_csv(const std::string& path,
                   const std::map<std::string, ColumnRole>& roles,
                   const CsvOptions& options) {
    CsvTable table = read_csv(path, options.delimiter);

    for (const auto& [name, role] : roles) {
        (void)role;
        if (std::find(table.header.begin(), table.header.end(), name) == table.header.end())
            throw std::runtime_error("role map names unknown column: " + name);
    }

    std::vector<int> x_cols, y_cols, a_cols;
    int env_col = -1;
    std::vector<std::string> x_names, y_names, a_names;
    for (size_t c = 0; c < table.header.size(); ++c) {
        auto it = roles.find(table.header[c]);
        if (it == roles.end()) continue;
        switch (it->second) {
            case ColumnRole::Predictor:
                x_cols.push_back(static_cast<int>(c));
                x_names.push_back(table.header[c]);
                break;
            case ColumnRole::Target:
                y_cols.push_back(static_cast<int>(c));
                y_names.push_back(table.header[c]);
                break;
            case ColumnRole::Anchor:
                a_cols.push_back(static_cast<int>(c));
                a_names.push_back(table.header[c]);
                break;
            case ColumnRole::Environment:
                if (env_col >= 0) throw std::runtime_error("multiple environment columns assigned");
                env_col = static_cast<int>(c);
                break;
            case ColumnRole::Ignore:
                break;
        }
    }
    if (x_cols.empty()) throw std::runtime_error("role map assigns no predictor column");
    if (y_cols.empty()) throw std::runtime_error("role map assigns no target column");

    std::vector<int> numeric_cols = x_cols;
    numeric_cols.insert(numeric_cols.end(), y_cols.begin(), y_cols.end());
    numeric_cols.insert(numeric_cols.end(), a_cols.begin(), a_cols.end());

    std::vector<std::vector<double>> kept;
    std::vector<std::string> env_labels;
    long dropped = 0;
    for (const auto& row : table.rows) {
        if (row.size() != table.header.size())
            throw std::runtime_error("row with " + std::to_string(row.size()) +
                                     " fields, header has " + std::to_string(table.header.size()));
        std::vector<double> vals;
        vals.reserve(numeric_cols.size());
        bool missing = false;
        for (int c : numeric_cols) {
            const std::string& cell = row[static_cast<size_t>(c)];
            if (is_missing_token(cell)) {
                missing = true;
                break;
            }
            double v = 0;
            if (!parse_number(cell, v))
                throw std::runtime_error("non-numeric value '" + cell + "' in column '" +
                                         table.header[static_cast<size_t>(c)] + "'");
            if (!std::isfinite(v) ||
                (options.missing_sentinel && v == *options.missing_sentinel)) {
                missing = true;
                break;
            }
            vals.push_back(v);
        }
        if (env_col >= 0 && !missing && is_missing_token(row[static_cast<size_t>(env_col)]))
            missing = true;
        if (missing) {
            ++dropped;
            continue;
        }
        kept.push_back(std::move(vals));
        if (env_col >= 0) env_labels.push_back(row[static_cast<size_t>(env_col)]);
    }
    if (kept.empty()) throw std::runtime_error("no usable rows in " + path);

    const auto n = static_cast<Eigen::Index>(kept.size());
    DataBlock block;
    block.x.resize(n, static_cast<Eigen::Index>(x_cols.size()));
    block.y.resize(n, static_cast<Eigen::Index>(y_cols.size()));
    const bool anchored = !a_cols.empty();
    block.a = Eigen::MatrixXd::Zero(n, anchored ? static_cast<Eigen::Index>(a_cols.size()) : 1);
    block.has_anchor = anchored;
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& vals = kept[static_cast<size_t>(i)];
        size_t k = 0;
        for (size_t j = 0; j < x_cols.size(); ++j) block.x(i, static_cast<Eigen::Index>(j)) = vals[k++];
        for (size_t j = 0; j < y_cols.size(); ++j) block.y(i, static_cast<Eigen::Index>(j)) = vals[k++];
        for (size_t j = 0; j < a_cols.size(); ++j) block.a(i, static_cast<Eigen::Index>(j)) = vals[k++];
    }
    block.env = std::move(env_labels);
    block.x_names = std::move(x_names);
    block.y_names = std::move(y_names);
    block.a_names = std::move(a_names);
    block.dropped_rows = dropped;
    return block;
}

DataBlock encode_environment_anchor(const DataBlock& block) {
    if (!block.has_env()) throw std::runtime_error("no environment labels to encode");
    std::set<std::string> labels(block.env.begin(), block.env.end());
    if (labels.size() < 2)
        throw std::runtime_error("environment encoding needs >= 2 distinct labels, got " +
                                 std::to_string(labels.size()));
    std::vector<std::string> ordered(labels.begin(), labels.end());
    DataBlock out = block;
    out.a = Eigen::MatrixXd::Zero(block.n(), static_cast<Eigen::Index>(ordered.size()));
    for (Eigen::Index i = 0; i < block.n(); ++i) {
        auto it = std::lower_bound(ordered.begin(), ordered.end(), block.env[static_cast<size_t>(i)]);
        out.a(i, static_cast<Eigen::Index>(it - ordered.begin())) = 1.0;
    }
    out.a_names = ordered;
    out.has_anchor = true;
    return out;
}

namespace {

void fit_columns(const Eigen::MatrixXd& m, bool scale, Eigen::RowVectorXd& mean,
                 Eigen::RowVectorXd& sd, bool& constant_flag) {
    mean = m.colwise().mean();
    sd = Eigen::RowVectorXd::Ones(m.cols());
    if (!scale) return;
    const double denom = static_cast<double>(m.rows() - 1);
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
        double s = std::sqrt((m.col(j).array() - mean(j)).square().sum() / denom);
        if (s > 0) {
            sd(j) = s;
        } else {
            constant_flag = true;  // scale stays 1
        }
    }
}

Eigen::MatrixXd forward(const Eigen::MatrixXd& m, const Eigen::RowVectorXd& mean,
                        const Eigen::RowVectorXd& sd) {
    return ((m.rowwise() - mean).array().rowwise() / sd.array()).matrix();
}

Eigen::MatrixXd backward(const Eigen::MatrixXd& m, const Eigen::RowVectorXd& mean,
                         const Eigen::RowVectorXd& sd) {
    return ((m.array().rowwise() * sd.array()).matrix().rowwise() + mean);
}

}  // namespace

Eigen::MatrixXd StandardizationState::transform_x(const Eigen::MatrixXd& x) const {
    return forward(x, x_mean, x_scale);
}
Eigen::MatrixXd StandardizationState::transform_y(const Eigen::MatrixXd& y) const {
    return forward(y, y_mean, y_scale);
}
Eigen::MatrixXd StandardizationState::transform_a(const Eigen::MatrixXd& a) const {
    return forward(a, a_mean, a_scale);
}
Eigen::MatrixXd StandardizationState::invert_x(const Eigen::MatrixXd& x) const {
    return backward(x, x_mean, x_scale);
}
Eigen::MatrixXd StandardizationState::invert_y(const Eigen::MatrixXd& y) const {
    return backward(y, y_mean, y_scale);
}

StandardizationState StandardizationState::identity(Eigen::Index d, Eigen::Index p,
                                                    Eigen::Index q) {
    StandardizationState s;
    s.x_mean = Eigen::RowVectorXd::Zero(d);
    s.y_mean = Eigen::RowVectorXd::Zero(p);
    s.a_mean = Eigen::RowVectorXd::Zero(q);
    s.x_scale = Eigen::RowVectorXd::Ones(d);
    s.y_scale = Eigen::RowVectorXd::Ones(p);
    s.a_scale = Eigen::RowVectorXd::Ones(q);
    return s;
}

std::pair<DataBlock, StandardizationState> standardize(const DataBlock& block,
                                                       StandardizeMode mode) {
    if (block.n() < 2) throw std::runtime_error("standardize needs n >= 2");
    StandardizationState st;
    st.scaled = (mode == StandardizeMode::CenterScale);
    fit_columns(block.x, st.scaled, st.x_mean, st.x_scale, st.constant_column_flag);
    fit_columns(block.y, st.scaled, st.y_mean, st.y_scale, st.constant_column_flag);
    fit_columns(block.a, st.scaled, st.a_mean, st.a_scale, st.constant_column_flag);
    return {apply_standardization(block, st), st};
}

DataBlock apply_standardization(const DataBlock& block, const StandardizationState& state) {
    DataBlock out = block;
    out.x = state.transform_x(block.x);
    out.y = state.transform_y(block.y);
    out.a = state.transform_a(block.a);
    return out;
}

}  // namespace anchormva
