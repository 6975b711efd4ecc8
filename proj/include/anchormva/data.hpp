#pragma once

#include <Eigen/Dense>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace anchormva {

enum class ColumnRole { Predictor, Target, Anchor, Environment, Ignore };

ColumnRole parse_role(const std::string& name);

struct CsvOptions {
    char delimiter = ',';
    /// Optional sentinel treated as missing (some public datasets encode
    /// missing values as e.g. -200 instead of leaving the field blank).
    std::optional<double> missing_sentinel;
};

/// Aligned observation matrices. Immutable after construction; rows of x, y,
/// a (and env labels, when present) refer to the same observations.
struct DataBlock {
    Eigen::MatrixXd x;  // n x d predictors
    Eigen::MatrixXd y;  // n x p targets
    Eigen::MatrixXd a;  // n x q anchors
    std::vector<std::string> env;  // empty when no environment column

    std::vector<std::string> x_names, y_names, a_names;
    long dropped_rows = 0;
    /// false when no anchor column was assigned and `a` is a zero placeholder
    bool has_anchor = true;

    Eigen::Index n() const { return x.rows(); }
    Eigen::Index d() const { return x.cols(); }
    Eigen::Index p() const { return y.cols(); }
    Eigen::Index q() const { return a.cols(); }

    bool has_env() const { return !env.empty(); }
    DataBlock take_rows(const std::vector<Eigen::Index>& idx) const;
};

enum class StandardizeMode { Center, CenterScale };

/// Per-column centering/scaling parameters captured at fit time. Scales are
/// strictly positive; constant columns keep scale 1 and are flagged.
struct StandardizationState {
    Eigen::RowVectorXd x_mean, y_mean, a_mean;
    Eigen::RowVectorXd x_scale, y_scale, a_scale;
    bool scaled = false;
    bool constant_column_flag = false;

    Eigen::MatrixXd transform_x(const Eigen::MatrixXd& x) const;
    Eigen::MatrixXd transform_y(const Eigen::MatrixXd& y) const;
    Eigen::MatrixXd transform_a(const Eigen::MatrixXd& a) const;
    Eigen::MatrixXd invert_x(const Eigen::MatrixXd& x) const;
    Eigen::MatrixXd invert_y(const Eigen::MatrixXd& y) const;

    static StandardizationState identity(Eigen::Index d, Eigen::Index p, Eigen::Index q);
};

/// Loads a comma-separated file with a header row, maps each column to a
/// role, and drops rows with missing values in any assigned column.
/// Throws std::runtime_error on missing file, unknown column in the role
/// map, non-numeric values in numeric roles, or zero usable rows.
DataBlock load_csv(const std::string& path,
                   const std::map<std::string, ColumnRole>& roles,
                   const CsvOptions& options = {});

/// One-hot encodes the environment labels into the anchor matrix (columns in
/// sorted label order, 0/1 before any centering). Requires >= 2 distinct
/// labels.
DataBlock encode_environment_anchor(const DataBlock& block);

std::pair<DataBlock, StandardizationState> standardize(const DataBlock& block,
                                                       StandardizeMode mode);

/// Applies an existing standardization to new data (e.g. validation rows
/// transformed with training-fold statistics).
DataBlock apply_standardization(const DataBlock& block, const StandardizationState& state);

}  // namespace anchormva
