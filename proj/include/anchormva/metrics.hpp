#pragma once

#include <Eigen/Dense>

namespace anchormva {

/// Mean squared error over all entries: sum((y - yhat)^2) / (n * p).
double mse(const Eigen::MatrixXd& y, const Eigen::MatrixXd& yhat);

struct R2Result {
    double value = 0.0;       // uniform average of per-output R^2
    int skipped_constant = 0; // constant target columns excluded
};

/// Per-column 1 - SS_res/SS_tot, uniformly averaged. Throws when every
/// column is constant.
R2Result r2(const Eigen::MatrixXd& y, const Eigen::MatrixXd& yhat);

struct CorrResult {
    double mean_abs = 0.0;    // mean |pearson| over (residual, anchor) pairs
    double mean_signed = 0.0;
    int skipped_pairs = 0;    // pairs with a constant side contribute 0
};

/// Correlation between prediction residuals and anchor columns; n >= 3.
CorrResult anchor_residual_corr(const Eigen::MatrixXd& y, const Eigen::MatrixXd& yhat,
                                const Eigen::MatrixXd& a);

struct EvalReport {
    double mse = 0.0;
    double r2 = 0.0;
    double mean_abs_corr = 0.0;
};

EvalReport evaluate(const Eigen::MatrixXd& y, const Eigen::MatrixXd& yhat,
                    const Eigen::MatrixXd& a);

}  // namespace anchormva
