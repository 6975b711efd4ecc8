#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

namespace anchormva {

struct GdConfig {
    double learning_rate = 0.1;
    int max_epochs = 50000;
    int patience = 200;
    double tolerance = 1e-4;  // minimum val-MSE improvement that resets patience
    double lambda = 0.0;
    uint64_t seed = 0;
    double val_fraction = 0.2;  // used when no validation set is supplied
    int max_halvings = 20;
};

/// Linear IRM: representation phi (d x d, identity-initialised) and head w
/// (d x p, zero-initialised), trained by full-batch gradient descent on
/// sum_e MSE_e + lambda * sum_e ||d MSE_e / d w||_F^2 with analytic
/// gradients. Returns the parameters with the lowest recorded validation MSE.
struct IrmModel {
    Eigen::MatrixXd phi;
    Eigen::MatrixXd w;
    bool converged = false;
    int epochs_run = 0;
    bool lr_halved = false;
    double best_val_mse = 0.0;
    std::vector<double> val_history;

    Eigen::MatrixXd coefficients() const { return phi * w; }
};

/// Linear CVP: w trained on pooled MSE + lambda * sum_g sum_j Var_j(yhat_g),
/// groups being environments (or environment x outcome-quantile bins when
/// bins >= 2). Size-1 groups contribute zero variance.
struct CvpModel {
    Eigen::MatrixXd w;
    bool converged = false;
    int epochs_run = 0;
    bool lr_halved = false;
    double best_val_mse = 0.0;
    std::vector<double> val_history;
};

/// Deterministic holdout split of 0..n-1 (shuffle by seed, last `fraction`
/// of rows become validation).
std::pair<std::vector<Eigen::Index>, std::vector<Eigen::Index>> holdout_split(
    Eigen::Index n, double fraction, uint64_t seed);

IrmModel fit_irm(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                 const std::vector<std::string>& env, const GdConfig& cfg,
                 const Eigen::MatrixXd* x_val = nullptr,
                 const Eigen::MatrixXd* y_val = nullptr);

CvpModel fit_cvp(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                 const std::vector<std::string>& env, const GdConfig& cfg, int bins = 0,
                 const Eigen::MatrixXd* x_val = nullptr,
                 const Eigen::MatrixXd* y_val = nullptr);

enum class GdModelKind { Irm, Cvp };

struct GdParams {
    Eigen::MatrixXd phi;  // ignored for CVP
    Eigen::MatrixXd w;
};

/// Central finite differences of the full penalised objective against the
/// analytic gradient at `at`; returns max-abs deviation relative to the
/// gradient's max-abs entry. h should lie in [1e-7, 1e-4].
double gradient_check(GdModelKind kind, const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                      const std::vector<std::string>& env, double lambda,
                      const GdParams& at, double h, int bins = 0);

}  // namespace anchormva
