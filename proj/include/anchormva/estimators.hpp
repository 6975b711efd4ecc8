#pragma once

#include <Eigen/Dense>
#include <string>

#include "anchormva/anchor.hpp"
#include "anchormva/data.hpp"

namespace anchormva {

enum class EstimatorKind { Mlr, Ridge, Rrr, Rrrr, Opls, Pls, Cca };

std::string kind_name(EstimatorKind kind);
EstimatorKind parse_kind(const std::string& name);

struct EstimatorSpec {
    EstimatorKind kind = EstimatorKind::Mlr;
    int rank = 0;        // RRR/RRRR/OPLS/PLS/CCA component count
    double alpha = 0.0;  // Ridge/RRRR l2 strength

    /// Every kind except CCA minimises a loss that is linear in the joint
    /// second-moment matrix, so the gamma reweighting applies to it.
    bool anchor_compatible() const { return kind != EstimatorKind::Cca; }
    bool uses_rank() const;
    bool uses_alpha() const;
    void validate(Eigen::Index d, Eigen::Index p) const;
};

struct FittedModel {
    EstimatorKind kind = EstimatorKind::Mlr;
    Eigen::MatrixXd w;        // d x p, prediction in (standardized) coordinates
    Eigen::MatrixXd wx, wy;   // latent weights (columns = components), may be empty
    Eigen::VectorXd spectrum; // component magnitudes (singular values, eigenvalues
                              // or canonical correlations), may be empty
    int rank = 0;             // effective rank actually used
    double alpha = 0.0;
    GammaMode gamma = GammaMode::gamma(1.0);
    StandardizationState standardization;  // identity unless fitted via pipeline

    bool incompatible_warning = false;  // CCA fitted with gamma != 1
    bool tie_warning = false;           // spectral gap below 1e-10 * sigma_max
    bool early_stop = false;            // PLS stopped before requested ncomp
};

// Plain fits; inputs are expected centered (means already removed).
FittedModel fit_mlr(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y);
FittedModel fit_ridge(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, double alpha);
FittedModel fit_rrr(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, int rank);
FittedModel fit_rrrr(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, int rank, double alpha);
FittedModel fit_opls(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, int rank);
FittedModel fit_pls(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, int ncomp);
FittedModel fit_cca(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, int ncomp);

FittedModel fit_estimator(const EstimatorSpec& spec, const Eigen::MatrixXd& x,
                          const Eigen::MatrixXd& y);

/// Fits on anchor-transformed training data; the returned coefficients apply
/// to raw (centered) predictors -- the transform is training-time only.
/// Expects a centered block.
FittedModel fit_anchor(const EstimatorSpec& spec, const DataBlock& block,
                       const GammaMode& mode);

/// standardize(mode) + fit_anchor, with the standardization captured on the
/// model so predict() maps raw inputs to raw outputs.
FittedModel fit_pipeline(const EstimatorSpec& spec, const DataBlock& raw_block,
                         const GammaMode& gamma, StandardizeMode mode);

/// y_hat = untransform(transform(x_new) * w).
Eigen::MatrixXd predict(const FittedModel& model, const Eigen::MatrixXd& x_new);

}  // namespace anchormva
