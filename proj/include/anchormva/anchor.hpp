#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>

namespace anchormva {

/// Amount of anchor regularisation applied to the training data.
///   PartialOut  -- gamma = 0, fit on anchor-orthogonalised data
///   Gamma       -- finite gamma > 0; gamma = 1 leaves the data unchanged
///   IvLimit     -- gamma -> infinity, fit on anchor-projected data
struct GammaMode {
    enum class Kind { PartialOut, Gamma, IvLimit };
    Kind kind = Kind::Gamma;
    double value = 1.0;

    static GammaMode gamma(double g);
    static GammaMode partial_out() { return {Kind::PartialOut, 0.0}; }
    static GammaMode iv_limit() { return {Kind::IvLimit, 0.0}; }
    /// Accepts a number ("0", "2.5"), "inf"/"iv", or "pa".
    static GammaMode parse(const std::string& text);

    bool is_identity() const { return kind == Kind::Gamma && value == 1.0; }
    /// Numeric gamma for serialisation; +inf for the IV limit.
    double numeric() const;
    std::string label() const;
};

/// Orthogonal projection onto the column space of the anchor design matrix,
/// stored through a thin orthonormal basis (never as an n x n matrix).
/// Rank decided by truncating singular values below 1e-12 * sigma_max.
class AnchorTransform {
  public:
    AnchorTransform() = default;

    static AnchorTransform fit(const Eigen::MatrixXd& a);

    /// Pi * m
    Eigen::MatrixXd project(const Eigen::MatrixXd& m) const;
    /// Applies the mode-dependent training transform to one data block:
    /// gamma finite: (I + (sqrt(gamma)-1) Pi) m;  PA: (I - Pi) m;  IV: Pi m.
    Eigen::MatrixXd apply(const Eigen::MatrixXd& m, const GammaMode& mode) const;

    Eigen::Index rows() const { return basis_.rows(); }
    Eigen::Index rank() const { return basis_.cols(); }
    const Eigen::MatrixXd& basis() const { return basis_; }

  private:
    Eigen::MatrixXd basis_;  // n x r, orthonormal columns spanning col(a)
};

/// Transforms predictors and targets together (Appendix-style training-data
/// reweighting). Throws std::invalid_argument for a negative finite gamma.
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> transform(const AnchorTransform& t,
                                                      const Eigen::MatrixXd& x,
                                                      const Eigen::MatrixXd& y,
                                                      const GammaMode& mode);

/// Pooled and anchor-explained second-moment matrices of stacked (X, Y),
/// both with 1/(n-1) normalisation.
struct CovariancePair {
    Eigen::MatrixXd s_joint;      // (d+p) x (d+p)
    Eigen::MatrixXd s_explained;  // same shape, from Pi-projected data
};

CovariancePair covariances(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                           const AnchorTransform& t);

/// Max relative deviation of S_xy~ from S_xy + (gamma-1) S_xy|A, i.e.
/// ||lhs - rhs||_F / max(1, ||S_xy||_F). Expected < 1e-10 on well-conditioned
/// inputs for any finite gamma >= 0.
double verify_transform_identity(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                                 const Eigen::MatrixXd& a, double gamma);

}  // namespace anchormva
