#include "anchormva/anchor.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <stdexcept>

namespace anchormva {

GammaMode GammaMode::gamma(double g) {
    if (g < 0 || !std::isfinite(g))
        throw std::invalid_argument("gamma must be a finite nonnegative real");
    if (g == 0.0) return partial_out();
    return {Kind::Gamma, g};
}

GammaMode GammaMode::parse(const std::string& text) {
    if (text == "inf" || text == "iv" || text == "IV") return iv_limit();
    if (text == "pa" || text == "PA") return partial_out();
    char* end = nullptr;
    double v = std::strtod(text.c_str(), &end);
    if (end == text.c_str() || *end != '\0')
        throw std::invalid_argument("cannot parse gamma value: " + text);
    return gamma(v);
}

double GammaMode::numeric() const {
    switch (kind) {
        case Kind::PartialOut: return 0.0;
        case Kind::IvLimit: return std::numeric_limits<double>::infinity();
        case Kind::Gamma: return value;
    }
    return value;
}

std::string GammaMode::label() const {
    if (kind == Kind::IvLimit) return "inf";
    if (kind == Kind::PartialOut) return "0";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", value);
    return buf;
}

AnchorTransform AnchorTransform::fit(const Eigen::MatrixXd& a) {
    if (a.rows() < 2) throw std::invalid_argument("anchor fit needs n >= 2 rows");
    AnchorTransform t;
    Eigen::BDCSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0 || sv(0) <= 0) {
        t.basis_ = Eigen::MatrixXd::Zero(a.rows(), 0);
        return t;
    }
    const double cutoff = 1e-12 * sv(0);
    Eigen::Index r = 0;
    while (r < sv.size() && sv(r) > cutoff) ++r;
    t.basis_ = svd.matrixU().leftCols(r);
    return t;
}

Eigen::MatrixXd AnchorTransform::project(const Eigen::MatrixXd& m) const {
    if (m.rows() != basis_.rows())
        throw std::invalid_argument("row count does not match the fitted projection");
    if (basis_.cols() == 0) return Eigen::MatrixXd::Zero(m.rows(), m.cols());
    return basis_ * (basis_.transpose() * m);
}

Eigen::MatrixXd AnchorTransform::apply(const Eigen::MatrixXd& m, const GammaMode& mode) const {
    switch (mode.kind) {
        case GammaMode::Kind::PartialOut:
            return m - project(m);
        case GammaMode::Kind::IvLimit:
            return project(m);
        case GammaMode::Kind::Gamma: {
            if (mode.value < 0 || !std::isfinite(mode.value))
                throw std::invalid_argument("gamma must be a finite nonnegative real");
            if (mode.value == 1.0) return m;
            const double c = std::sqrt(mode.value) - 1.0;
            return m + c * project(m);
        }
    }
    return m;
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> transform(const AnchorTransform& t,
                                                      const Eigen::MatrixXd& x,
                                                      const Eigen::MatrixXd& y,
                                                      const GammaMode& mode) {
    return {t.apply(x, mode), t.apply(y, mode)};
}

CovariancePair covariances(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                           const AnchorTransform& t) {
    const Eigen::Index n = x.rows();
    if (n < 2) throw std::invalid_argument("covariances need n >= 2");
    if (y.rows() != n) throw std::invalid_argument("x and y row counts differ");
    Eigen::MatrixXd z(n, x.cols() + y.cols());
    z << x, y;
    const double denom = static_cast<double>(n - 1);
    CovariancePair pair;
    pair.s_joint = z.transpose() * z / denom;
    Eigen::MatrixXd pz = t.project(z);
    pair.s_explained = pz.transpose() * pz / denom;
    return pair;
}

double verify_transform_identity(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                                 const Eigen::MatrixXd& a, double gamma) {
    if (gamma < 0 || !std::isfinite(gamma))
        throw std::invalid_argument("identity check requires finite gamma >= 0");
    AnchorTransform t = AnchorTransform::fit(a);
    auto mode = gamma == 0.0 ? GammaMode::partial_out() : GammaMode::gamma(gamma);
    auto [xt, yt] = transform(t, x, y, mode);

    const Eigen::Index n = x.rows();
    Eigen::MatrixXd zt(n, x.cols() + y.cols());
    zt << xt, yt;
    Eigen::MatrixXd lhs = zt.transpose() * zt / static_cast<double>(n - 1);

    CovariancePair cov = covariances(x, y, t);
    Eigen::MatrixXd rhs = cov.s_joint + (gamma - 1.0) * cov.s_explained;

    double scale = std::max(1.0, cov.s_joint.norm());
    return (lhs - rhs).norm() / scale;
}

}  // namespace anchormva
