#include "anchormva/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace anchormva {

std::string kind_name(EstimatorKind kind) {
    switch (kind) {
        case EstimatorKind::Mlr: return "MLR";
        case EstimatorKind::Ridge: return "Ridge";
        case EstimatorKind::Rrr: return "RRR";
        case EstimatorKind::Rrrr: return "RRRR";
        case EstimatorKind::Opls: return "OPLS";
        case EstimatorKind::Pls: return "PLS";
        case EstimatorKind::Cca: return "CCA";
    }
    return "?";
}

EstimatorKind parse_kind(const std::string& name) {
    std::string s;
    for (char c : name) s.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    if (s == "mlr" || s == "lr" || s == "ols") return EstimatorKind::Mlr;
    if (s == "ridge") return EstimatorKind::Ridge;
    if (s == "rrr") return EstimatorKind::Rrr;
    if (s == "rrrr") return EstimatorKind::Rrrr;
    if (s == "opls") return EstimatorKind::Opls;
    if (s == "pls") return EstimatorKind::Pls;
    if (s == "cca") return EstimatorKind::Cca;
    throw std::invalid_argument("unknown estimator kind: " + name);
}

bool EstimatorSpec::uses_rank() const {
    return kind == EstimatorKind::Rrr || kind == EstimatorKind::Rrrr ||
           kind == EstimatorKind::Opls || kind == EstimatorKind::Pls ||
           kind == EstimatorKind::Cca;
}

bool EstimatorSpec::uses_alpha() const {
    return kind == EstimatorKind::Ridge || kind == EstimatorKind::Rrrr;
}

void EstimatorSpec::validate(Eigen::Index d, Eigen::Index p) const {
    if (uses_rank()) {
        const auto maxr = std::min(d, p);
        if (rank < 1 || rank > maxr)
            throw std::invalid_argument(kind_name(kind) + " rank " + std::to_string(rank) +
                                        " out of bounds [1, " + std::to_string(maxr) + "]");
    }
    if (uses_alpha() && (alpha < 0 || !std::isfinite(alpha)))
        throw std::invalid_argument("alpha must be a finite nonnegative real");
}

namespace {

constexpr double kTieTolerance = 1e-10;

Eigen::MatrixXd lstsq(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) {
    // minimum-norm least-squares solution
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(x);
    return cod.solve(y);
}

/// Flips a weight pair so the largest-magnitude entry of u is positive.
void fix_sign(Eigen::VectorXd& u, Eigen::VectorXd& v) {
    Eigen::Index i = 0;
    u.cwiseAbs().maxCoeff(&i);
    if (u(i) < 0) {
        u = -u;
        v = -v;
    }
}

bool tied_at_cut(const Eigen::VectorXd& descending, int kept) {
    if (kept <= 0 || kept >= descending.size()) return false;
    return descending(kept - 1) - descending(kept) < kTieTolerance * descending(0);
}

FittedModel base_model(EstimatorKind kind, Eigen::MatrixXd w) {
    FittedModel m;
    m.kind = kind;
    m.w = std::move(w);
    return m;
}

}  // namespace

FittedModel fit_mlr(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) {
    FittedModel m = base_model(EstimatorKind::Mlr, lstsq(x, y));
    m.rank = static_cast<int>(std::min(x.cols(), y.cols()));
    return m;
}

FittedModel fit_ridge(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, double alpha) {
    if (alpha < 0 || !std::isfinite(alpha))
        throw std::invalid_argument("alpha must be a finite nonnegative real");
    if (alpha == 0.0) {
        FittedModel m = fit_mlr(x, y);
        m.kind = EstimatorKind::Ridge;
        return m;
    }
    const Eigen::Index d = x.cols();
    Eigen::MatrixXd gram = x.transpose() * x;
    gram.diagonal().array() += alpha;
    FittedModel m = base_model(EstimatorKind::Ridge, gram.ldlt().solve(x.transpose() * y));
    m.alpha = alpha;
    m.rank = static_cast<int>(std::min(d, y.cols()));
    return m;
}

namespace {

/// Rank truncation shared by RRR and RRRR: project fitted values onto their
/// top-`rank` right singular subspace.
FittedModel truncate_fitted(EstimatorKind kind, const Eigen::MatrixXd& x,
                            const Eigen::MatrixXd& w_full, int rank) {
    Eigen::MatrixXd fitted = x * w_full;
    Eigen::BDCSVD<Eigen::MatrixXd> svd(fitted, Eigen::ComputeThinV);
    const Eigen::VectorXd& sv = svd.singularValues();
    const int keep = std::min<int>(rank, static_cast<int>(svd.matrixV().cols()));
    Eigen::MatrixXd vr = svd.matrixV().leftCols(keep);
    FittedModel m = base_model(kind, w_full * (vr * vr.transpose()));
    m.rank = rank;
    m.spectrum = sv;
    m.tie_warning = tied_at_cut(sv, keep);
    return m;
}

}  // namespace

FittedModel fit_rrr(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, int rank) {
    EstimatorSpec{EstimatorKind::Rrr, rank}.validate(x.cols(), y.cols());
    FittedModel m = truncate_fitted(EstimatorKind::Rrr, x, lstsq(x, y), rank);
    return m;
}

FittedModel fit_rrrr(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, int rank, double alpha) {
    EstimatorSpec{EstimatorKind::Rrrr, rank, alpha}.validate(x.cols(), y.cols());
    Eigen::MatrixXd w_ridge = fit_ridge(x, y, alpha).w;
    FittedModel m = truncate_fitted(EstimatorKind::Rrrr, x, w_ridge, rank);
    m.alpha = alpha;
    return m;
}

FittedModel fit_opls(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, int rank) {
    EstimatorSpec{EstimatorKind::Opls, rank}.validate(x.cols(), y.cols());
    // g = (x'x)^+ x'y; top eigenvectors of (y'x) g give the orthonormal
    // output basis, ordered by how much of y each component predicts.
    Eigen::MatrixXd xtx = x.transpose() * x;
    Eigen::MatrixXd xty = x.transpose() * y;
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(xtx);
    Eigen::MatrixXd g = cod.solve(xty);
    Eigen::MatrixXd m_mat = xty.transpose() * g;
    m_mat = 0.5 * (m_mat + m_mat.transpose()).eval();

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m_mat);
    const Eigen::Index p = y.cols();
    Eigen::VectorXd evals_desc(p);
    Eigen::MatrixXd u(p, rank);
    for (int k = 0; k < p; ++k) evals_desc(k) = eig.eigenvalues()(p - 1 - k);
    for (int k = 0; k < rank; ++k) u.col(k) = eig.eigenvectors().col(p - 1 - k);

    Eigen::MatrixXd v = g * u;
    for (int k = 0; k < rank; ++k) {
        Eigen::VectorXd uk = u.col(k), vk = v.col(k);
        fix_sign(uk, vk);
        u.col(k) = uk;
        v.col(k) = vk;
    }
    FittedModel m = base_model(EstimatorKind::Opls, v * u.transpose());
    m.rank = rank;
    m.wx = v;
    m.wy = u;
    m.spectrum = evals_desc;
    m.tie_warning = tied_at_cut(evals_desc, rank);
    return m;
}

FittedModel fit_pls(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, int ncomp) {
    EstimatorSpec{EstimatorKind::Pls, ncomp}.validate(x.cols(), y.cols());
    const Eigen::Index n = x.rows();
    const Eigen::Index d = x.cols();
    const double denom = static_cast<double>(std::max<Eigen::Index>(n - 1, 1));

    Eigen::MatrixXd deflated = x;
    Eigen::MatrixXd weights(d, ncomp), loadings(d, ncomp), y_weights(y.cols(), ncomp);
    Eigen::VectorXd sigma(ncomp);
    double sigma0 = 0.0;
    int k = 0;
    for (; k < ncomp; ++k) {
        Eigen::MatrixXd s = deflated.transpose() * y / denom;
        Eigen::BDCSVD<Eigen::MatrixXd> svd(s, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const double sv = svd.singularValues()(0);
        if (k == 0) sigma0 = sv;
        if (sv <= 1e-12 * sigma0 || sigma0 == 0.0) break;  // cross-covariance exhausted
        Eigen::VectorXd u = svd.matrixU().col(0);
        Eigen::VectorXd v = svd.matrixV().col(0);
        fix_sign(u, v);
        Eigen::VectorXd t = deflated * u;
        const double tt = t.squaredNorm();
        if (tt <= 0) break;
        Eigen::VectorXd pk = deflated.transpose() * t / tt;
        deflated.noalias() -= t * pk.transpose();
        weights.col(k) = u;
        loadings.col(k) = pk;
        y_weights.col(k) = v;
        sigma(k) = sv;
    }

    FittedModel m = base_model(EstimatorKind::Pls, Eigen::MatrixXd::Zero(d, y.cols()));
    m.rank = k;
    m.early_stop = (k < ncomp);
    if (k > 0) {
        Eigen::MatrixXd wk = weights.leftCols(k);
        Eigen::MatrixXd pk = loadings.leftCols(k);
        // rotation taking raw x to scores, then y regressed on the scores
        Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(pk.transpose() * wk);
        Eigen::MatrixXd rotation = wk * cod.pseudoInverse();
        Eigen::MatrixXd scores = x * rotation;
        m.w = rotation * lstsq(scores, y);
        m.wx = wk;
        m.wy = y_weights.leftCols(k);
        m.spectrum = sigma.head(k);
        m.tie_warning = tied_at_cut(m.spectrum, k);
    }
    return m;
}

FittedModel fit_cca(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, int ncomp) {
    EstimatorSpec{EstimatorKind::Cca, ncomp}.validate(x.cols(), y.cols());
    const Eigen::Index n = x.rows();
    const Eigen::Index d = x.cols();
    const Eigen::Index p = y.cols();
    const double denom = static_cast<double>(std::max<Eigen::Index>(n - 1, 1));

    Eigen::MatrixXd sxx = x.transpose() * x / denom;
    Eigen::MatrixXd syy = y.transpose() * y / denom;
    Eigen::MatrixXd sxy = x.transpose() * y / denom;
    // ridge jitter keeps both auto-covariances invertible in small samples
    const double jx = std::max(1e-8 * sxx.trace() / static_cast<double>(d), 1e-300);
    const double jy = std::max(1e-8 * syy.trace() / static_cast<double>(p), 1e-300);
    sxx.diagonal().array() += jx;
    syy.diagonal().array() += jy;

    Eigen::LLT<Eigen::MatrixXd> syy_llt(syy);
    Eigen::MatrixXd m_mat = sxy * syy_llt.solve(sxy.transpose());
    m_mat = 0.5 * (m_mat + m_mat.transpose()).eval();

    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(m_mat, sxx);
    Eigen::MatrixXd wx(d, ncomp), wy(p, ncomp);
    Eigen::VectorXd corr(ncomp);
    for (int k = 0; k < ncomp; ++k) {
        Eigen::VectorXd u = ges.eigenvectors().col(d - 1 - k);  // B-orthonormal
        Eigen::VectorXd v = syy_llt.solve(sxy.transpose() * u);
        const double vnorm = std::sqrt(std::max(v.dot(syy * v), 0.0));
        if (vnorm > 0) v /= vnorm;
        fix_sign(u, v);
        wx.col(k) = u;
        wy.col(k) = v;
        corr(k) = std::sqrt(std::max(ges.eigenvalues()(d - 1 - k), 0.0));
    }

    FittedModel m = base_model(EstimatorKind::Cca, Eigen::MatrixXd::Zero(d, p));
    Eigen::MatrixXd scores = x * wx;
    m.w = wx * lstsq(scores, y);
    m.kind = EstimatorKind::Cca;
    m.rank = ncomp;
    m.wx = wx;
    m.wy = wy;
    m.spectrum = corr;
    m.tie_warning = tied_at_cut(corr, ncomp);
    return m;
}

FittedModel fit_estimator(const EstimatorSpec& spec, const Eigen::MatrixXd& x,
                          const Eigen::MatrixXd& y) {
    if (x.rows() != y.rows()) throw std::invalid_argument("x and y row counts differ");
    switch (spec.kind) {
        case EstimatorKind::Mlr: return fit_mlr(x, y);
        case EstimatorKind::Ridge: return fit_ridge(x, y, spec.alpha);
        case EstimatorKind::Rrr: return fit_rrr(x, y, spec.rank);
        case EstimatorKind::Rrrr: return fit_rrrr(x, y, spec.rank, spec.alpha);
        case EstimatorKind::Opls: return fit_opls(x, y, spec.rank);
        case EstimatorKind::Pls: return fit_pls(x, y, spec.rank);
        case EstimatorKind::Cca: return fit_cca(x, y, spec.rank);
    }
    throw std::invalid_argument("unknown estimator kind");
}

FittedModel fit_anchor(const EstimatorSpec& spec, const DataBlock& block,
                       const GammaMode& mode) {
    spec.validate(block.d(), block.p());
    FittedModel m;
    if (mode.is_identity()) {
        m = fit_estimator(spec, block.x, block.y);
    } else {
        AnchorTransform t = AnchorTransform::fit(block.a);
        auto [xt, yt] = transform(t, block.x, block.y, mode);
        m = fit_estimator(spec, xt, yt);
    }
    m.gamma = mode;
    if (spec.kind == EstimatorKind::Cca && !mode.is_identity()) m.incompatible_warning = true;
    return m;
}

FittedModel fit_pipeline(const EstimatorSpec& spec, const DataBlock& raw_block,
                         const GammaMode& gamma, StandardizeMode mode) {
    auto [std_block, state] = standardize(raw_block, mode);
    FittedModel m = fit_anchor(spec, std_block, gamma);
    m.standardization = state;
    return m;
}

Eigen::MatrixXd predict(const FittedModel& model, const Eigen::MatrixXd& x_new) {
    if (x_new.cols() != model.w.rows())
        throw std::invalid_argument("predict: expected " + std::to_string(model.w.rows()) +
                                    " predictor columns, got " + std::to_string(x_new.cols()));
    const auto& st = model.standardization;
    if (st.x_mean.size() == 0) return x_new * model.w;
    return st.invert_y(st.transform_x(x_new) * model.w);
}

}  // namespace anchormva
