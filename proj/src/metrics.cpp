#include "anchormva/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace anchormva {

double mse(const Eigen::MatrixXd& y, const Eigen::MatrixXd& yhat) {
    if (y.rows() != yhat.rows() || y.cols() != yhat.cols())
        throw std::invalid_argument("mse: shape mismatch");
    return (y - yhat).squaredNorm() / static_cast<double>(y.size());
}

R2Result r2(const Eigen::MatrixXd& y, const Eigen::MatrixXd& yhat) {
    if (y.rows() != yhat.rows() || y.cols() != yhat.cols())
        throw std::invalid_argument("r2: shape mismatch");
    R2Result res;
    double total = 0.0;
    int used = 0;
    for (Eigen::Index j = 0; j < y.cols(); ++j) {
        const double mean = y.col(j).mean();
        const double ss_tot = (y.col(j).array() - mean).square().sum();
        if (ss_tot <= 0) {
            ++res.skipped_constant;
            continue;
        }
        const double ss_res = (y.col(j) - yhat.col(j)).squaredNorm();
        total += 1.0 - ss_res / ss_tot;
        ++used;
    }
    if (used == 0) throw std::runtime_error("r2: every target column is constant");
    res.value = total / used;
    return res;
}

namespace {

double pearson(const Eigen::VectorXd& u, const Eigen::VectorXd& v, bool& degenerate) {
    const double mu = u.mean();
    const double mv = v.mean();
    Eigen::ArrayXd uc = u.array() - mu;
    Eigen::ArrayXd vc = v.array() - mv;
    const double su = std::sqrt((uc * uc).sum());
    const double sv = std::sqrt((vc * vc).sum());
    if (su <= 0 || sv <= 0) {
        degenerate = true;
        return 0.0;
    }
    degenerate = false;
    return (uc * vc).sum() / (su * sv);
}

}  // namespace

CorrResult anchor_residual_corr(const Eigen::MatrixXd& y, const Eigen::MatrixXd& yhat,
                                const Eigen::MatrixXd& a) {
    if (y.rows() != yhat.rows() || y.cols() != yhat.cols() || a.rows() != y.rows())
        throw std::invalid_argument("anchor_residual_corr: shape mismatch");
    if (y.rows() < 3) throw std::invalid_argument("anchor_residual_corr needs n >= 3");
    Eigen::MatrixXd resid = y - yhat;
    CorrResult out;
    double sum_abs = 0.0, sum_signed = 0.0;
    const long pairs = static_cast<long>(y.cols()) * static_cast<long>(a.cols());
    for (Eigen::Index j = 0; j < y.cols(); ++j) {
        for (Eigen::Index k = 0; k < a.cols(); ++k) {
            bool degenerate = false;
            const double c = pearson(resid.col(j), a.col(k), degenerate);
            if (degenerate) ++out.skipped_pairs;
            sum_abs += std::abs(c);
            sum_signed += c;
        }
    }
    out.mean_abs = sum_abs / static_cast<double>(pairs);
    out.mean_signed = sum_signed / static_cast<double>(pairs);
    return out;
}

EvalReport evaluate(const Eigen::MatrixXd& y, const Eigen::MatrixXd& yhat,
                    const Eigen::MatrixXd& a) {
    EvalReport rep;
    rep.mse = mse(y, yhat);
    rep.r2 = r2(y, yhat).value;
    rep.mean_abs_corr = anchor_residual_corr(y, yhat, a).mean_abs;
    return rep;
}

}  // namespace anchormva
