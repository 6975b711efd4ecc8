#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "anchormva/anchor.hpp"
#include "anchormva/estimators.hpp"
#include "anchormva/metrics.hpp"
#include "anchormva/scm.hpp"
#include "test_util.hpp"

using namespace anchormva;
using testutil::centered;
using testutil::random_matrix;

namespace {

double training_loss(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                     const Eigen::MatrixXd& w) {
    return (y - x * w).squaredNorm();
}

DataBlock make_block(Eigen::MatrixXd x, Eigen::MatrixXd y, Eigen::MatrixXd a) {
    DataBlock b;
    b.x = std::move(x);
    b.y = std::move(y);
    b.a = std::move(a);
    return b;
}

}  // namespace

TEST_CASE("mlr") {
    SUBCASE("identity design returns y") {
        Eigen::MatrixXd x = Eigen::MatrixXd::Identity(2, 2);
        Eigen::MatrixXd y(2, 2);
        y << 2, 0, 0, 3;
        CHECK((fit_mlr(x, y).w - y).norm() < 1e-12);
    }
    SUBCASE("exact line") {
        Eigen::MatrixXd x(2, 1), y(2, 1);
        x << 1, 2;
        y << 2, 4;
        CHECK(fit_mlr(x, y).w(0, 0) == doctest::Approx(2.0));
    }
    SUBCASE("normal equations by hand: x'y/x'x = 3/5") {
        Eigen::MatrixXd x(2, 1), y(2, 1);
        x << 1, 2;
        y << 1, 1;
        CHECK(fit_mlr(x, y).w(0, 0) == doctest::Approx(0.6));
    }
    SUBCASE("residuals orthogonal to col(x)") {
        Eigen::MatrixXd x = centered(random_matrix(30, 4, 1));
        Eigen::MatrixXd y = centered(random_matrix(30, 3, 2));
        FittedModel m = fit_mlr(x, y);
        CHECK((x.transpose() * (y - x * m.w)).norm() < 1e-8 * y.norm());
    }
    SUBCASE("rank-deficient x gets the minimum-norm solution") {
        Eigen::MatrixXd x(4, 2);
        x << 1, 1, 2, 2, -1, -1, 0, 0;  // duplicated column
        Eigen::MatrixXd y = x.col(0);
        FittedModel m = fit_mlr(x, y);
        CHECK((x * m.w - y).norm() < 1e-10);
        CHECK(m.w(0, 0) == doctest::Approx(m.w(1, 0)));  // min-norm spreads evenly
    }
}

TEST_CASE("ridge") {
    SUBCASE("alpha = 0 equals mlr on full-column-rank x") {
        Eigen::MatrixXd x = centered(random_matrix(20, 3, 3));
        Eigen::MatrixXd y = centered(random_matrix(20, 2, 4));
        CHECK((fit_ridge(x, y, 0.0).w - fit_mlr(x, y).w).norm() < 1e-8);
    }
    SUBCASE("scalar formula") {
        Eigen::MatrixXd x(2, 1), y(2, 1);
        x << 1, 2;
        y << 1, 2;
        CHECK(fit_ridge(x, y, 5.0).w(0, 0) == doctest::Approx(0.5));
    }
    SUBCASE("extreme alpha shrinks toward zero") {
        Eigen::MatrixXd x = centered(random_matrix(25, 3, 5));
        Eigen::MatrixXd y = centered(random_matrix(25, 2, 6));
        FittedModel m = fit_ridge(x, y, 1e12);
        CHECK(m.w.norm() < 1e-6 * (x.transpose() * y).norm());
    }
    SUBCASE("negative alpha rejected") { CHECK_THROWS(fit_ridge(Eigen::MatrixXd::Identity(2, 2),
                                                               Eigen::MatrixXd::Identity(2, 2),
                                                               -1.0)); }
}

TEST_CASE("rrr") {
    SUBCASE("full rank equals mlr") {
        Eigen::MatrixXd x = centered(random_matrix(30, 4, 7));
        Eigen::MatrixXd y = centered(random_matrix(30, 3, 8));
        CHECK((fit_rrr(x, y, 3).w - fit_mlr(x, y).w).norm() < 1e-8);
    }
    SUBCASE("rank-1 truncation keeps the dominant singular direction") {
        Eigen::MatrixXd x = Eigen::MatrixXd::Identity(2, 2);
        Eigen::MatrixXd y(2, 2);
        y << 2, 0, 0, 3;
        Eigen::MatrixXd expected(2, 2);
        expected << 0, 0, 0, 3;
        CHECK((fit_rrr(x, y, 1).w - expected).norm() < 1e-10);
    }
    SUBCASE("matches an independent spectral construction and beats random candidates") {
        Eigen::MatrixXd x = centered(random_matrix(40, 5, 9));
        Eigen::MatrixXd y = centered(random_matrix(40, 4, 10));
        const int rank = 2;
        FittedModel m = fit_rrr(x, y, rank);

        // oracle: eigen-decomposition of (x w_ols)' (x w_ols) instead of an SVD
        Eigen::MatrixXd w_ols = fit_mlr(x, y).w;
        Eigen::MatrixXd fitted = x * w_ols;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(fitted.transpose() * fitted);
        Eigen::MatrixXd vr(4, rank);
        for (int k = 0; k < rank; ++k) vr.col(k) = eig.eigenvectors().col(3 - k);
        Eigen::MatrixXd w_oracle = w_ols * vr * vr.transpose();
        CHECK(training_loss(x, y, m.w) == doctest::Approx(training_loss(x, y, w_oracle)));

        // brute-force-style check: no random rank-2 candidate does better
        const double ours = training_loss(x, y, m.w);
        for (int trial = 0; trial < 50; ++trial) {
            Eigen::MatrixXd cand = random_matrix(5, rank, 200 + trial) *
                                   random_matrix(rank, 4, 300 + trial);
            CHECK(training_loss(x, y, cand) >= ours - 1e-9);
        }
        // numerical rank of w is at most `rank`
        Eigen::BDCSVD<Eigen::MatrixXd> svd(m.w);
        int nrank = 0;
        for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
            if (svd.singularValues()(i) > 1e-8 * svd.singularValues()(0)) ++nrank;
        CHECK(nrank <= rank);
    }
    SUBCASE("rank bounds enforced") {
        Eigen::MatrixXd x = centered(random_matrix(10, 3, 11));
        Eigen::MatrixXd y = centered(random_matrix(10, 2, 12));
        CHECK_THROWS(fit_rrr(x, y, 0));
        CHECK_THROWS(fit_rrr(x, y, 3));
    }
}

TEST_CASE("rrrr") {
    Eigen::MatrixXd x = centered(random_matrix(35, 4, 13));
    Eigen::MatrixXd y = centered(random_matrix(35, 3, 14));
    SUBCASE("alpha = 0 reduces to rrr") {
        CHECK((fit_rrrr(x, y, 2, 0.0).w - fit_rrr(x, y, 2).w).norm() < 1e-10);
    }
    SUBCASE("full rank reduces to ridge") {
        CHECK((fit_rrrr(x, y, 3, 2.5).w - fit_ridge(x, y, 2.5).w).norm() < 1e-8);
    }
    SUBCASE("truncation can only raise the training loss of the ridge fit") {
        FittedModel ridge = fit_ridge(x, y, 1.0);
        FittedModel rr = fit_rrrr(x, y, 1, 1.0);
        CHECK(training_loss(x, y, rr.w) >= training_loss(x, y, ridge.w) - 1e-10);
    }
}

TEST_CASE("opls") {
    SUBCASE("single output collapses to mlr") {
        Eigen::MatrixXd x = centered(random_matrix(30, 4, 15));
        Eigen::MatrixXd y = centered(random_matrix(30, 1, 16));
        CHECK((fit_opls(x, y, 1).w - fit_mlr(x, y).w).norm() < 1e-8);
    }
    SUBCASE("full rank matches the mlr training loss") {
        for (auto [d, p] : {std::pair{4, 6}, std::pair{6, 4}}) {
            Eigen::MatrixXd x = centered(random_matrix(50, d, 17));
            Eigen::MatrixXd y = centered(random_matrix(50, p, 18));
            const int rank = std::min(d, p);
            const double opls_loss = training_loss(x, y, fit_opls(x, y, rank).w);
            const double mlr_loss = training_loss(x, y, fit_mlr(x, y).w);
            CHECK(opls_loss == doctest::Approx(mlr_loss).epsilon(1e-8));
        }
    }
    SUBCASE("diagonal instance keeps the strongest output direction") {
        Eigen::MatrixXd x = Eigen::MatrixXd::Identity(2, 2);
        Eigen::MatrixXd y(2, 2);
        y << 2, 0, 0, 3;
        FittedModel m = fit_opls(x, y, 1);
        CHECK(std::abs(m.wy(0, 0)) < 1e-12);
        CHECK(std::abs(m.wy(1, 0)) == doctest::Approx(1.0));
        Eigen::MatrixXd expected(2, 2);
        expected << 0, 0, 0, 3;
        CHECK((m.w - expected).norm() < 1e-10);
    }
}

TEST_CASE("pls") {
    SUBCASE("one-dimensional case equals univariate regression") {
        Eigen::MatrixXd x = centered(random_matrix(25, 1, 19));
        Eigen::MatrixXd y = centered(random_matrix(25, 1, 20));
        FittedModel m = fit_pls(x, y, 1);
        CHECK(std::abs(m.wx(0, 0)) == doctest::Approx(1.0));
        CHECK(std::abs(m.wy(0, 0)) == doctest::Approx(1.0));
        CHECK((m.w - fit_mlr(x, y).w).norm() < 1e-10);
    }
    SUBCASE("first component is the top singular pair of the cross-covariance") {
        Eigen::MatrixXd x = centered(random_matrix(60, 5, 21));
        Eigen::MatrixXd y = centered(random_matrix(60, 4, 22));
        FittedModel m = fit_pls(x, y, 3);

        Eigen::MatrixXd s = x.transpose() * y / 59.0;
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(s, Eigen::ComputeThinU | Eigen::ComputeThinV);
        Eigen::VectorXd u = svd.matrixU().col(0);
        Eigen::VectorXd v = svd.matrixV().col(0);
        Eigen::Index imax = 0;
        u.cwiseAbs().maxCoeff(&imax);
        if (u(imax) < 0) {
            u = -u;
            v = -v;
        }
        CHECK((m.wx.col(0) - u).norm() < 1e-8);
        CHECK((m.wy.col(0) - v).norm() < 1e-8);
    }
    SUBCASE("all components on whitened predictors reproduce mlr predictions") {
        Eigen::MatrixXd raw = random_matrix(40, 3, 23);
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(raw);
        Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(40, 3);
        Eigen::MatrixXd x = centered(2.0 * q);
        Eigen::MatrixXd y = centered(random_matrix(40, 3, 24));
        FittedModel pls = fit_pls(x, y, 3);
        FittedModel mlr = fit_mlr(x, y);
        CHECK((x * pls.w - x * mlr.w).norm() < 1e-6 * y.norm());
    }
    SUBCASE("zero cross-covariance stops extraction early") {
        Eigen::MatrixXd x = centered(random_matrix(30, 2, 25));
        Eigen::MatrixXd y = Eigen::MatrixXd::Zero(30, 2);
        FittedModel m = fit_pls(x, y, 2);
        CHECK(m.rank == 0);
        CHECK(m.early_stop);
        CHECK(m.w.norm() == 0.0);
    }
}

TEST_CASE("cca") {
    SUBCASE("y equal to x gives canonical correlation 1") {
        Eigen::MatrixXd x = centered(random_matrix(50, 1, 26));
        FittedModel m = fit_cca(x, x, 1);
        CHECK(m.spectrum(0) == doctest::Approx(1.0).epsilon(1e-6));
    }
    SUBCASE("sample-orthogonal blocks give correlations near zero") {
        Eigen::MatrixXd x = centered(random_matrix(60, 3, 27));
        Eigen::MatrixXd y0 = centered(random_matrix(60, 2, 28));
        Eigen::MatrixXd y = centered(Eigen::MatrixXd(y0 - x * fit_mlr(x, y0).w));
        FittedModel m = fit_cca(x, y, 2);
        CHECK(m.spectrum.maxCoeff() < 1e-6);
    }
    SUBCASE("correlations match a whitening-then-SVD oracle") {
        Eigen::MatrixXd x = centered(random_matrix(200, 3, 29));
        Eigen::MatrixXd y = centered(random_matrix(200, 3, 30));
        // plant correlation
        y.col(0) += 0.8 * x.col(1);
        y = centered(y);
        FittedModel m = fit_cca(x, y, 3);

        Eigen::MatrixXd sxx = x.transpose() * x / 199.0;
        Eigen::MatrixXd syy = y.transpose() * y / 199.0;
        Eigen::MatrixXd sxy = x.transpose() * y / 199.0;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ex(sxx), ey(syy);
        Eigen::MatrixXd k = ex.operatorInverseSqrt() * sxy * ey.operatorInverseSqrt();
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(k);
        for (int i = 0; i < 3; ++i)
            CHECK(m.spectrum(i) == doctest::Approx(svd.singularValues()(i)).epsilon(1e-6));
        for (int i = 0; i < 3; ++i) {
            CHECK(m.spectrum(i) >= 0.0);
            CHECK(m.spectrum(i) <= 1.0 + 1e-8);
        }
    }
}

TEST_CASE("fit_anchor") {
    Eigen::MatrixXd w_true = make_lowrank_coefficients(4, 3, 2, 31);
    ScmSpec scm_spec = ScmSpec::iv_graph(4, 3, w_true);
    DataBlock block = sample(scm_spec, 120, InterventionSpec{1.0}, 32);

    SUBCASE("gamma = 1 reproduces the plain fit for every estimator kind") {
        for (auto kind : {EstimatorKind::Mlr, EstimatorKind::Ridge, EstimatorKind::Rrr,
                          EstimatorKind::Rrrr, EstimatorKind::Opls, EstimatorKind::Pls,
                          EstimatorKind::Cca}) {
            EstimatorSpec spec{kind, 2, 0.5};
            FittedModel anchored = fit_anchor(spec, block, GammaMode::gamma(1.0));
            FittedModel plain = fit_estimator(spec, block.x, block.y);
            CHECK((anchored.w - plain.w).norm() <= 1e-12 * (plain.w.norm() + 1.0));
        }
    }
    SUBCASE("the IV limit matches two-stage least squares on an identified instance") {
        // one predictor, one anchor, hidden confounding
        Eigen::MatrixXd a = centered(random_matrix(200, 1, 33));
        Eigen::MatrixXd h = centered(random_matrix(200, 1, 34));
        Eigen::MatrixXd ex = centered(random_matrix(200, 1, 35));
        Eigen::MatrixXd ey = centered(random_matrix(200, 1, 36));
        Eigen::MatrixXd x = 2.0 * a + h + ex;
        Eigen::MatrixXd y = 0.7 * x + h + ey;
        x = centered(x);
        y = centered(y);

        // oracle: regress x on a, then y on the fitted x
        const double b1 = (a.transpose() * x)(0, 0) / (a.transpose() * a)(0, 0);
        Eigen::MatrixXd xhat = a * b1;
        const double w_2sls = (xhat.transpose() * y)(0, 0) / (xhat.transpose() * xhat)(0, 0);

        FittedModel m = fit_anchor({EstimatorKind::Mlr}, make_block(x, y, a),
                                   GammaMode::iv_limit());
        CHECK(std::abs(m.w(0, 0) - w_2sls) < 1e-8);
    }
    SUBCASE("gamma = 0 equals regressing partialled-out y on partialled-out x") {
        AnchorTransform t = AnchorTransform::fit(block.a);
        Eigen::MatrixXd xr = block.x - t.project(block.x);
        Eigen::MatrixXd yr = block.y - t.project(block.y);
        FittedModel pa = fit_anchor({EstimatorKind::Mlr}, block, GammaMode::partial_out());
        CHECK((pa.w - fit_mlr(xr, yr).w).norm() < 1e-10);
    }
    SUBCASE("CCA carries a not-anchor-compatible warning when regularised") {
        FittedModel warned = fit_anchor({EstimatorKind::Cca, 2}, block, GammaMode::gamma(5.0));
        CHECK(warned.incompatible_warning);
        FittedModel clean = fit_anchor({EstimatorKind::Cca, 2}, block, GammaMode::gamma(1.0));
        CHECK_FALSE(clean.incompatible_warning);
    }
}

TEST_CASE("predict") {
    SUBCASE("training residuals orthogonal to col(x)") {
        DataBlock block;
        block.x = random_matrix(40, 3, 37);
        block.x.array() += 2.0;
        block.y = random_matrix(40, 2, 38);
        block.a = random_matrix(40, 1, 39);
        FittedModel m = fit_pipeline({EstimatorKind::Mlr}, block, GammaMode::gamma(1.0),
                                     StandardizeMode::Center);
        Eigen::MatrixXd resid = block.y - predict(m, block.x);
        Eigen::MatrixXd xc = centered(block.x);
        CHECK((xc.transpose() * resid).norm() < 1e-8 * block.y.norm());
    }
    SUBCASE("a row at the training means predicts the target means") {
        DataBlock block;
        block.x = random_matrix(30, 2, 40);
        block.x.array() += 5.0;
        block.y = random_matrix(30, 2, 41);
        block.y.array() += -3.0;
        block.a = random_matrix(30, 1, 42);
        FittedModel m = fit_pipeline({EstimatorKind::Mlr}, block, GammaMode::gamma(1.0),
                                     StandardizeMode::CenterScale);
        Eigen::MatrixXd x_new = block.x.colwise().mean();
        Eigen::MatrixXd yhat = predict(m, x_new);
        CHECK((yhat - block.y.colwise().mean()).norm() < 1e-10);
    }
    SUBCASE("slope-2 line extrapolates") {
        DataBlock block;
        block.x.resize(2, 1);
        block.x << 1, 2;
        block.y.resize(2, 1);
        block.y << 2, 4;
        block.a = Eigen::MatrixXd::Zero(2, 1);
        FittedModel m = fit_pipeline({EstimatorKind::Mlr}, block, GammaMode::gamma(1.0),
                                     StandardizeMode::Center);
        Eigen::MatrixXd x_new(1, 1);
        x_new << 3;
        CHECK(predict(m, x_new)(0, 0) == doctest::Approx(6.0));
    }
    SUBCASE("dimension mismatch throws") {
        FittedModel m = fit_mlr(Eigen::MatrixXd::Identity(3, 3),
                                Eigen::MatrixXd::Identity(3, 3));
        CHECK_THROWS(predict(m, Eigen::MatrixXd::Zero(2, 2)));
    }
}

TEST_CASE("training MSE is non-increasing in the rank (nesting property)") {
    Eigen::MatrixXd x = centered(random_matrix(60, 6, 43));
    Eigen::MatrixXd y = centered(random_matrix(60, 5, 44));
    auto fits = [&](int rank) {
        return std::vector<Eigen::MatrixXd>{
            fit_rrr(x, y, rank).w, fit_rrrr(x, y, rank, 0.5).w, fit_opls(x, y, rank).w,
            fit_pls(x, y, rank).w};
    };
    std::vector<double> prev(4, std::numeric_limits<double>::infinity());
    for (int rank = 1; rank <= 5; ++rank) {
        auto ws = fits(rank);
        for (size_t i = 0; i < ws.size(); ++i) {
            const double loss = training_loss(x, y, ws[i]);
            CHECK(loss <= prev[i] + 1e-9 * (1.0 + prev[i]));
            prev[i] = loss;
        }
    }
}

TEST_CASE("penalised objective equals the residual covariance identity (fixed w)") {
    Eigen::MatrixXd x = centered(random_matrix(80, 5, 45));
    Eigen::MatrixXd y = centered(random_matrix(80, 3, 46));
    Eigen::MatrixXd a = centered(random_matrix(80, 2, 47));
    Eigen::MatrixXd w = random_matrix(5, 3, 48);
    AnchorTransform t = AnchorTransform::fit(a);
    for (double gamma : {0.0, 0.5, 2.0, 5.0, 100.0}) {
        auto mode = gamma == 0.0 ? GammaMode::partial_out() : GammaMode::gamma(gamma);
        auto [xt, yt] = transform(t, x, y, mode);
        const double lhs = (yt - xt * w).squaredNorm() / 79.0;
        Eigen::MatrixXd resid = y - x * w;
        const double rhs =
            (resid.squaredNorm() + (gamma - 1.0) * t.project(resid).squaredNorm()) / 79.0;
        CHECK(std::abs(lhs - rhs) <= 1e-10 * std::max(1.0, std::abs(rhs)));
    }
}

TEST_CASE("anchor-MLR coefficients approach the plain fit as gamma approaches 1") {
    Eigen::MatrixXd w_true = make_lowrank_coefficients(4, 4, 2, 49);
    ScmSpec spec = ScmSpec::iv_graph(4, 4, w_true);
    DataBlock block = sample(spec, 400, InterventionSpec{1.0}, 50);
    FittedModel base = fit_anchor({EstimatorKind::Mlr}, block, GammaMode::gamma(1.0));

    auto dist = [&](double g) {
        return (fit_anchor({EstimatorKind::Mlr}, block, GammaMode::gamma(g)).w - base.w).norm();
    };
    double prev = dist(1.5);
    for (double g : {1.25, 1.1, 1.01, 1.001}) {
        const double cur = dist(g);
        CHECK(cur <= prev + 1e-12);
        prev = cur;
    }
    prev = dist(0.6);
    for (double g : {0.8, 0.9, 0.99, 0.999}) {
        const double cur = dist(g);
        CHECK(cur <= prev + 1e-12);
        prev = cur;
    }
}

TEST_CASE("estimator is consistent for the population anchor solution") {
    const int d = 4, p = 3;
    Eigen::MatrixXd w_true = make_lowrank_coefficients(d, p, 2, 51);
    ScmSpec spec = ScmSpec::iv_graph(d, p, w_true);
    const double gamma = 5.0;

    // population solution from the closed-form second moments
    Eigen::MatrixXd m = spec.population_joint_moment() +
                        (gamma - 1.0) * spec.population_explained_moment();
    Eigen::MatrixXd w_pop = m.topLeftCorner(d, d).ldlt().solve(m.topLeftCorner(d, d + p)
                                                                   .rightCols(p));

    auto fit_error = [&](int n, uint64_t seed) {
        DataBlock block = sample(spec, n, InterventionSpec{1.0}, seed);
        FittedModel fitted = fit_anchor({EstimatorKind::Mlr}, block, GammaMode::gamma(gamma));
        return (fitted.w - w_pop).norm();
    };
    const double err_small = fit_error(2000, 52);
    const double err_large = fit_error(200000, 53);
    CHECK(err_small / err_large >= 5.0);
}

TEST_CASE("rank constraint holds numerically for every reduced-rank kind") {
    Eigen::MatrixXd x = centered(random_matrix(50, 5, 60));
    Eigen::MatrixXd y = centered(random_matrix(50, 4, 61));
    auto numerical_rank = [](const Eigen::MatrixXd& w) {
        Eigen::BDCSVD<Eigen::MatrixXd> svd(w);
        int r = 0;
        for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
            if (svd.singularValues()(i) > 1e-8 * svd.singularValues()(0)) ++r;
        return r;
    };
    for (int rank = 1; rank <= 3; ++rank) {
        CHECK(numerical_rank(fit_rrr(x, y, rank).w) <= rank);
        CHECK(numerical_rank(fit_rrrr(x, y, rank, 0.7).w) <= rank);
        CHECK(numerical_rank(fit_opls(x, y, rank).w) <= rank);
    }
}

TEST_CASE("degenerate spectra set the tie flag") {
    // fitted values 2*I have two equal singular values; any rank-1 cut ties
    Eigen::MatrixXd x = Eigen::MatrixXd::Identity(4, 2);
    Eigen::MatrixXd y = 2.0 * Eigen::MatrixXd::Identity(4, 2);
    CHECK(fit_rrr(x, y, 1).tie_warning);
    // well-separated spectrum stays unflagged
    Eigen::MatrixXd y2(4, 2);
    y2.setZero();
    y2(0, 0) = 3.0;
    y2(1, 1) = 1.0;
    CHECK_FALSE(fit_rrr(x, y2, 1).tie_warning);
}

TEST_CASE("spec validation flags") {
    EstimatorSpec cca{EstimatorKind::Cca, 1};
    CHECK_FALSE(cca.anchor_compatible());
    for (auto kind : {EstimatorKind::Mlr, EstimatorKind::Ridge, EstimatorKind::Rrr,
                      EstimatorKind::Rrrr, EstimatorKind::Opls, EstimatorKind::Pls})
        CHECK(EstimatorSpec{kind, 1}.anchor_compatible());
    CHECK_THROWS(EstimatorSpec{EstimatorKind::Pls, 9}.validate(3, 4));
    CHECK(parse_kind("OPLS") == EstimatorKind::Opls);
    CHECK(kind_name(EstimatorKind::Rrrr) == "RRRR");
}
