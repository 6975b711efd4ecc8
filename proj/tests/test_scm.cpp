#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "anchormva/metrics.hpp"
#include "anchormva/scm.hpp"
#include "test_util.hpp"

using namespace anchormva;

TEST_CASE("make_lowrank_coefficients") {
    SUBCASE("1x1 with rank 1 is forced to [[1]] by the sum normalisation") {
        Eigen::MatrixXd w = make_lowrank_coefficients(1, 1, 1, 123);
        CHECK(w(0, 0) == doctest::Approx(1.0));
    }
    SUBCASE("same seed gives the identical matrix") {
        Eigen::MatrixXd w1 = make_lowrank_coefficients(6, 5, 2, 42);
        Eigen::MatrixXd w2 = make_lowrank_coefficients(6, 5, 2, 42);
        CHECK((w1 - w2).norm() == 0.0);
        Eigen::MatrixXd w3 = make_lowrank_coefficients(6, 5, 2, 43);
        CHECK((w1 - w3).norm() > 0.0);
    }
    SUBCASE("numerical rank equals the requested rank") {
        Eigen::MatrixXd w = make_lowrank_coefficients(10, 10, 3, 7);
        Eigen::BDCSVD<Eigen::MatrixXd> svd(w);
        const auto& sv = svd.singularValues();
        CHECK(sv(2) > 1e-10 * sv(0));
        for (int i = 3; i < 10; ++i) CHECK(sv(i) < 1e-10 * sv(0));
    }
    SUBCASE("factor sums are normalised to one before multiplication") {
        // w.sum() = (sum u)(sum v) = 1 for the rank-1 case
        Eigen::MatrixXd w = make_lowrank_coefficients(4, 3, 1, 9);
        CHECK(w.sum() == doctest::Approx(1.0));
    }
    SUBCASE("rank bounds") { CHECK_THROWS(make_lowrank_coefficients(3, 3, 4, 1)); }
}

TEST_CASE("sample basics") {
    Eigen::MatrixXd w = make_lowrank_coefficients(4, 3, 2, 11);
    ScmSpec spec = ScmSpec::iv_graph(4, 3, w);

    SUBCASE("t = 0 removes the anchor entirely") {
        DataBlock block = sample(spec, 50, InterventionSpec{0.0}, 12);
        CHECK(block.a.norm() == 0.0);
    }
    SUBCASE("unit intervention gives unit anchor variance (Monte Carlo)") {
        DataBlock block = sample(spec, 200000, InterventionSpec{1.0}, 13);
        const double var = block.a.squaredNorm() / 199999.0;
        CHECK(var == doctest::Approx(1.0).epsilon(0.02));
    }
    SUBCASE("t scales the anchor variance when t_is_variance") {
        DataBlock block = sample(spec, 200000, InterventionSpec{4.0}, 14);
        const double var = block.a.squaredNorm() / 199999.0;
        CHECK(var == doctest::Approx(4.0).epsilon(0.02));
    }
    SUBCASE("t scales the standard deviation in the alternate convention") {
        ScmSpec sd_spec = spec;
        sd_spec.t_is_variance = false;
        DataBlock block = sample(sd_spec, 200000, InterventionSpec{2.0}, 15);
        const double var = block.a.squaredNorm() / 199999.0;
        CHECK(var == doctest::Approx(4.0).epsilon(0.02));
    }
    SUBCASE("identical seeds give bit-identical blocks") {
        DataBlock b1 = sample(spec, 100, InterventionSpec{1.0}, 16);
        DataBlock b2 = sample(spec, 100, InterventionSpec{1.0}, 16);
        CHECK((b1.x - b2.x).norm() == 0.0);
        CHECK((b1.y - b2.y).norm() == 0.0);
        CHECK((b1.a - b2.a).norm() == 0.0);
    }
    SUBCASE("blocks are centered") {
        DataBlock block = sample(spec, 500, InterventionSpec{1.0}, 17);
        CHECK(block.x.colwise().mean().norm() < 1e-12);
        CHECK(block.y.colwise().mean().norm() < 1e-12);
        CHECK(std::abs(block.a.mean()) < 1e-12);
    }
}

TEST_CASE("non-gaussian noise families are centered and unit-variance at t = 1") {
    Eigen::MatrixXd w = make_lowrank_coefficients(3, 3, 1, 18);
    for (auto family : {NoiseFamily::Exponential, NoiseFamily::Gamma, NoiseFamily::Poisson}) {
        ScmSpec spec = ScmSpec::iv_graph(3, 3, w);
        spec.noise = family;
        DataBlock block = sample(spec, 100000, InterventionSpec{1.0}, 19);
        CHECK(std::abs(block.a.mean()) < 1e-12);
        const double var = block.a.squaredNorm() / 99999.0;
        CHECK(var == doctest::Approx(1.0).epsilon(0.03));
    }
    CHECK(parse_noise("poisson") == NoiseFamily::Poisson);
    CHECK_THROWS(parse_noise("cauchy"));
}

TEST_CASE("large-sample IV identification recovers the true coefficients") {
    // identified case: one predictor, one instrument (multi-output is fine)
    const int d = 1, p = 2;
    Eigen::MatrixXd w = make_lowrank_coefficients(d, p, 1, 20);
    ScmSpec spec = ScmSpec::iv_graph(d, p, w);
    DataBlock block = sample(spec, 200000, InterventionSpec{1.0}, 21);
    FittedModel iv = fit_anchor({EstimatorKind::Mlr}, block, GammaMode::iv_limit());
    CHECK((iv.w - w).cwiseAbs().maxCoeff() < 0.05);
    // the plain regression is confounded away from w_true by the hidden path
    FittedModel ols = fit_anchor({EstimatorKind::Mlr}, block, GammaMode::gamma(1.0));
    CHECK((ols.w - w).cwiseAbs().maxCoeff() > 0.1);
}

TEST_CASE("confounded topology routes the anchor through the hidden variable") {
    Eigen::MatrixXd w = make_lowrank_coefficients(3, 3, 1, 22);
    ScmSpec spec = ScmSpec::confounded(3, 3, w);
    CHECK(spec.coef_a_to_h == 1.0);
    DataBlock block = sample(spec, 100000, InterventionSpec{1.0}, 23);
    // var(X_j) = var(2A + H' + eps) with H = A + eps_H: (1+1)^2... checked via moments
    Eigen::MatrixXd pop = spec.population_joint_moment();
    const double sample_var = block.x.col(0).squaredNorm() / 99999.0;
    CHECK(sample_var == doctest::Approx(pop(0, 0)).epsilon(0.05));
}

TEST_CASE("population moments match large-sample covariances") {
    const int d = 3, p = 2;
    Eigen::MatrixXd w = make_lowrank_coefficients(d, p, 1, 24);
    ScmSpec spec = ScmSpec::iv_graph(d, p, w);
    DataBlock block = sample(spec, 200000, InterventionSpec{1.0}, 25);
    Eigen::MatrixXd z(block.n(), d + p);
    z << block.x, block.y;
    Eigen::MatrixXd emp = z.transpose() * z / static_cast<double>(block.n() - 1);
    Eigen::MatrixXd pop = spec.population_joint_moment();
    CHECK((emp - pop).norm() < 0.05 * pop.norm());

    AnchorTransform t = AnchorTransform::fit(block.a);
    Eigen::MatrixXd pz = t.project(z);
    Eigen::MatrixXd emp_explained = pz.transpose() * pz / static_cast<double>(block.n() - 1);
    Eigen::MatrixXd pop_explained = spec.population_explained_moment();
    CHECK((emp_explained - pop_explained).norm() < 0.05 * std::max(1.0, pop_explained.norm()));
}

TEST_CASE("perturbation_sweep") {
    Eigen::MatrixXd w = make_lowrank_coefficients(4, 4, 2, 26);
    ScmSpec spec = ScmSpec::iv_graph(4, 4, w);

    SUBCASE("single-cell sweep produces finite positive mse") {
        std::vector<SweepEstimator> est = {{EstimatorSpec{EstimatorKind::Mlr},
                                            GammaMode::gamma(1.0)}};
        SweepResult res = perturbation_sweep(spec, est, {1.0}, 150, 3, 27);
        REQUIRE(res.records.size() == 6);  // 3 replicates x (mse, r2)
        for (const auto& r : res.records) {
            if (r.metric == "mse") {
                CHECK(std::isfinite(r.value));
                CHECK(r.value > 0.0);
            }
        }
    }
    SUBCASE("records are deterministic and independent of thread count") {
        std::vector<SweepEstimator> est = {
            {EstimatorSpec{EstimatorKind::Mlr}, GammaMode::gamma(1.0)},
            {EstimatorSpec{EstimatorKind::Mlr}, GammaMode::gamma(5.0)},
            {EstimatorSpec{EstimatorKind::Rrr, 2}, GammaMode::iv_limit()}};
        SweepResult r1 = perturbation_sweep(spec, est, {0.0, 2.0}, 100, 4, 28, 1);
        SweepResult r8 = perturbation_sweep(spec, est, {0.0, 2.0}, 100, 4, 28, 8);
        REQUIRE(r1.records.size() == r8.records.size());
        std::ostringstream s1, s8;
        r1.write_csv(s1);
        r8.write_csv(s8);
        CHECK(s1.str() == s8.str());
    }
    SUBCASE("gamma = 5 beats gamma = 1 under a strong intervention") {
        std::vector<SweepEstimator> est = {
            {EstimatorSpec{EstimatorKind::Mlr}, GammaMode::gamma(1.0)},
            {EstimatorSpec{EstimatorKind::Mlr}, GammaMode::gamma(5.0)}};
        ScmSpec big = ScmSpec::iv_graph(10, 10, make_lowrank_coefficients(10, 10, 5, 29));
        SweepResult res = perturbation_sweep(big, est, {4.0}, 300, 20, 30, 4);
        auto rows = summarize(res);
        double mse1 = -1, mse5 = -1;
        for (const auto& row : rows) {
            if (row.metric != "mse") continue;
            if (row.gamma == "1") mse1 = row.mean;
            if (row.gamma == "5") mse5 = row.mean;
        }
        REQUIRE(mse1 > 0);
        REQUIRE(mse5 > 0);
        CHECK(mse5 < mse1);
    }
    SUBCASE("partialling-out wins at t = 0") {
        std::vector<SweepEstimator> est = {
            {EstimatorSpec{EstimatorKind::Mlr}, GammaMode::partial_out()},
            {EstimatorSpec{EstimatorKind::Mlr}, GammaMode::gamma(1.0)},
            {EstimatorSpec{EstimatorKind::Mlr}, GammaMode::gamma(5.0)},
            {EstimatorSpec{EstimatorKind::Mlr}, GammaMode::iv_limit()}};
        ScmSpec big = ScmSpec::iv_graph(10, 10, make_lowrank_coefficients(10, 10, 5, 31));
        SweepResult res = perturbation_sweep(big, est, {0.0}, 300, 20, 32, 4);
        auto rows = summarize(res);
        double best_other = std::numeric_limits<double>::infinity();
        double pa = -1;
        for (const auto& row : rows) {
            if (row.metric != "mse") continue;
            if (row.gamma == "0") pa = row.mean;
            else best_other = std::min(best_other, row.mean);
        }
        REQUIRE(pa > 0);
        CHECK(pa < best_other);
    }
    SUBCASE("csv header matches the wire format") {
        std::vector<SweepEstimator> est = {{EstimatorSpec{EstimatorKind::Mlr},
                                            GammaMode::gamma(1.0)}};
        SweepResult res = perturbation_sweep(spec, est, {1.0}, 50, 1, 33);
        std::ostringstream out;
        res.write_csv(out);
        CHECK(out.str().rfind("estimator,gamma,t,replicate,metric,value\n", 0) == 0);
    }
}

TEST_CASE("summarize computes mean and SEM per cell") {
    SweepResult res;
    res.records = {{"MLR", "1", 0.0, 0, "mse", 1.0},
                   {"MLR", "1", 0.0, 1, "mse", 3.0},
                   {"MLR", "1", 0.0, 2, "mse", 2.0}};
    auto rows = summarize(res);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].mean == doctest::Approx(2.0));
    CHECK(rows[0].sem == doctest::Approx(1.0 / std::sqrt(3.0)));
    CHECK(rows[0].count == 3);
}

TEST_CASE("linspace endpoints") {
    auto g = linspace(0.0, 4.0, 20);
    CHECK(g.size() == 20);
    CHECK(g.front() == 0.0);
    CHECK(g.back() == 4.0);
    CHECK(linspace(2.0, 2.0, 1).size() == 1);
}
