#include "anchormva/scm.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <stdexcept>

#include "anchormva/csv.hpp"
#include "anchormva/metrics.hpp"
#include "anchormva/parallel.hpp"
#include "anchormva/rng.hpp"

namespace anchormva {

NoiseFamily parse_noise(const std::string& name) {
    if (name == "gaussian" || name == "normal") return NoiseFamily::Gaussian;
    if (name == "exponential") return NoiseFamily::Exponential;
    if (name == "gamma") return NoiseFamily::Gamma;
    if (name == "poisson") return NoiseFamily::Poisson;
    throw std::invalid_argument("unknown noise family: " + name);
}

std::string noise_name(NoiseFamily f) {
    switch (f) {
        case NoiseFamily::Gaussian: return "gaussian";
        case NoiseFamily::Exponential: return "exponential";
        case NoiseFamily::Gamma: return "gamma";
        case NoiseFamily::Poisson: return "poisson";
    }
    return "?";
}

ScmSpec ScmSpec::iv_graph(int d, int p, Eigen::MatrixXd w) {
    ScmSpec s;
    s.topology = Topology::IvGraph;
    s.d = d;
    s.p = p;
    s.w_true = std::move(w);
    return s;
}

ScmSpec ScmSpec::confounded(int d, int p, Eigen::MatrixXd w) {
    ScmSpec s = iv_graph(d, p, std::move(w));
    s.topology = Topology::ConfoundedGraph;
    s.coef_a_to_h = 1.0;
    return s;
}

namespace {

/// Coefficients of stacked (X, Y) on the noise vector (eps_A, eps_H, eps_X, eps_Y).
Eigen::MatrixXd structural_map(const ScmSpec& s) {
    const int d = s.d, p = s.p;
    const int m = 2 + d + p;
    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(d + p, m);
    const double ax = s.coef_a_to_x + s.coef_h_to_x * s.coef_a_to_h;
    for (int j = 0; j < d; ++j) {
        L(j, 0) = ax;
        L(j, 1) = s.coef_h_to_x;
        L(j, 2 + j) = 1.0;
    }
    const double ay = s.coef_a_to_y + s.coef_h_to_y * s.coef_a_to_h;
    for (int k = 0; k < p; ++k) {
        L.row(d + k) = s.w_true.col(k).transpose() * L.topRows(d);
        L(d + k, 0) += ay;
        L(d + k, 1) += s.coef_h_to_y;
        L(d + k, 2 + d + k) += 1.0;
    }
    return L;
}

}  // namespace

Eigen::MatrixXd ScmSpec::population_joint_moment(double t) const {
    Eigen::MatrixXd L = structural_map(*this);
    Eigen::VectorXd var = Eigen::VectorXd::Ones(L.cols());
    var(0) = t;
    return L * var.asDiagonal() * L.transpose();
}

Eigen::MatrixXd ScmSpec::population_explained_moment() const {
    Eigen::MatrixXd L = structural_map(*this);
    return L.col(0) * L.col(0).transpose();
}

Eigen::MatrixXd make_lowrank_coefficients(int d, int p, int rank, uint64_t seed, double lo,
                                          double hi) {
    if (rank < 1 || rank > std::min(d, p))
        throw std::invalid_argument("coefficient rank out of bounds");
    auto rng = make_rng(seed);
    std::uniform_real_distribution<double> unif(lo, hi);
    Eigen::MatrixXd u(d, rank), v(rank, p);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < rank; ++j) u(i, j) = unif(rng);
    for (int i = 0; i < rank; ++i)
        for (int j = 0; j < p; ++j) v(i, j) = unif(rng);
    u /= u.sum();
    v /= v.sum();
    return u * v;
}

namespace {

Eigen::MatrixXd draw_noise(std::mt19937_64& rng, NoiseFamily family, Eigen::Index n,
                           Eigen::Index cols) {
    Eigen::MatrixXd m(n, cols);
    switch (family) {
        case NoiseFamily::Gaussian: {
            std::normal_distribution<double> dist(0.0, 1.0);
            for (Eigen::Index i = 0; i < n; ++i)
                for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = dist(rng);
            break;
        }
        case NoiseFamily::Exponential: {
            std::exponential_distribution<double> dist(1.0);
            for (Eigen::Index i = 0; i < n; ++i)
                for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = dist(rng);
            break;
        }
        case NoiseFamily::Gamma: {
            std::gamma_distribution<double> dist(1.0, 1.0);
            for (Eigen::Index i = 0; i < n; ++i)
                for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = dist(rng);
            break;
        }
        case NoiseFamily::Poisson: {
            std::poisson_distribution<long> dist(1.0);
            for (Eigen::Index i = 0; i < n; ++i)
                for (Eigen::Index j = 0; j < cols; ++j)
                    m(i, j) = static_cast<double>(dist(rng));
            break;
        }
    }
    // the SCM assumes centered noise
    m.rowwise() -= m.colwise().mean().eval();
    return m;
}

}  // namespace

DataBlock sample(const ScmSpec& spec, int n, const InterventionSpec& intervention,
                 uint64_t seed) {
    if (n < 2) throw std::invalid_argument("sample needs n >= 2");
    if (intervention.t < 0) throw std::invalid_argument("perturbation strength t must be >= 0");
    if (spec.w_true.rows() != spec.d || spec.w_true.cols() != spec.p)
        throw std::invalid_argument("w_true dimensions do not match spec");

    auto rng = make_rng(seed);
    Eigen::MatrixXd eps_a = draw_noise(rng, spec.noise, n, 1);
    Eigen::MatrixXd eps_h = draw_noise(rng, spec.noise, n, 1);
    Eigen::MatrixXd eps_x = draw_noise(rng, spec.noise, n, spec.d);
    Eigen::MatrixXd eps_y = draw_noise(rng, spec.noise, n, spec.p);

    const double scale = spec.t_is_variance ? std::sqrt(intervention.t) : intervention.t;
    Eigen::VectorXd a = eps_a.col(0) * scale;
    Eigen::VectorXd h = spec.coef_a_to_h * a + eps_h.col(0);

    DataBlock block;
    block.a = a;
    block.x = eps_x;
    block.x.colwise() += spec.coef_a_to_x * a + spec.coef_h_to_x * h;
    block.y = block.x * spec.w_true + eps_y;
    block.y.colwise() += spec.coef_a_to_y * a + spec.coef_h_to_y * h;

    block.x.rowwise() -= block.x.colwise().mean().eval();
    block.y.rowwise() -= block.y.colwise().mean().eval();
    block.a.rowwise() -= block.a.colwise().mean().eval();
    return block;
}

void SweepResult::write_csv(std::ostream& out) const {
    out << "estimator,gamma,t,replicate,metric,value\n";
    for (const auto& r : records) {
        out << r.estimator << ',' << r.gamma << ',' << format_double(r.t) << ','
            << r.replicate << ',' << r.metric << ',' << format_double(r.value) << '\n';
    }
}

std::vector<SweepSummaryRow> summarize(const SweepResult& sweep) {
    std::vector<SweepSummaryRow> rows;
    std::map<std::string, size_t> index;
    std::vector<std::vector<double>> values;
    for (const auto& r : sweep.records) {
        std::string key = r.estimator + '\x1f' + r.gamma + '\x1f' + format_double(r.t) +
                          '\x1f' + r.metric;
        auto it = index.find(key);
        size_t slot;
        if (it == index.end()) {
            slot = rows.size();
            index.emplace(key, slot);
            rows.push_back({r.estimator, r.gamma, r.t, r.metric, 0.0, 0.0, 0});
            values.emplace_back();
        } else {
            slot = it->second;
        }
        if (std::isfinite(r.value)) values[slot].push_back(r.value);
    }
    for (size_t i = 0; i < rows.size(); ++i) {
        const auto& v = values[i];
        rows[i].count = static_cast<int>(v.size());
        if (v.empty()) {
            rows[i].mean = std::numeric_limits<double>::quiet_NaN();
            rows[i].sem = std::numeric_limits<double>::quiet_NaN();
            continue;
        }
        double mean = 0.0;
        for (double x : v) mean += x;
        mean /= static_cast<double>(v.size());
        double var = 0.0;
        for (double x : v) var += (x - mean) * (x - mean);
        rows[i].mean = mean;
        rows[i].sem = v.size() > 1
                          ? std::sqrt(var / static_cast<double>(v.size() - 1) /
                                      static_cast<double>(v.size()))
                          : 0.0;
    }
    return rows;
}

void write_summary_csv(const std::vector<SweepSummaryRow>& rows, std::ostream& out) {
    out << "estimator,gamma,t,metric,mean,sem,lo2sem,hi2sem,count\n";
    for (const auto& r : rows) {
        out << r.estimator << ',' << r.gamma << ',' << format_double(r.t) << ',' << r.metric
            << ',' << format_double(r.mean) << ',' << format_double(r.sem) << ','
            << format_double(r.mean - 2 * r.sem) << ',' << format_double(r.mean + 2 * r.sem)
            << ',' << r.count << '\n';
    }
}

SweepResult perturbation_sweep(const ScmSpec& spec,
                               const std::vector<SweepEstimator>& estimators,
                               const std::vector<double>& t_grid, int n, int replicates,
                               uint64_t base_seed, int threads) {
    if (estimators.empty() || t_grid.empty() || replicates < 1)
        throw std::invalid_argument("sweep needs estimators, a t grid and replicates >= 1");

    const double nan = std::numeric_limits<double>::quiet_NaN();
    std::vector<std::vector<SweepRecord>> per_replicate(static_cast<size_t>(replicates));

    parallel_for(static_cast<size_t>(replicates), threads, [&](size_t b) {
        DataBlock train = sample(spec, n, InterventionSpec{1.0},
                                 base_seed + static_cast<uint64_t>(b));
        std::vector<FittedModel> models;
        std::vector<bool> ok;
        models.reserve(estimators.size());
        for (const auto& est : estimators) {
            try {
                models.push_back(fit_pipeline(est.spec, train, est.gamma,
                                              StandardizeMode::Center));
                ok.push_back(true);
            } catch (const std::exception&) {
                models.emplace_back();
                ok.push_back(false);
            }
        }
        auto& out = per_replicate[b];
        for (size_t ti = 0; ti < t_grid.size(); ++ti) {
            DataBlock test = sample(spec, n, InterventionSpec{t_grid[ti]},
                                    derive_seed(base_seed, b, ti));
            for (size_t e = 0; e < estimators.size(); ++e) {
                double m = nan, r = nan;
                if (ok[e]) {
                    try {
                        Eigen::MatrixXd yhat = predict(models[e], test.x);
                        m = mse(test.y, yhat);
                        r = r2(test.y, yhat).value;
                    } catch (const std::exception&) {
                    }
                }
                const auto& est = estimators[e];
                out.push_back({est.label(), est.gamma.label(), t_grid[ti],
                               static_cast<int>(b), "mse", m});
                out.push_back({est.label(), est.gamma.label(), t_grid[ti],
                               static_cast<int>(b), "r2", r});
            }
        }
    });

    SweepResult result;
    for (auto& chunk : per_replicate)
        result.records.insert(result.records.end(), chunk.begin(), chunk.end());
    return result;
}

std::vector<double> linspace(double lo, double hi, int count) {
    if (count < 1) throw std::invalid_argument("linspace needs count >= 1");
    std::vector<double> out(static_cast<size_t>(count));
    if (count == 1) {
        out[0] = lo;
        return out;
    }
    for (int i = 0; i < count; ++i)
        out[static_cast<size_t>(i)] = lo + (hi - lo) * i / (count - 1);
    return out;
}

}  // namespace anchormva
