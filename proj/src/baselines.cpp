#include "anchormva/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <stdexcept>

#include "anchormva/rng.hpp"

namespace anchormva {

std::pair<std::vector<Eigen::Index>, std::vector<Eigen::Index>> holdout_split(
    Eigen::Index n, double fraction, uint64_t seed) {
    if (n < 2) throw std::invalid_argument("holdout_split needs n >= 2");
    std::vector<Eigen::Index> idx(static_cast<size_t>(n));
    std::iota(idx.begin(), idx.end(), 0);
    auto rng = make_rng(seed);
    std::shuffle(idx.begin(), idx.end(), rng);
    auto n_val = static_cast<Eigen::Index>(std::floor(fraction * static_cast<double>(n)));
    n_val = std::clamp<Eigen::Index>(n_val, 1, n - 1);
    std::vector<Eigen::Index> train(idx.begin(), idx.end() - n_val);
    std::vector<Eigen::Index> val(idx.end() - n_val, idx.end());
    std::sort(train.begin(), train.end());
    std::sort(val.begin(), val.end());
    return {train, val};
}

namespace {

Eigen::MatrixXd take(const Eigen::MatrixXd& m, const std::vector<Eigen::Index>& idx) {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(idx.size()), m.cols());
    for (size_t i = 0; i < idx.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = m.row(idx[i]);
    return out;
}

struct GroupData {
    Eigen::MatrixXd x, y;
};

std::vector<GroupData> group_rows(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                                  const std::vector<std::string>& keys) {
    std::map<std::string, std::vector<Eigen::Index>> rows;
    for (size_t i = 0; i < keys.size(); ++i)
        rows[keys[i]].push_back(static_cast<Eigen::Index>(i));
    std::vector<GroupData> groups;
    groups.reserve(rows.size());
    for (const auto& [key, idx] : rows) {
        (void)key;
        groups.push_back({take(x, idx), take(y, idx)});
    }
    return groups;
}

/// environment x outcome-quantile-bin keys; the outcome score is the row mean
/// of y, binned on training quantiles.
std::vector<std::string> binned_keys(const Eigen::MatrixXd& y,
                                     const std::vector<std::string>& env, int bins) {
    const auto n = y.rows();
    Eigen::VectorXd score = y.rowwise().mean();
    std::vector<Eigen::Index> order(static_cast<size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return score(a) < score(b); });
    std::vector<int> bin(static_cast<size_t>(n));
    for (Eigen::Index r = 0; r < n; ++r) {
        auto b = static_cast<int>((static_cast<long>(bins) * r) / n);
        bin[static_cast<size_t>(order[static_cast<size_t>(r)])] = std::min(b, bins - 1);
    }
    std::vector<std::string> keys(static_cast<size_t>(n));
    for (size_t i = 0; i < keys.size(); ++i)
        keys[i] = env[i] + "#" + std::to_string(bin[i]);
    return keys;
}

double prediction_mse(const Eigen::MatrixXd& yhat, const Eigen::MatrixXd& y) {
    return (yhat - y).squaredNorm() / static_cast<double>(y.size());
}

// ---- IRM objective -------------------------------------------------------

struct IrmWork {
    std::vector<GroupData> envs;
    double lambda = 0.0;

    double objective(const Eigen::MatrixXd& phi, const Eigen::MatrixXd& w) const {
        double loss = 0.0, penalty = 0.0;
        for (const auto& e : envs) {
            const double sz = static_cast<double>(e.y.size());
            Eigen::MatrixXd resid = e.x * phi * w - e.y;
            loss += resid.squaredNorm() / sz;
            Eigen::MatrixXd grad_w = 2.0 * (e.x * phi).transpose() * resid / sz;
            penalty += grad_w.squaredNorm();
        }
        return loss + lambda * penalty;
    }

    void gradient(const Eigen::MatrixXd& phi, const Eigen::MatrixXd& w,
                  Eigen::MatrixXd& gphi, Eigen::MatrixXd& gw) const {
        gphi = Eigen::MatrixXd::Zero(phi.rows(), phi.cols());
        gw = Eigen::MatrixXd::Zero(w.rows(), w.cols());
        for (const auto& e : envs) {
            const double sz = static_cast<double>(e.y.size());
            Eigen::MatrixXd z = e.x * phi;
            Eigen::MatrixXd resid = z * w - e.y;
            Eigen::MatrixXd ge = 2.0 * z.transpose() * resid / sz;  // d MSE_e / d w
            gw += ge;
            gphi += 2.0 * e.x.transpose() * resid * w.transpose() / sz;
            if (lambda != 0.0) {
                gw += lambda * 4.0 / sz * (z.transpose() * (z * ge));
                gphi += lambda * 4.0 / sz *
                        (e.x.transpose() * (resid * ge.transpose()) +
                         e.x.transpose() * (e.x * (phi * (ge * w.transpose()))));
            }
        }
    }
};

// ---- CVP objective -------------------------------------------------------

struct CvpWork {
    Eigen::MatrixXd x, y;  // pooled training data
    std::vector<GroupData> groups;
    double lambda = 0.0;

    double objective(const Eigen::MatrixXd& w) const {
        double loss = (x * w - y).squaredNorm() / static_cast<double>(y.size());
        double penalty = 0.0;
        for (const auto& g : groups) {
            const auto ng = g.x.rows();
            if (ng < 2) continue;  // size-1 groups contribute 0
            Eigen::MatrixXd yhat = g.x * w;
            Eigen::RowVectorXd mean = yhat.colwise().mean();
            Eigen::MatrixXd centered = yhat.rowwise() - mean;
            penalty += centered.squaredNorm() / static_cast<double>(ng - 1);
        }
        return loss + lambda * penalty;
    }

    Eigen::MatrixXd gradient(const Eigen::MatrixXd& w) const {
        Eigen::MatrixXd g =
            2.0 * x.transpose() * (x * w - y) / static_cast<double>(y.size());
        for (const auto& grp : groups) {
            const auto ng = grp.x.rows();
            if (ng < 2) continue;
            Eigen::MatrixXd yhat = grp.x * w;
            Eigen::RowVectorXd mean = yhat.colwise().mean();
            Eigen::MatrixXd centered = yhat.rowwise() - mean;
            g += lambda * 2.0 / static_cast<double>(ng - 1) * (grp.x.transpose() * centered);
        }
        return g;
    }
};

/// Gradient-descent driver shared by IRM and CVP. Steps that raise the
/// objective are rejected and the learning rate halved (up to
/// cfg.max_halvings); the best-validation parameters are returned.
template <typename State, typename Objective, typename Step, typename ValMse>
void descend(State& state, const GdConfig& cfg, Objective&& objective, Step&& step,
             ValMse&& val_mse, bool& converged, int& epochs_run, bool& lr_halved,
             double& best_val, std::vector<double>& history, State& best_state) {
    double lr = cfg.learning_rate;
    int halvings = 0;
    int patience_count = 0;
    double obj = objective(state);
    best_state = state;
    best_val = val_mse(state);
    history.push_back(best_val);
    double patience_anchor = best_val;
    converged = false;
    epochs_run = 0;
    lr_halved = false;

    if (!std::isfinite(obj)) return;

    for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
        State candidate = step(state, lr);
        const double cobj = objective(candidate);
        if (!std::isfinite(cobj)) return;  // keep last finite iterate, converged = false
        if (cobj > obj) {
            ++halvings;
            lr_halved = true;
            if (halvings > cfg.max_halvings) {
                converged = true;  // no further progress possible at this resolution
                return;
            }
            lr *= 0.5;
            continue;
        }
        state = candidate;
        obj = cobj;
        ++epochs_run;

        const double val = val_mse(state);
        history.push_back(val);
        if (val < best_val) {
            best_val = val;
            best_state = state;
        }
        if (val < patience_anchor - cfg.tolerance) {
            patience_anchor = val;
            patience_count = 0;
        } else {
            ++patience_count;
        }
        if (patience_count >= cfg.patience) {
            converged = true;
            return;
        }
    }
}

}  // namespace

IrmModel fit_irm(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                 const std::vector<std::string>& env, const GdConfig& cfg,
                 const Eigen::MatrixXd* x_val, const Eigen::MatrixXd* y_val) {
    if (x.rows() != y.rows() || static_cast<size_t>(x.rows()) != env.size())
        throw std::invalid_argument("fit_irm: row/label count mismatch");

    Eigen::MatrixXd xt = x, yt = y, xv, yv;
    std::vector<std::string> env_t = env;
    if (x_val && y_val) {
        xv = *x_val;
        yv = *y_val;
    } else {
        auto [train_idx, val_idx] = holdout_split(x.rows(), cfg.val_fraction, cfg.seed);
        xt = take(x, train_idx);
        yt = take(y, train_idx);
        xv = take(x, val_idx);
        yv = take(y, val_idx);
        env_t.clear();
        for (auto i : train_idx) env_t.push_back(env[static_cast<size_t>(i)]);
    }

    IrmWork work{group_rows(xt, yt, env_t), cfg.lambda};

    struct State {
        Eigen::MatrixXd phi, w;
    };
    State state{Eigen::MatrixXd::Identity(x.cols(), x.cols()),
                Eigen::MatrixXd::Zero(x.cols(), y.cols())};
    State best = state;

    IrmModel model;
    descend(
        state, cfg, [&](const State& s) { return work.objective(s.phi, s.w); },
        [&](const State& s, double lr) {
            Eigen::MatrixXd gphi, gw;
            work.gradient(s.phi, s.w, gphi, gw);
            return State{s.phi - lr * gphi, s.w - lr * gw};
        },
        [&](const State& s) { return prediction_mse(xv * s.phi * s.w, yv); },
        model.converged, model.epochs_run, model.lr_halved, model.best_val_mse,
        model.val_history, best);
    model.phi = best.phi;
    model.w = best.w;
    return model;
}

CvpModel fit_cvp(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                 const std::vector<std::string>& env, const GdConfig& cfg, int bins,
                 const Eigen::MatrixXd* x_val, const Eigen::MatrixXd* y_val) {
    if (x.rows() != y.rows() || static_cast<size_t>(x.rows()) != env.size())
        throw std::invalid_argument("fit_cvp: row/label count mismatch");
    if (bins == 1 || bins < 0) throw std::invalid_argument("cvp bins must be 0 or >= 2");

    Eigen::MatrixXd xt = x, yt = y, xv, yv;
    std::vector<std::string> env_t = env;
    if (x_val && y_val) {
        xv = *x_val;
        yv = *y_val;
    } else {
        auto [train_idx, val_idx] = holdout_split(x.rows(), cfg.val_fraction, cfg.seed);
        xt = take(x, train_idx);
        yt = take(y, train_idx);
        xv = take(x, val_idx);
        yv = take(y, val_idx);
        env_t.clear();
        for (auto i : train_idx) env_t.push_back(env[static_cast<size_t>(i)]);
    }

    std::vector<std::string> keys = bins >= 2 ? binned_keys(yt, env_t, bins) : env_t;
    CvpWork work{xt, yt, group_rows(xt, yt, keys), cfg.lambda};

    Eigen::MatrixXd state = Eigen::MatrixXd::Zero(x.cols(), y.cols());
    Eigen::MatrixXd best = state;

    CvpModel model;
    descend(
        state, cfg, [&](const Eigen::MatrixXd& w) { return work.objective(w); },
        [&](const Eigen::MatrixXd& w, double lr) {
            return Eigen::MatrixXd(w - lr * work.gradient(w));
        },
        [&](const Eigen::MatrixXd& w) { return prediction_mse(xv * w, yv); },
        model.converged, model.epochs_run, model.lr_halved, model.best_val_mse,
        model.val_history, best);
    model.w = best;
    return model;
}

double gradient_check(GdModelKind kind, const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                      const std::vector<std::string>& env, double lambda,
                      const GdParams& at, double h, int bins) {
    if (h < 1e-7 || h > 1e-4)
        throw std::invalid_argument("finite-difference step h must lie in [1e-7, 1e-4]");

    std::vector<Eigen::MatrixXd> params;
    std::function<double(const std::vector<Eigen::MatrixXd>&)> objective;
    std::vector<Eigen::MatrixXd> analytic;

    if (kind == GdModelKind::Irm) {
        IrmWork work{group_rows(x, y, env), lambda};
        params = {at.phi, at.w};
        objective = [work](const std::vector<Eigen::MatrixXd>& p) {
            return work.objective(p[0], p[1]);
        };
        Eigen::MatrixXd gphi, gw;
        work.gradient(at.phi, at.w, gphi, gw);
        analytic = {gphi, gw};
    } else {
        std::vector<std::string> keys = bins >= 2 ? binned_keys(y, env, bins) : env;
        CvpWork work{x, y, group_rows(x, y, keys), lambda};
        params = {at.w};
        objective = [work](const std::vector<Eigen::MatrixXd>& p) {
            return work.objective(p[0]);
        };
        analytic = {work.gradient(at.w)};
    }

    double gmax = 0.0;
    for (const auto& g : analytic) gmax = std::max(gmax, g.cwiseAbs().maxCoeff());
    const double denom = std::max(gmax, 1e-12);

    double worst = 0.0;
    for (size_t pi = 0; pi < params.size(); ++pi) {
        for (Eigen::Index i = 0; i < params[pi].rows(); ++i) {
            for (Eigen::Index j = 0; j < params[pi].cols(); ++j) {
                auto plus = params;
                auto minus = params;
                plus[pi](i, j) += h;
                minus[pi](i, j) -= h;
                const double fd = (objective(plus) - objective(minus)) / (2.0 * h);
                worst = std::max(worst, std::abs(fd - analytic[pi](i, j)));
            }
        }
    }
    return worst / denom;
}

}  // namespace anchormva
