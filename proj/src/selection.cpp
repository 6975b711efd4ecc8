#include "anchormva/selection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <set>
#include <stdexcept>

#include "anchormva/metrics.hpp"
#include "anchormva/parallel.hpp"
#include "anchormva/rng.hpp"

namespace anchormva {

std::vector<double> logspace(double lo, double hi, int count) {
    if (lo <= 0 || hi <= 0) throw std::invalid_argument("logspace needs positive bounds");
    if (count < 1) throw std::invalid_argument("logspace needs count >= 1");
    std::vector<double> out(static_cast<size_t>(count));
    if (count == 1) {
        out[0] = lo;
        return out;
    }
    const double llo = std::log10(lo), lhi = std::log10(hi);
    for (int i = 0; i < count; ++i)
        out[static_cast<size_t>(i)] = std::pow(10.0, llo + (lhi - llo) * i / (count - 1));
    return out;
}

std::vector<Split> kfold_splits(Eigen::Index n, int k, uint64_t seed) {
    if (k < 2 || static_cast<Eigen::Index>(k) > n)
        throw std::invalid_argument("kfold needs 2 <= k <= n");
    std::vector<Eigen::Index> idx(static_cast<size_t>(n));
    std::iota(idx.begin(), idx.end(), 0);
    auto rng = make_rng(seed);
    std::shuffle(idx.begin(), idx.end(), rng);

    std::vector<Split> splits(static_cast<size_t>(k));
    const Eigen::Index base = n / k;
    const Eigen::Index extra = n % k;
    Eigen::Index pos = 0;
    for (int f = 0; f < k; ++f) {
        const Eigen::Index size = base + (f < extra ? 1 : 0);
        auto& s = splits[static_cast<size_t>(f)];
        s.val.assign(idx.begin() + pos, idx.begin() + pos + size);
        pos += size;
    }
    for (int f = 0; f < k; ++f) {
        auto& s = splits[static_cast<size_t>(f)];
        std::set<Eigen::Index> in_val(s.val.begin(), s.val.end());
        for (Eigen::Index i = 0; i < n; ++i)
            if (!in_val.count(i)) s.train.push_back(i);
        std::sort(s.val.begin(), s.val.end());
    }
    return splits;
}

namespace {

void arrangements(const std::vector<int>& groups, int take, std::vector<int>& current,
                  std::vector<bool>& used, std::vector<std::vector<int>>& out) {
    if (static_cast<int>(current.size()) == take) {
        out.push_back(current);
        return;
    }
    for (size_t g = 0; g < groups.size(); ++g) {
        if (used[g]) continue;
        used[g] = true;
        current.push_back(groups[g]);
        arrangements(groups, take, current, used, out);
        current.pop_back();
        used[g] = false;
    }
}

}  // namespace

std::vector<Split> env_role_splits(const std::vector<std::string>& labels, int k_train,
                                   int k_val, int k_test, EnvSplitMode mode) {
    if (k_train < 1 || k_val < 1 || k_test < 0)
        throw std::invalid_argument("need k_train, k_val >= 1 and k_test >= 0");
    std::set<std::string> distinct(labels.begin(), labels.end());
    std::vector<std::string> groups(distinct.begin(), distinct.end());
    const int total = k_train + k_val + k_test;
    if (static_cast<int>(groups.size()) < total)
        throw std::invalid_argument("need at least " + std::to_string(total) +
                                    " distinct groups, got " + std::to_string(groups.size()));

    std::vector<int> ids(groups.size());
    std::iota(ids.begin(), ids.end(), 0);
    std::vector<std::vector<int>> arr;
    std::vector<int> current;
    std::vector<bool> used(groups.size(), false);
    arrangements(ids, total, current, used, arr);

    // rows per group, in sorted-label order
    std::vector<std::vector<Eigen::Index>> rows(groups.size());
    for (size_t i = 0; i < labels.size(); ++i) {
        auto it = std::lower_bound(groups.begin(), groups.end(), labels[i]);
        rows[static_cast<size_t>(it - groups.begin())].push_back(
            static_cast<Eigen::Index>(i));
    }

    std::vector<Split> splits;
    std::set<std::vector<int>> seen;
    for (const auto& a : arr) {
        std::vector<int> train_ids(a.begin(), a.begin() + k_train);
        std::vector<int> val_ids(a.begin() + k_train, a.begin() + k_train + k_val);
        std::vector<int> test_ids(a.begin() + k_train + k_val, a.end());
        if (mode == EnvSplitMode::Unique) {
            std::vector<int> key = train_ids;
            std::sort(key.begin(), key.end());
            std::vector<int> vkey = val_ids, tkey = test_ids;
            std::sort(vkey.begin(), vkey.end());
            std::sort(tkey.begin(), tkey.end());
            key.push_back(-1);
            key.insert(key.end(), vkey.begin(), vkey.end());
            key.push_back(-1);
            key.insert(key.end(), tkey.begin(), tkey.end());
            if (!seen.insert(key).second) continue;
        }
        Split s;
        for (int g : train_ids) s.train.insert(s.train.end(), rows[g].begin(), rows[g].end());
        for (int g : val_ids) s.val.insert(s.val.end(), rows[g].begin(), rows[g].end());
        for (int g : test_ids) s.test.insert(s.test.end(), rows[g].begin(), rows[g].end());
        std::sort(s.train.begin(), s.train.end());
        std::sort(s.val.begin(), s.val.end());
        std::sort(s.test.begin(), s.test.end());
        splits.push_back(std::move(s));
    }
    return splits;
}

namespace {

GammaMode gamma_from_value(double g) {
    if (std::isinf(g)) return GammaMode::iv_limit();
    return g == 0.0 ? GammaMode::partial_out() : GammaMode::gamma(g);
}

struct CellScore {
    double mse = 0.0, r2 = 0.0, abscorr = 0.0;
    bool ok = false;
};

}  // namespace

std::vector<GridRow> grid_search(const DataBlock& block, EstimatorKind kind, const Grid& grid,
                                 const std::vector<Split>& splits, StandardizeMode mode,
                                 int threads) {
    if (grid.gammas.empty() || grid.alphas.empty() || grid.ranks.empty() || splits.empty())
        throw std::invalid_argument("grid_search needs a non-empty grid and splits");
    EstimatorSpec probe{kind};

    struct Point {
        double gamma, alpha;
        int rank;
    };
    std::vector<Point> points;
    for (double g : grid.gammas)
        for (double a : (probe.uses_alpha() ? grid.alphas : std::vector<double>{0.0}))
            for (int r : (probe.uses_rank() ? grid.ranks : std::vector<int>{0}))
                points.push_back({g, a, r});

    const size_t cells = points.size() * splits.size();
    std::vector<CellScore> scores(cells);

    parallel_for(splits.size(), threads, [&](size_t si) {
        const Split& split = splits[si];
        DataBlock train_raw = block.take_rows(split.train);
        DataBlock train;
        StandardizationState state;
        std::tie(train, state) = standardize(train_raw, mode);
        DataBlock val_raw = block.take_rows(split.val);

        for (size_t pi = 0; pi < points.size(); ++pi) {
            const auto& pt = points[pi];
            CellScore cell;
            try {
                EstimatorSpec spec{kind, pt.rank, pt.alpha};
                FittedModel model = fit_anchor(spec, train, gamma_from_value(pt.gamma));
                model.standardization = state;
                Eigen::MatrixXd yhat = predict(model, val_raw.x);
                cell.mse = mse(val_raw.y, yhat);
                try {
                    cell.r2 = r2(val_raw.y, yhat).value;
                } catch (const std::exception&) {
                    cell.r2 = std::numeric_limits<double>::quiet_NaN();
                }
                Eigen::MatrixXd val_a = state.transform_a(val_raw.a);
                cell.abscorr = anchor_residual_corr(val_raw.y, yhat, val_a).mean_abs;
                cell.ok = true;
            } catch (const std::exception&) {
                cell.ok = false;
            }
            scores[pi * splits.size() + si] = cell;
        }
    });

    std::vector<GridRow> table;
    table.reserve(points.size());
    for (size_t pi = 0; pi < points.size(); ++pi) {
        GridRow row;
        row.gamma = points[pi].gamma;
        row.alpha = points[pi].alpha;
        row.rank = points[pi].rank;
        double sm = 0, sr = 0, sc = 0;
        int ok = 0;
        for (size_t si = 0; si < splits.size(); ++si) {
            const auto& cell = scores[pi * splits.size() + si];
            if (!cell.ok) continue;
            sm += cell.mse;
            sr += cell.r2;
            sc += cell.abscorr;
            ++ok;
        }
        row.splits_ok = ok;
        if (ok > 0) {
            row.val_mse = sm / ok;
            row.val_r2 = sr / ok;
            row.val_abscorr = sc / ok;
        } else {
            row.val_mse = row.val_r2 = row.val_abscorr =
                std::numeric_limits<double>::quiet_NaN();
        }
        table.push_back(row);
    }
    return table;
}

Selection pareto_select(const std::vector<GridRow>& table, const TradeoffWeights& weights) {
    if (table.empty()) throw std::invalid_argument("pareto_select: empty table");
    if (std::abs(weights.w_error + weights.w_corr - 1.0) > 1e-12)
        throw std::invalid_argument("tradeoff weights must sum to 1");
    if (weights.w_error < 0 || weights.w_corr < 0)
        throw std::invalid_argument("tradeoff weights must be nonnegative");

    double eta_err = weights.eta_error;
    double eta_corr = weights.eta_corr;
    if (eta_err <= 0) {
        eta_err = 0;
        for (const auto& r : table)
            if (r.splits_ok > 0) eta_err = std::max(eta_err, r.val_mse);
    }
    if (eta_corr <= 0) {
        eta_corr = 0;
        for (const auto& r : table)
            if (r.splits_ok > 0) eta_corr = std::max(eta_corr, r.val_abscorr);
    }
    if (eta_err <= 0) eta_err = 1.0;
    if (eta_corr <= 0) eta_corr = 1.0;

    Selection sel;
    sel.scores.assign(table.size(), std::numeric_limits<double>::quiet_NaN());
    double best = std::numeric_limits<double>::infinity();
    long best_i = -1;
    for (size_t i = 0; i < table.size(); ++i) {
        const auto& r = table[i];
        if (r.splits_ok == 0) continue;
        const double score =
            weights.w_error * r.val_mse / eta_err + weights.w_corr * r.val_abscorr / eta_corr;
        sel.scores[i] = score;
        const bool better =
            score < best || (score == best && best_i >= 0 &&
                             r.gamma > table[static_cast<size_t>(best_i)].gamma);
        if (best_i < 0 || better) {
            best = score;
            best_i = static_cast<long>(i);
        }
    }
    if (best_i < 0) throw std::runtime_error("pareto_select: every cell is missing");
    sel.chosen = table[static_cast<size_t>(best_i)];
    sel.score = best;
    return sel;
}

}  // namespace anchormva
