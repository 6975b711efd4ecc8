#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "anchormva/data.hpp"
#include "anchormva/estimators.hpp"

namespace anchormva {

/// Hyperparameter candidates. Gammas may include 0 (partialling-out) and
/// +infinity (IV limit) alongside finite values.
struct Grid {
    std::vector<double> gammas{1.0};
    std::vector<double> alphas{0.0};
    std::vector<int> ranks{1};
};

std::vector<double> logspace(double lo, double hi, int count);

struct TradeoffWeights {
    double w_error = 0.5;
    double w_corr = 0.5;
    /// Rescalers for the two objectives; <= 0 means "use the column max of
    /// the candidate table".
    double eta_error = 0.0;
    double eta_corr = 0.0;
};

struct Split {
    std::vector<Eigen::Index> train;
    std::vector<Eigen::Index> val;
    std::vector<Eigen::Index> test;  // empty for k-fold splits
};

/// Random partition of 0..n-1 into k folds with sizes differing by <= 1.
std::vector<Split> kfold_splits(Eigen::Index n, int k, uint64_t seed);

enum class EnvSplitMode { Ordered, Unique };

/// Group-level role assignments: pick k_train groups for training, k_val for
/// validation, k_test for testing. Ordered mode enumerates every ordered
/// arrangement (4 groups with (2,1,1) gives 24 assignments); Unique mode
/// deduplicates assignments with equal index-set triples (12 for that case).
/// k_test = 0 gives plain leave-groups-out cross-validation splits.
std::vector<Split> env_role_splits(const std::vector<std::string>& labels, int k_train,
                                   int k_val, int k_test,
                                   EnvSplitMode mode = EnvSplitMode::Ordered);

struct GridRow {
    double gamma = 1.0;  // +inf encodes the IV limit
    double alpha = 0.0;
    int rank = 1;
    double val_mse = 0.0;
    double val_r2 = 0.0;
    double val_abscorr = 0.0;
    int splits_ok = 0;  // fit failures drop the cell from the average
};

/// Fits every grid point on each split's training rows (standardization and
/// anchor centering refitted per fold) and averages validation scores.
/// Test rows are never touched.
std::vector<GridRow> grid_search(const DataBlock& block, EstimatorKind kind,
                                 const Grid& grid, const std::vector<Split>& splits,
                                 StandardizeMode mode = StandardizeMode::Center,
                                 int threads = 1);

struct Selection {
    GridRow chosen;
    double score = 0.0;
    std::vector<double> scores;  // aligned with the input table
};

/// argmin of w_error * mse / eta_error + w_corr * |corr| / eta_corr over the
/// table. Ties break toward larger gamma. Rows with no successful split are
/// skipped; throws when every row is missing.
Selection pareto_select(const std::vector<GridRow>& table, const TradeoffWeights& weights);

}  // namespace anchormva
