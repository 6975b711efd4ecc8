#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "anchormva/anchor.hpp"
#include "anchormva/data.hpp"
#include "anchormva/estimators.hpp"

namespace anchormva {

enum class NoiseFamily { Gaussian, Exponential, Gamma, Poisson };
NoiseFamily parse_noise(const std::string& name);
std::string noise_name(NoiseFamily f);

enum class Topology { IvGraph, ConfoundedGraph };

/// Linear SCM over (A, H, X, Y) with a one-dimensional anchor and hidden
/// variable:
///   A = eps_A,  H = c_ah A + eps_H,
///   X = c_ax A 1' + c_hx H 1' + eps_X,
///   Y = X w_true + c_ay A 1' + c_hy H 1' + eps_Y.
/// The IV graph uses c_ah = c_ay = 0; the confounded graph sets c_ah = 1.
struct ScmSpec {
    Topology topology = Topology::IvGraph;
    int d = 10;
    int p = 10;
    Eigen::MatrixXd w_true;  // d x p
    NoiseFamily noise = NoiseFamily::Gaussian;

    double coef_a_to_x = 1.0;
    double coef_a_to_y = 0.0;
    double coef_a_to_h = 0.0;
    double coef_h_to_x = 1.0;
    double coef_h_to_y = 1.0;

    /// Whether the intervention strength t sets the variance of the anchor
    /// noise (default) or its standard deviation.
    bool t_is_variance = true;

    static ScmSpec iv_graph(int d, int p, Eigen::MatrixXd w);
    static ScmSpec confounded(int d, int p, Eigen::MatrixXd w);

    /// Population second-moment matrix of stacked (X, Y) under unit noise
    /// variances and anchor noise variance t.
    Eigen::MatrixXd population_joint_moment(double t = 1.0) const;
    /// Population anchor-explained second moment (the part driven by A).
    Eigen::MatrixXd population_explained_moment() const;
};

struct InterventionSpec {
    double t = 1.0;
};

/// W = u * v with factor entries i.i.d. Uniform(lo, hi), each factor divided
/// by the sum of its entries. Numerical rank equals `rank`.
Eigen::MatrixXd make_lowrank_coefficients(int d, int p, int rank, uint64_t seed,
                                          double lo = 1.0, double hi = 2.0);

/// Draws n rows from the SCM. All noise vectors are mean-centered after
/// sampling; the anchor noise is rescaled by the intervention. Identical
/// (spec, n, t, seed) tuples produce bit-identical blocks.
DataBlock sample(const ScmSpec& spec, int n, const InterventionSpec& t, uint64_t seed);

struct SweepRecord {
    std::string estimator;
    std::string gamma;
    double t = 0.0;
    int replicate = 0;
    std::string metric;  // "mse" | "r2"
    double value = 0.0;
};

struct SweepResult {
    std::vector<SweepRecord> records;
    void write_csv(std::ostream& out) const;
};

struct SweepSummaryRow {
    std::string estimator;
    std::string gamma;
    double t = 0.0;
    std::string metric;
    double mean = 0.0;
    double sem = 0.0;  // standard error of the mean
    int count = 0;
};

std::vector<SweepSummaryRow> summarize(const SweepResult& sweep);
void write_summary_csv(const std::vector<SweepSummaryRow>& rows, std::ostream& out);

struct SweepEstimator {
    EstimatorSpec spec;
    GammaMode gamma;
    std::string label() const { return kind_name(spec.kind); }
};

/// For each replicate: fresh training draw at t = 1 (seed = base_seed + b),
/// one fit per estimator/gamma, evaluation on a fresh test draw per t (test
/// seeds derived from (base_seed, b, t index), so results do not depend on
/// scheduling). Fit failures are recorded as NaN cells rather than aborting.
SweepResult perturbation_sweep(const ScmSpec& spec,
                               const std::vector<SweepEstimator>& estimators,
                               const std::vector<double>& t_grid, int n, int replicates,
                               uint64_t base_seed, int threads = 1);

std::vector<double> linspace(double lo, double hi, int count);

}  // namespace anchormva
