#include "anchormva/commands.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <limits>
#include <random>
#include <set>
#include <sstream>

#include "anchormva/anchor.hpp"
#include "anchormva/baselines.hpp"
#include "anchormva/csv.hpp"
#include "anchormva/estimators.hpp"
#include "anchormva/metrics.hpp"
#include "anchormva/model_io.hpp"
#include "anchormva/parallel.hpp"
#include "anchormva/rng.hpp"
#include "anchormva/scm.hpp"
#include "anchormva/selection.hpp"

namespace anchormva {

namespace {

constexpr uint64_t kDefaultSeed = 20240901;

uint64_t resolve_seed(const Config& cfg, const std::string& section,
                      const std::optional<uint64_t>& cli_seed) {
    if (cli_seed) {
        cfg.get_long(section, "seed", 0);  // mark consumed if present
        return *cli_seed;
    }
    if (cfg.has(section, "seed"))
        return static_cast<uint64_t>(cfg.get_long(section, "seed", 0));
    if (const char* env = std::getenv("ANCHOR_MVA_SEED")) {
        char* end = nullptr;
        const unsigned long long v = std::strtoull(env, &end, 10);
        if (end != env && *end == '\0') return v;
        throw ConfigError("ANCHOR_MVA_SEED is not an integer");
    }
    return kDefaultSeed;
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write output file: " + path);
    return out;
}

ScmSpec read_scm_spec(const Config& cfg, uint64_t seed) {
    const std::string topo = cfg.get_string("scm", "topology", "iv");
    const int d = cfg.get_int("scm", "d", 10);
    const int p = cfg.get_int("scm", "p", 10);
    const int rank = cfg.get_int("scm", "rank", std::min(5, std::min(d, p)));
    const double lo = cfg.get_double("scm", "w_lo", 1.0);
    const double hi = cfg.get_double("scm", "w_hi", 2.0);
    const auto w_seed =
        static_cast<uint64_t>(cfg.get_long("scm", "w_seed",
                                           static_cast<long>(derive_seed(seed, 7771))));
    Eigen::MatrixXd w = make_lowrank_coefficients(d, p, rank, w_seed, lo, hi);

    ScmSpec spec;
    if (topo == "iv") {
        spec = ScmSpec::iv_graph(d, p, std::move(w));
    } else if (topo == "confounded") {
        spec = ScmSpec::confounded(d, p, std::move(w));
    } else {
        throw ConfigError("scm.topology must be iv or confounded, got '" + topo + "'");
    }
    spec.noise = parse_noise(cfg.get_string("scm", "noise", "gaussian"));
    spec.coef_a_to_x = cfg.get_double("scm", "coef_a_to_x", spec.coef_a_to_x);
    spec.coef_a_to_y = cfg.get_double("scm", "coef_a_to_y", spec.coef_a_to_y);
    spec.coef_a_to_h = cfg.get_double("scm", "coef_a_to_h", spec.coef_a_to_h);
    spec.coef_h_to_x = cfg.get_double("scm", "coef_h_to_x", spec.coef_h_to_x);
    spec.coef_h_to_y = cfg.get_double("scm", "coef_h_to_y", spec.coef_h_to_y);
    spec.t_is_variance = cfg.get_bool("scm", "t_is_variance", true);
    return spec;
}

std::map<std::string, ColumnRole> read_roles(const CommandOptions& opt) {
    std::map<std::string, ColumnRole> roles;
    for (const auto& [col, role] : opt.config.section("roles"))
        roles[col] = parse_role(role);
    for (const auto& [col, role] : opt.roles) roles[col] = role;  // flags win
    return roles;
}

DataBlock load_block(const CommandOptions& opt, bool required) {
    const std::string path = opt.config.get_string("data", "path", "");
    if (path.empty()) {
        if (required) throw ConfigError("data.path is required");
        return {};
    }
    CsvOptions copts;
    const std::string delim = opt.config.get_string("data", "delimiter", ",");
    if (delim.size() != 1) throw ConfigError("data.delimiter must be a single character");
    copts.delimiter = delim[0];
    if (opt.config.has("data", "missing_sentinel"))
        copts.missing_sentinel = opt.config.get_double("data", "missing_sentinel", 0.0);
    auto roles = read_roles(opt);
    if (roles.empty()) throw ConfigError("no column roles given (use [roles] or --role)");
    DataBlock block = load_csv(path, roles, copts);
    if (block.dropped_rows > 0)
        std::cerr << "dropped " << block.dropped_rows << " rows with missing values\n";
    return block;
}

StandardizeMode read_mode(const Config& cfg, const std::string& fallback) {
    const std::string mode = cfg.get_string("data", "standardize", fallback);
    if (mode == "center") return StandardizeMode::Center;
    if (mode == "center_scale") return StandardizeMode::CenterScale;
    throw ConfigError("data.standardize must be center or center_scale");
}

std::vector<double> read_log_grid(const Config& cfg, const std::string& section,
                                  const std::string& name, double lo, double hi, int steps) {
    if (cfg.has(section, name + "s"))
        return cfg.get_double_list(section, name + "s", {});
    return logspace(cfg.get_double(section, name + "_min", lo),
                    cfg.get_double(section, name + "_max", hi),
                    cfg.get_int(section, name + "_steps", steps));
}

}  // namespace

// ---- sweep ---------------------------------------------------------------

int run_sweep(CommandOptions& opt) {
    const Config& cfg = opt.config;
    const uint64_t seed = resolve_seed(cfg, "sweep", opt.seed);
    ScmSpec spec = read_scm_spec(cfg, seed);

    const int n = cfg.get_int("sweep", "n", 300);
    const int replicates = cfg.get_int("sweep", "replicates", 20);
    const double t_min = cfg.get_double("sweep", "t_min", 0.0);
    const double t_max = cfg.get_double("sweep", "t_max", 4.0);
    const int t_steps = cfg.get_int("sweep", "t_steps", 20);
    const double alpha = cfg.get_double("sweep", "alpha", 1.0);
    const int oracle_rank = cfg.get_int("scm", "rank", std::min(5, std::min(spec.d, spec.p)));
    auto kinds = cfg.get_list("sweep", "estimators", {"mlr", "rrr", "opls", "pls", "cca"});
    auto gammas = cfg.get_list("sweep", "gammas", {"0", "1", "5", "inf"});
    auto metrics = cfg.get_list("sweep", "metrics", {"mse", "r2"});
    const std::string out_path = cfg.get_string("sweep", "out", "sweep.csv");
    const std::string summary_path = cfg.get_string("sweep", "summary", "sweep_summary.csv");

    std::vector<double> t_grid;
    if (cfg.has("sweep", "t_grid")) {
        t_grid = cfg.get_double_list("sweep", "t_grid", {});
    } else {
        t_grid = linspace(t_min, t_max, t_steps);
    }
    cfg.ensure_all_consumed();

    std::vector<SweepEstimator> estimators;
    for (const auto& kname : kinds) {
        EstimatorSpec espec;
        espec.kind = parse_kind(kname);
        espec.rank = oracle_rank;
        espec.alpha = alpha;
        for (const auto& g : gammas)
            estimators.push_back({espec, GammaMode::parse(g)});
    }

    SweepResult result =
        perturbation_sweep(spec, estimators, t_grid, n, replicates, seed, opt.threads);
    if (metrics != std::vector<std::string>{"mse", "r2"}) {
        std::set<std::string> keep(metrics.begin(), metrics.end());
        std::erase_if(result.records,
                      [&](const SweepRecord& r) { return !keep.count(r.metric); });
    }

    auto out = open_output(out_path);
    result.write_csv(out);
    auto sout = open_output(summary_path);
    write_summary_csv(summarize(result), sout);
    std::cout << "wrote " << out_path << " and " << summary_path << " ("
              << result.records.size() << " records)\n";
    return 0;
}

// ---- benchmark-env ---------------------------------------------------------

namespace {

/// Synthetic four-group fallback used when no dataset is supplied: group
/// membership shifts both predictors and targets, so anchor and invariance
/// methods have signal to exploit.
DataBlock synthetic_env_block(int per_group, uint64_t seed) {
    const int d = 3, p = 8, groups = 4;
    const double shifts[4] = {-1.5, -0.5, 0.5, 1.5};
    auto rng = make_rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(d, p);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < p; ++j) w(i, j) = 0.4 * gauss(rng);

    const int n = per_group * groups;
    DataBlock block;
    block.x.resize(n, d);
    block.y.resize(n, p);
    block.a = Eigen::MatrixXd::Zero(n, 1);
    block.env.resize(static_cast<size_t>(n));
    int row = 0;
    for (int g = 0; g < groups; ++g) {
        for (int i = 0; i < per_group; ++i, ++row) {
            const double h = gauss(rng);
            for (int j = 0; j < d; ++j)
                block.x(row, j) = shifts[g] + h + gauss(rng);
            block.y.row(row) = block.x.row(row) * w;
            for (int j = 0; j < p; ++j)
                block.y(row, j) += 0.5 * shifts[g] + h + gauss(rng);
            block.env[static_cast<size_t>(row)] = "g" + std::to_string(g);
        }
    }
    block.has_anchor = false;
    for (int j = 0; j < d; ++j) block.x_names.push_back("x" + std::to_string(j));
    for (int j = 0; j < p; ++j) block.y_names.push_back("y" + std::to_string(j));
    return block;
}

struct BenchmarkCell {
    double test_mse = std::numeric_limits<double>::quiet_NaN();
    double gamma = 1.0;
    double alpha = 0.0;
    int rank = 0;
    double lambda = 0.0;
};

const std::vector<std::string> kBenchmarkModels = {"lr",     "ridge", "ar", "a-ridge",
                                                   "a-pls",  "irm",   "cvp"};

}  // namespace

int run_benchmark_env(CommandOptions& opt) {
    const Config& cfg = opt.config;
    const uint64_t seed = resolve_seed(cfg, "benchmark", opt.seed);

    DataBlock block = load_block(opt, /*required=*/false);
    bool synthetic = false;
    if (block.n() == 0) {
        synthetic = true;
        const int per_group = cfg.get_int("benchmark", "synth_per_group", 60);
        block = synthetic_env_block(per_group, derive_seed(seed, 4242));
        std::cerr << "no data.path given: running the synthetic 4-group smoke protocol\n";
    }
    if (!block.has_env()) throw ConfigError("benchmark-env needs an environment column");

    auto models = cfg.get_list("benchmark", "models",
                               synthetic ? std::vector<std::string>{"lr", "ridge", "ar", "a-pls"}
                                         : kBenchmarkModels);
    for (auto& m : models) {
        std::transform(m.begin(), m.end(), m.begin(),
                       [](unsigned char c) { return std::tolower(c); });
        if (std::find(kBenchmarkModels.begin(), kBenchmarkModels.end(), m) ==
            kBenchmarkModels.end()) {
            std::string valid;
            for (const auto& v : kBenchmarkModels) valid += (valid.empty() ? "" : ", ") + v;
            throw ConfigError("unknown benchmark model '" + m + "' (valid: " + valid + ")");
        }
    }
    if (std::find(models.begin(), models.end(), "lr") == models.end())
        models.insert(models.begin(), "lr");  // the table is relative to LR

    const std::string mode_name = cfg.get_string("benchmark", "mode", "ordered");
    EnvSplitMode split_mode;
    if (mode_name == "ordered") split_mode = EnvSplitMode::Ordered;
    else if (mode_name == "unique") split_mode = EnvSplitMode::Unique;
    else throw ConfigError("benchmark.mode must be ordered or unique");

    const int k_train = cfg.get_int("benchmark", "k_train", 2);
    const int k_val = cfg.get_int("benchmark", "k_val", 1);
    const int k_test = cfg.get_int("benchmark", "k_test", 1);

    auto gamma_grid = read_log_grid(cfg, "benchmark", "gamma", 1e-2, 1e3, 20);
    auto alpha_grid = read_log_grid(cfg, "benchmark", "alpha", 1e-4, 1e4, 20);
    auto lambda_grid = read_log_grid(cfg, "benchmark", "lambda", 1e-3, 1.0,
                                     synthetic ? 4 : 20);
    if (cfg.has("gd", "lambda"))  // --lambda pins the penalty instead of tuning it
        lambda_grid = {cfg.get_double("gd", "lambda", 0.0)};
    const int pls_max = cfg.get_int("benchmark", "pls_max_comp", 3);
    const int cvp_bins = cfg.get_int("benchmark", "cvp_bins", 0);

    GdConfig gd;
    gd.learning_rate = cfg.get_double("gd", "lr", 0.1);
    gd.max_epochs = cfg.get_int("gd", "max_epochs", synthetic ? 2000 : 50000);
    gd.patience = cfg.get_int("gd", "patience", 200);
    gd.tolerance = cfg.get_double("gd", "tol", 1e-4);
    gd.seed = seed;

    const StandardizeMode std_mode = read_mode(cfg, "center_scale");
    const std::string out_path = cfg.get_string("benchmark", "out", "benchmark.csv");
    const std::string summary_path =
        cfg.get_string("benchmark", "summary", "benchmark_summary.csv");
    cfg.ensure_all_consumed();

    auto splits = env_role_splits(block.env, k_train, k_val, k_test, split_mode);

    std::vector<std::vector<BenchmarkCell>> cells(
        splits.size(), std::vector<BenchmarkCell>(models.size()));
    std::vector<std::array<std::string, 3>> split_names(splits.size());

    parallel_for(splits.size(), opt.threads, [&](size_t si) {
        const Split& split = splits[si];
        DataBlock train_raw = block.take_rows(split.train);
        DataBlock val_raw = block.take_rows(split.val);
        DataBlock test_raw = block.take_rows(split.test);

        {
            std::set<std::string> tg(train_raw.env.begin(), train_raw.env.end());
            std::string names;
            for (const auto& g : tg) names += (names.empty() ? "" : "+") + g;
            split_names[si] = {names, val_raw.env.empty() ? "" : val_raw.env.front(),
                               test_raw.env.empty() ? "" : test_raw.env.front()};
        }

        train_raw = encode_environment_anchor(train_raw);
        auto [train, state] = standardize(train_raw, std_mode);

        auto val_mse_of = [&](const FittedModel& m) {
            return mse(val_raw.y, predict(m, val_raw.x));
        };
        auto test_mse_of = [&](const FittedModel& m) {
            return mse(test_raw.y, predict(m, test_raw.x));
        };
        auto finish = [&](FittedModel m) {
            m.standardization = state;
            return m;
        };

        for (size_t mi = 0; mi < models.size(); ++mi) {
            const std::string& name = models[mi];
            BenchmarkCell cell;
            try {
                if (name == "lr") {
                    FittedModel m = finish(fit_anchor({EstimatorKind::Mlr}, train,
                                                      GammaMode::gamma(1.0)));
                    cell.test_mse = test_mse_of(m);
                } else if (name == "ridge" || name == "ar" || name == "a-ridge" ||
                           name == "a-pls") {
                    double best_val = std::numeric_limits<double>::infinity();
                    std::vector<double> gammas =
                        (name == "ridge") ? std::vector<double>{1.0} : gamma_grid;
                    std::vector<double> alphas =
                        (name == "ridge" || name == "a-ridge") ? alpha_grid
                                                               : std::vector<double>{0.0};
                    std::vector<int> ranks;
                    if (name == "a-pls") {
                        const int top = std::min<int>(
                            pls_max, static_cast<int>(std::min(train.d(), train.p())));
                        for (int r = 1; r <= top; ++r) ranks.push_back(r);
                    } else {
                        ranks.push_back(0);
                    }
                    EstimatorKind kind = EstimatorKind::Mlr;
                    if (name == "ridge" || name == "a-ridge") kind = EstimatorKind::Ridge;
                    if (name == "a-pls") kind = EstimatorKind::Pls;
                    for (double g : gammas) {
                        for (double a : alphas) {
                            for (int r : ranks) {
                                FittedModel m = finish(fit_anchor(
                                    {kind, r, a}, train,
                                    g == 0 ? GammaMode::partial_out() : GammaMode::gamma(g)));
                                const double v = val_mse_of(m);
                                if (v < best_val) {
                                    best_val = v;
                                    cell.test_mse = test_mse_of(m);
                                    cell.gamma = g;
                                    cell.alpha = a;
                                    cell.rank = r;
                                }
                            }
                        }
                    }
                } else {  // irm | cvp
                    Eigen::MatrixXd xv = state.transform_x(val_raw.x);
                    Eigen::MatrixXd yv = state.transform_y(val_raw.y);
                    double best_val = std::numeric_limits<double>::infinity();
                    for (double lambda : lambda_grid) {
                        GdConfig local = gd;
                        local.lambda = lambda;
                        FittedModel m;
                        m.kind = EstimatorKind::Mlr;
                        if (name == "irm") {
                            IrmModel irm = fit_irm(train.x, train.y, train.env, local, &xv, &yv);
                            m.w = irm.coefficients();
                        } else {
                            CvpModel cvp =
                                fit_cvp(train.x, train.y, train.env, local, cvp_bins, &xv, &yv);
                            m.w = cvp.w;
                        }
                        m.standardization = state;
                        const double v = val_mse_of(m);
                        if (v < best_val) {
                            best_val = v;
                            cell.test_mse = test_mse_of(m);
                            cell.lambda = lambda;
                        }
                    }
                }
            } catch (const std::exception& e) {
                std::cerr << "split " << si << " model " << name << " failed: " << e.what()
                          << "\n";
            }
            cells[si][mi] = cell;
        }
    });

    // per-split table
    auto out = open_output(out_path);
    out << "split,train_groups,val_group,test_group,model,test_mse,gamma,alpha,rank,lambda\n";
    for (size_t si = 0; si < splits.size(); ++si) {
        for (size_t mi = 0; mi < models.size(); ++mi) {
            const auto& c = cells[si][mi];
            out << si << ',' << split_names[si][0] << ',' << split_names[si][1] << ','
                << split_names[si][2] << ',' << models[mi] << ',' << format_double(c.test_mse)
                << ',' << format_double(c.gamma) << ',' << format_double(c.alpha) << ','
                << c.rank << ',' << format_double(c.lambda) << '\n';
        }
    }

    // aggregate table, mirroring the mean/median/max/min comparison
    const size_t lr_index =
        static_cast<size_t>(std::find(models.begin(), models.end(), "lr") - models.begin());
    auto sout = open_output(summary_path);
    sout << "model,mean_mse,median_mse,max_mse,min_mse,better_than_lr\n";
    for (size_t mi = 0; mi < models.size(); ++mi) {
        std::vector<double> v;
        int better = 0;
        for (size_t si = 0; si < splits.size(); ++si) {
            const double m = cells[si][mi].test_mse;
            if (!std::isfinite(m)) continue;
            v.push_back(m);
            if (mi != lr_index && m < cells[si][lr_index].test_mse) ++better;
        }
        if (v.empty()) {
            sout << models[mi] << ",nan,nan,nan,nan,0\n";
            continue;
        }
        std::sort(v.begin(), v.end());
        double mean = 0;
        for (double x : v) mean += x;
        mean /= static_cast<double>(v.size());
        const double median = v.size() % 2 == 1
                                  ? v[v.size() / 2]
                                  : 0.5 * (v[v.size() / 2 - 1] + v[v.size() / 2]);
        sout << models[mi] << ',' << format_double(mean) << ',' << format_double(median) << ','
             << format_double(v.back()) << ',' << format_double(v.front()) << ','
             << (mi == lr_index ? 0 : better) << '\n';
    }
    std::cout << "wrote " << out_path << " and " << summary_path << " (" << splits.size()
              << " splits x " << models.size() << " models)\n";
    return 0;
}

// ---- select ----------------------------------------------------------------

int run_select(CommandOptions& opt) {
    const Config& cfg = opt.config;
    const uint64_t seed = resolve_seed(cfg, "select", opt.seed);

    EstimatorKind kind = parse_kind(cfg.get_string("select", "estimator", "rrrr"));

    Grid grid;
    grid.gammas = read_log_grid(cfg, "select", "gamma", 1.0, 1e4, 10);
    grid.alphas = read_log_grid(cfg, "select", "alpha", 1.0, 1e5, 20);
    if (cfg.has("select", "ranks")) {
        grid.ranks = cfg.get_int_list("select", "ranks", {});
    } else {
        const int rank_min = cfg.get_int("select", "rank_min", 10);
        const int rank_max = cfg.get_int("select", "rank_max", 30);
        const int rank_steps = cfg.get_int("select", "rank_steps", 10);
        for (double r : linspace(rank_min, rank_max, rank_steps))
            grid.ranks.push_back(static_cast<int>(std::lround(r)));
        grid.ranks.erase(std::unique(grid.ranks.begin(), grid.ranks.end()), grid.ranks.end());
    }

    TradeoffWeights weights;
    weights.w_error = cfg.get_double("select", "w_error", 0.5);
    weights.w_corr = cfg.get_double("select", "w_corr", 0.5);
    weights.eta_error = cfg.get_double("select", "eta_error", 0.0);
    weights.eta_corr = cfg.get_double("select", "eta_corr", 0.0);

    const std::string out_path = cfg.get_string("select", "out", "selection.csv");
    const std::string chosen_path = cfg.get_string("select", "chosen", "chosen.json");

    DataBlock block;
    std::vector<Split> splits;
    if (cfg.has("data", "path")) {
        block = load_block(opt, true);
        if (!block.has_anchor && block.has_env()) block = encode_environment_anchor(block);
        const int k = cfg.get_int("select", "kfold", 5);
        splits = kfold_splits(block.n(), k, derive_seed(seed, 11));
    } else {
        ScmSpec spec = read_scm_spec(cfg, seed);
        const int n_train = cfg.get_int("select", "n_train", 100);
        const int n_val = cfg.get_int("select", "n_val", 100);
        DataBlock train = sample(spec, n_train, InterventionSpec{1.0}, derive_seed(seed, 1));
        DataBlock val = sample(spec, n_val, InterventionSpec{1.0}, derive_seed(seed, 2));
        block.x.resize(n_train + n_val, train.x.cols());
        block.x << train.x, val.x;
        block.y.resize(n_train + n_val, train.y.cols());
        block.y << train.y, val.y;
        block.a.resize(n_train + n_val, train.a.cols());
        block.a << train.a, val.a;
        Split s;
        for (int i = 0; i < n_train; ++i) s.train.push_back(i);
        for (int i = 0; i < n_val; ++i) s.val.push_back(n_train + i);
        splits.push_back(std::move(s));
    }
    const StandardizeMode std_mode = read_mode(cfg, "center");
    cfg.ensure_all_consumed();

    // drop rank candidates beyond min(d, p)
    const int max_rank = static_cast<int>(std::min(block.d(), block.p()));
    grid.ranks.erase(std::remove_if(grid.ranks.begin(), grid.ranks.end(),
                                    [&](int r) { return r < 1 || r > max_rank; }),
                     grid.ranks.end());
    if (grid.ranks.empty()) grid.ranks.push_back(max_rank);

    auto table = grid_search(block, kind, grid, splits, std_mode, opt.threads);
    Selection sel = pareto_select(table, weights);

    auto out = open_output(out_path);
    out << "gamma,alpha,rank,val_mse,val_r2,val_abscorr,score\n";
    for (size_t i = 0; i < table.size(); ++i) {
        const auto& r = table[i];
        out << (std::isinf(r.gamma) ? "inf" : format_double(r.gamma)) << ','
            << format_double(r.alpha) << ',' << r.rank << ',' << format_double(r.val_mse)
            << ',' << format_double(r.val_r2) << ',' << format_double(r.val_abscorr) << ','
            << format_double(sel.scores[i]) << '\n';
    }

    nlohmann::json chosen;
    chosen["gamma"] = std::isinf(sel.chosen.gamma) ? nlohmann::json("inf")
                                                   : nlohmann::json(sel.chosen.gamma);
    chosen["alpha"] = sel.chosen.alpha;
    chosen["rank"] = sel.chosen.rank;
    chosen["val_mse"] = sel.chosen.val_mse;
    chosen["val_r2"] = sel.chosen.val_r2;
    chosen["val_abscorr"] = sel.chosen.val_abscorr;
    chosen["score"] = sel.score;
    auto cout_file = open_output(chosen_path);
    cout_file << chosen.dump(2) << '\n';

    std::cout << "wrote " << out_path << " (" << table.size() << " rows) and " << chosen_path
              << "\n";
    return 0;
}

// ---- fit / predict ---------------------------------------------------------

int run_fit(CommandOptions& opt) {
    const Config& cfg = opt.config;
    DataBlock block = load_block(opt, true);

    EstimatorSpec spec;
    spec.kind = parse_kind(cfg.get_string("fit", "estimator", "mlr"));
    spec.rank = cfg.get_int("fit", "rank", 1);
    spec.alpha = cfg.get_double("fit", "alpha", 0.0);
    GammaMode gamma = GammaMode::parse(cfg.get_string("fit", "gamma", "1"));
    const std::string model_path = cfg.get_string("fit", "model_out", "model.json");
    const StandardizeMode std_mode = read_mode(cfg, "center");
    cfg.ensure_all_consumed();

    if (!block.has_anchor) {
        if (block.has_env()) {
            block = encode_environment_anchor(block);
        } else if (!gamma.is_identity()) {
            throw ConfigError("gamma != 1 needs anchor (or environment) columns");
        }
    }

    FittedModel model = fit_pipeline(spec, block, gamma, std_mode);
    save_model(model, model_path, block.x_names, block.y_names);
    std::cout << "wrote " << model_path << "\n";
    return 0;
}

int run_predict(CommandOptions& opt) {
    const Config& cfg = opt.config;
    const std::string model_path = cfg.get_string("predict", "model", "model.json");
    const std::string data_path = cfg.get_string("data", "path", "");
    const std::string out_path = cfg.get_string("predict", "out", "predictions.csv");
    const std::string delim = cfg.get_string("data", "delimiter", ",");
    if (delim.size() != 1) throw ConfigError("data.delimiter must be a single character");
    if (data_path.empty()) throw ConfigError("data.path is required");
    cfg.ensure_all_consumed();

    LoadedModel loaded = load_model(model_path);
    const Eigen::Index d = loaded.model.w.rows();

    CsvTable table = read_csv(data_path, delim[0]);
    std::vector<int> cols;
    if (!loaded.predictors.empty()) {
        for (const auto& name : loaded.predictors) {
            auto it = std::find(table.header.begin(), table.header.end(), name);
            if (it == table.header.end())
                throw ConfigError("input file lacks predictor column '" + name + "'");
            cols.push_back(static_cast<int>(it - table.header.begin()));
        }
    } else {
        if (static_cast<Eigen::Index>(table.header.size()) != d)
            throw ConfigError("model expects " + std::to_string(d) + " predictor columns, file has " +
                              std::to_string(table.header.size()));
        for (Eigen::Index c = 0; c < d; ++c) cols.push_back(static_cast<int>(c));
    }
    if (static_cast<Eigen::Index>(cols.size()) != d)
        throw ConfigError("predictor column count mismatch");

    std::vector<std::vector<double>> rows;
    for (const auto& row : table.rows) {
        std::vector<double> vals;
        bool bad = false;
        for (int c : cols) {
            char* end = nullptr;
            const std::string& cell = row[static_cast<size_t>(c)];
            double v = std::strtod(cell.c_str(), &end);
            if (end == cell.c_str() || *end != '\0' || !std::isfinite(v)) {
                bad = true;
                break;
            }
            vals.push_back(v);
        }
        if (!bad) rows.push_back(std::move(vals));
    }
    if (rows.empty()) throw std::runtime_error("no usable rows in " + data_path);

    Eigen::MatrixXd x(static_cast<Eigen::Index>(rows.size()), d);
    for (size_t i = 0; i < rows.size(); ++i)
        for (Eigen::Index j = 0; j < d; ++j)
            x(static_cast<Eigen::Index>(i), j) = rows[i][static_cast<size_t>(j)];

    Eigen::MatrixXd yhat = predict(loaded.model, x);

    auto out = open_output(out_path);
    for (Eigen::Index j = 0; j < yhat.cols(); ++j) {
        if (j) out << ',';
        out << (static_cast<size_t>(j) < loaded.targets.size() ? loaded.targets[static_cast<size_t>(j)]
                                                               : "y" + std::to_string(j));
    }
    out << '\n';
    for (Eigen::Index i = 0; i < yhat.rows(); ++i) {
        for (Eigen::Index j = 0; j < yhat.cols(); ++j) {
            if (j) out << ',';
            out << format_double(yhat(i, j));
        }
        out << '\n';
    }
    std::cout << "wrote " << out_path << " (" << yhat.rows() << " rows)\n";
    return 0;
}

// ---- verify ----------------------------------------------------------------

int run_verify(CommandOptions& opt) {
    const Config& cfg = opt.config;
    const uint64_t seed = resolve_seed(cfg, "verify", opt.seed);
    const int instances = cfg.get_int("verify", "instances", 200);
    cfg.ensure_all_consumed();

    auto rng = make_rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const std::vector<int> n_choices = {10, 100};
    const std::vector<int> dim_choices = {1, 5, 20};
    const std::vector<int> q_choices = {1, 3};
    const std::vector<double> gamma_choices = {0.0, 0.5, 1.0, 2.0, 5.0, 100.0};

    double worst_identity = 0.0;
    double worst_pa = 0.0;
    double worst_iv = 0.0;
    double worst_idem = 0.0;
    for (int i = 0; i < instances; ++i) {
        const int n = n_choices[static_cast<size_t>(i) % n_choices.size()];
        const int d = dim_choices[static_cast<size_t>(i / 2) % dim_choices.size()];
        const int p = dim_choices[static_cast<size_t>(i / 6) % dim_choices.size()];
        const int q = q_choices[static_cast<size_t>(i / 18) % q_choices.size()];
        const double gamma = gamma_choices[static_cast<size_t>(i) % gamma_choices.size()];

        Eigen::MatrixXd x(n, d), y(n, p), a(n, q);
        for (Eigen::Index r = 0; r < n; ++r) {
            for (Eigen::Index c = 0; c < d; ++c) x(r, c) = gauss(rng);
            for (Eigen::Index c = 0; c < p; ++c) y(r, c) = gauss(rng);
            for (Eigen::Index c = 0; c < q; ++c) a(r, c) = gauss(rng);
        }
        x.rowwise() -= x.colwise().mean().eval();
        y.rowwise() -= y.colwise().mean().eval();
        a.rowwise() -= a.colwise().mean().eval();

        worst_identity = std::max(worst_identity, verify_transform_identity(x, y, a, gamma));

        AnchorTransform t = AnchorTransform::fit(a);
        Eigen::MatrixXd pa = t.apply(x, GammaMode::partial_out());
        worst_pa = std::max(worst_pa, t.project(pa).norm() / std::max(pa.norm(), 1e-300));
        Eigen::MatrixXd iv = t.apply(x, GammaMode::iv_limit());
        worst_iv = std::max(worst_iv, (iv - t.project(iv)).norm() / std::max(iv.norm(), 1e-300));
        Eigen::MatrixXd once = t.project(x);
        worst_idem = std::max(worst_idem,
                              (t.project(once) - once).norm() / std::max(once.norm(), 1e-300));
    }

    bool ok = true;
    auto report = [&](const std::string& name, double value, double bound) {
        const bool pass = value < bound;
        ok = ok && pass;
        std::cout << (pass ? "PASS" : "FAIL") << " " << name << ": max deviation "
                  << format_double(value) << " (bound " << format_double(bound) << ")\n";
    };
    report("transform-identity", worst_identity, 1e-10);
    report("pa-orthogonality", worst_pa, 1e-10);
    report("iv-containment", worst_iv, 1e-10);
    report("projector-idempotence", worst_idem, 1e-10);
    return ok ? 0 : 1;
}

}  // namespace anchormva
