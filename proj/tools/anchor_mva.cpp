#include <CLI11.hpp>
#include <iostream>
#include <string>
#include <vector>

#include "anchormva/commands.hpp"

using namespace anchormva;

int main(int argc, char** argv) {
    CLI::App app{"anchor-regularised multivariate analysis toolkit"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    std::vector<std::string> overrides;
    std::vector<std::string> role_flags;
    int threads = 1;
    long long seed_flag = -1;

    app.add_option("-c,--config", config_path, "config file (INI-style sections)");
    app.add_option("--set", overrides, "override a config key: section.key=value");
    app.add_option("--role", role_flags, "column role: <column>=<role>");
    app.add_option("--threads", threads, "worker threads (output is identical for any N)");
    app.add_option("--seed", seed_flag, "seed override (also: ANCHOR_MVA_SEED)");

    // gradient-descent baseline knobs (shorthands for [gd] config keys)
    std::string lr, patience, tol, max_epochs, lambda;
    app.add_option("--lr", lr, "gradient-descent learning rate");
    app.add_option("--patience", patience, "early-stopping patience (epochs)");
    app.add_option("--tol", tol, "early-stopping improvement tolerance");
    app.add_option("--max-epochs", max_epochs, "gradient-descent epoch cap");
    app.add_option("--lambda", lambda, "IRM/CVP penalty strength");

    auto* sweep = app.add_subcommand("sweep", "perturbation-strength robustness sweep");
    auto* bench = app.add_subcommand("benchmark-env",
                                     "leave-environments-out benchmark protocol");
    auto* select = app.add_subcommand("select", "hyperparameter grid + trade-off selection");
    auto* fit = app.add_subcommand("fit", "fit one estimator and write the model JSON");
    auto* predict = app.add_subcommand("predict", "apply a saved model to new data");
    auto* verify = app.add_subcommand("verify", "run the algebraic identity checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        CommandOptions opt;
        if (!config_path.empty()) opt.config = Config::parse_file(config_path);
        for (const auto& o : overrides) opt.config.set_override(o);
        if (!lr.empty()) opt.config.set_override("gd.lr=" + lr);
        if (!patience.empty()) opt.config.set_override("gd.patience=" + patience);
        if (!tol.empty()) opt.config.set_override("gd.tol=" + tol);
        if (!max_epochs.empty()) opt.config.set_override("gd.max_epochs=" + max_epochs);
        if (!lambda.empty()) opt.config.set_override("gd.lambda=" + lambda);
        for (const auto& r : role_flags) {
            auto eq = r.find('=');
            if (eq == std::string::npos)
                throw ConfigError("--role expects <column>=<role>: " + r);
            opt.roles[r.substr(0, eq)] = parse_role(r.substr(eq + 1));
        }
        opt.threads = threads;
        if (seed_flag >= 0) opt.seed = static_cast<uint64_t>(seed_flag);

        if (sweep->parsed()) return run_sweep(opt);
        if (bench->parsed()) return run_benchmark_env(opt);
        if (select->parsed()) return run_select(opt);
        if (fit->parsed()) return run_fit(opt);
        if (predict->parsed()) return run_predict(opt);
        if (verify->parsed()) return run_verify(opt);
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
