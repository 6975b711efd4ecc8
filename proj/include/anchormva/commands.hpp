#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "anchormva/config.hpp"
#include "anchormva/data.hpp"

namespace anchormva {

struct CommandOptions {
    Config config;
    int threads = 1;
    std::optional<uint64_t> seed;                // --seed flag, beats config/env
    std::map<std::string, ColumnRole> roles;     // --role flags, merged over [roles]
};

// Each command returns a process exit code: 0 ok. Configuration problems
// throw ConfigError (exit 2); runtime failures throw std::runtime_error
// (exit 1). The caller maps exceptions to codes.
int run_sweep(CommandOptions& opt);
int run_benchmark_env(CommandOptions& opt);
int run_select(CommandOptions& opt);
int run_fit(CommandOptions& opt);
int run_predict(CommandOptions& opt);
int run_verify(CommandOptions& opt);

}  // namespace anchormva
