#pragma once

#include <string>
#include <vector>

#include "anchormva/estimators.hpp"

namespace anchormva {

/// JSON document for CLI round-trips: kind, gamma, rank, alpha, coefficients
/// (row-major), latent weights and the captured standardization state.
std::string model_to_json(const FittedModel& model,
                          const std::vector<std::string>& predictors = {},
                          const std::vector<std::string>& targets = {});

struct LoadedModel {
    FittedModel model;
    std::vector<std::string> predictors;
    std::vector<std::string> targets;
};

LoadedModel model_from_json(const std::string& text);

void save_model(const FittedModel& model, const std::string& path,
                const std::vector<std::string>& predictors = {},
                const std::vector<std::string>& targets = {});
LoadedModel load_model(const std::string& path);

}  // namespace anchormva
