// Copyright 2026 The dgten Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

namespace dgten {

/// Every knob of one training run. Defaults are the Bitcoin-Alpha settings;
/// `apply_preset("otc")` switches the dataset-specific values.
struct TrainConfig {
    double learning_rate = 0.005;
    double weight_decay = 1e-5;
    int epochs = 250;
    int layers = 3;
    double tau_cos = 1.3;
    int heads = 20;
    double dropout = 0.3;
    int cheb_order = 3;
    int hidden_dim = 32;
    int feature_dim = 32;
    int head_dim = 8;
    int ode_steps = 4;
    int delta = 3;
    int t_initial = 2;
    double sigma_min = 1e-4;
    double epsilon = 1e-8;
    double jaccard_threshold = 0.05;
    double momentum = 0.9;
    double optimizer_eps = 1e-6;
    /// false swaps the defensive coefficients for plain mean aggregation.
    bool robust_aggregation = true;
    /// Train on edges of slot t+1 scored with embeddings of slot t.
    bool train_on_next_slot = true;
    std::uint64_t seed = 1;

    /// "otc" or "alpha"; throws ConfigError otherwise.
    void apply_preset(const std::string& name);
    /// Throws ConfigError when a field is out of range.
    void validate() const;

    std::string to_json() const;
    static TrainConfig from_json(const std::string& text);
    /// `key = value` lines, '#' comments. Unknown keys are errors.
    static TrainConfig from_key_values(const std::string& text);
    /// JSON if the first non-blank character is '{', key=value otherwise.
    static TrainConfig load(const std::filesystem::path& path);
    /// Applies one `key=value` override.
    void set(const std::string& key, const std::string& value);
};

}  // namespace dgten
