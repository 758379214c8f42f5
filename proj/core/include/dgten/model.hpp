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
#include <random>
#include <span>
#include <vector>

#include "dgten/config.hpp"
#include "dgten/structural.hpp"
#include "dgten/temporal.hpp"

namespace dgten {

/// Scored (trustor, trustee) pairs; `slot` picks the embedding slot.
struct EdgeBatch {
    std::vector<Eigen::Index> trustor;
    std::vector<Eigen::Index> trustee;
    std::vector<Eigen::Index> slot;
    std::vector<double> target;  // 1 = Distrust
    std::vector<double> weight;

    std::size_t size() const noexcept { return trustor.size(); }
    void add(Eigen::Index n, Eigen::Index p, Eigen::Index t, double label, double w = 1.0);
};

/// Every trainable tensor of one model plus the handles into it.
class Model {
public:
    /// Fresh parameters for `nodes` global nodes and a window of `horizon` slots.
    Model(const TrainConfig& config, int nodes, int horizon, std::uint64_t seed);

    const TrainConfig& config() const noexcept { return config_; }
    int nodes() const noexcept { return nodes_; }
    int horizon() const noexcept { return horizon_; }
    ParamRegistry& params() noexcept { return params_; }
    const ParamRegistry& params() const noexcept { return params_; }

    struct Bound {
        std::vector<ad::Var> all;
        ad::StructuralVars structural;
        ad::TemporalVars temporal;
        ad::Var head_w;  // 1 x 2d'
        ad::Var head_b;  // 1 x 1
    };
    Bound bind(ad::Tape& tape) const;

    struct Output {
        ad::Var z;                   // (N*T) x d', row n*T + t
        Eigen::Index steps = 0;
        std::vector<Matrix> sigma;   // per slot, N x d' (layer-L sigma)
    };
    /// Runs the structural stack on every slot and the temporal stack on the
    /// stacked means. Dropout is active only when `rng` is set.
    Output forward(const Bound& bound, std::span<const EdgeIndex> slots, std::mt19937_64* rng = nullptr,
                   Matrix* attention_weights = nullptr) const;

    void save(const std::filesystem::path& path) const;
    static Model load(const std::filesystem::path& path);

    StructuralDims structural_dims() const;
    TemporalDims temporal_dims() const;

private:
    Model() = default;
    void attach();

    TrainConfig config_;
    int nodes_ = 0;
    int horizon_ = 0;
    ParamRegistry params_;
    StructuralParams structural_;
    TemporalParams temporal_;
    std::size_t head_w_ = 0;
    std::size_t head_b_ = 0;
};

/// One EdgeIndex per slot over all global nodes.
std::vector<EdgeIndex> edge_indices(const SnapshotSequence& sequence, std::size_t slot_count);

namespace ad {

/// W [Z(n, t) || Z(p, t)] + b for every pair in `batch` (E x 1).
Var predict_logits(const Var& z, Eigen::Index steps, const EdgeBatch& batch, const Var& head_w, const Var& head_b);

/// sum_e w_e * BCE(logit_e, target_e) with a stable log-sigmoid.
Var weighted_bce(const Var& logits, std::span<const double> targets, std::span<const double> weights);

}  // namespace ad
}  // namespace dgten
