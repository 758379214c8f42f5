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
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "dgten/model.hpp"

namespace dgten {

/// Inverse class frequency |D| / (2 * count(class)) per instance. With a
/// single class present every weight is 1 and a warning is logged.
std::vector<double> class_weights(std::span<const double> targets);

/// Momentumized dual averaging with cube-root denominators.
///
/// Per step k (from 0): lambda = lr * sqrt(k + 1); s += lambda g;
/// nu += lambda g^2; z = x0 - s / (cbrt(nu) + eps); x = (1 - c) x + c z with
/// c = 1 - momentum.
class Madgrad {
public:
    Madgrad(double learning_rate, double momentum, double eps);
    void step(ParamRegistry& params);
    std::size_t steps() const noexcept { return k_; }

private:
    double lr_, momentum_, eps_;
    std::size_t k_ = 0;
    std::vector<Matrix> x0_, s_, nu_;
};

/// Training pairs of a window of `slot_count` slots. With `next_slot` the
/// edges of slot t+1 are scored from embeddings of slot t; otherwise edges
/// are scored from their own slot. Weights are class-balanced.
EdgeBatch training_batch(const SnapshotSequence& sequence, std::size_t slot_count, bool next_slot);

namespace ad {
/// Weighted BCE over `batch` plus weight_decay * sum of squared parameters.
Var objective(const Model& model, const Model::Bound& bound, std::span<const EdgeIndex> slots, const EdgeBatch& batch,
              std::mt19937_64* rng);
}  // namespace ad

/// Plain loss value with dropout disabled.
double evaluate_objective(const Model& model, std::span<const EdgeIndex> slots, const EdgeBatch& batch);

struct TrainResult {
    std::vector<double> loss;  // per epoch, before the update
};

/// Full-batch training for config().epochs steps. Dropout draws come from a
/// generator seeded with `seed`. Throws TrainingError on a non-finite loss.
TrainResult train(Model& model, std::span<const EdgeIndex> slots, const EdgeBatch& batch, std::uint64_t seed,
                  const std::function<void(int epoch, double loss)>& on_epoch = {});

}  // namespace dgten
