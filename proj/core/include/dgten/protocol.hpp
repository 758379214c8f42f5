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
#include <optional>
#include <string>
#include <vector>

#include "dgten/adversarial.hpp"
#include "dgten/config.hpp"
#include "dgten/metrics.hpp"
#include "dgten/model.hpp"

namespace dgten {

/// Training-window lengths (slots 1..t_end) of every round of `task`.
/// Tasks 1 and 3: t_end = t_initial..n-1. Task 2: t_end = t_initial..n-delta.
std::vector<std::size_t> protocol_rounds(std::size_t n, int task, int t_initial, int delta);

/// Nodes active in any of the first `slot_count` snapshots, as a mask.
std::vector<bool> observed_nodes(const SnapshotSequence& sequence, std::size_t slot_count);

/// Test pairs of the round with training window 1..t_end, scored from the
/// last trained slot. Task 1: edges of slot t_end+1 among observed nodes.
/// Task 2: edges of slots t_end+1..t_end+delta among observed nodes.
/// Task 3: edges of slot t_end+1 between observed nodes with at least one
/// endpoint first seen in slot t_end.
EdgeBatch test_batch(const SnapshotSequence& sequence, std::size_t t_end, int task, int delta);

struct RoundResult {
    std::size_t t_end = 0;
    std::uint64_t seed = 0;
    std::size_t train_edges = 0;
    std::size_t test_edges = 0;
    double final_loss = 0.0;
    MetricSet metrics;
};

struct SkippedRound {
    std::size_t t_end = 0;
    std::uint64_t seed = 0;
    std::string reason;
};

struct MeanSd {
    double mean = 0.0;
    double sd = 0.0;  // sample standard deviation; 0 for a single value
};

struct EvalReport {
    int task = 1;
    TrainConfig config;
    std::vector<std::uint64_t> seeds;
    std::optional<AttackSpec> attack;
    std::size_t planned_rounds = 0;  // per seed
    std::vector<RoundResult> rounds;
    std::vector<SkippedRound> skipped;

    /// Keys: mcc, auc, ba, ap, f1_micro, f1_macro.
    std::vector<std::pair<std::string, MeanSd>> aggregate() const;
    std::string to_json() const;
    static EvalReport from_json(const std::string& text);
};

struct EvaluateOptions {
    int task = 1;
    std::vector<std::uint64_t> seeds{1};
    /// Applied to each round's training window, static attacks at its last slot.
    std::optional<AttackSpec> attack;
    /// Worker threads for rounds; 0 reads DGTEN_THREADS, else hardware concurrency.
    unsigned threads = 0;
    std::function<void(const std::string&)> progress;
};

/// Expanding-window protocol: one model per (round, seed), trained from
/// scratch and tested on the round's future edges. `final_model`, when set,
/// receives the model of the last round for the first seed.
EvalReport evaluate(const SnapshotSequence& sequence, const TrainConfig& config, const EvaluateOptions& options,
                    std::optional<Model>* final_model = nullptr);

/// Scores a trained model on the test set of the round matching its horizon.
EvalReport evaluate_model(const SnapshotSequence& sequence, const Model& model, int task);

/// Logits of `batch` under `model` (dropout off) using the first
/// model.horizon() slots of `sequence`.
std::vector<double> score(const Model& model, const SnapshotSequence& sequence, const EdgeBatch& batch);

/// Worker count from DGTEN_THREADS, falling back to hardware concurrency.
unsigned default_threads();

}  // namespace dgten
