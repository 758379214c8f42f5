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

#include "dgten/gradcheck.hpp"

#include "dgten/errors.hpp"
#include "dgten/model.hpp"
#include "dgten/training.hpp"

namespace dgten {

const std::vector<GradFixture>& gradcheck_fixtures() {
    static const std::vector<GradFixture> fixtures{
        {"node-init", "feature table, projection and node RFF head",
         {"structural.features", "structural.proj.", "structural.node."}},
        {"edge-mapper", "per-layer edge RFF heads", {"structural.edge"}},
        {"conv", "per-layer concat transform", {"structural.conv"}},
        {"hagh", "absolute table, Gaussian bump and hourglass", {"temporal.hagh."}},
        {"kan-qkv", "query, key and value KAN coefficients", {"temporal.kan_q", "temporal.kan_k", "temporal.kan_v"}},
        {"kan-out", "attention output KAN", {"temporal.kan_o"}},
        {"attention", "score path through queries and keys", {"temporal.kan_q", "temporal.kan_k"}},
        {"ode", "residual vector field", {"temporal.ode."}},
        {"head", "edge logit head", {"head."}},
        {"full", "every parameter", {}},
    };
    return fixtures;
}

SnapshotSequence fixture_sequence() {
    struct Row {
        NodeId s, t;
        int rating;
    };
    const std::vector<std::vector<Row>> slots{
        {{0, 1, 5}, {0, 3, 7}, {1, 2, 3}, {2, 0, -4}, {3, 4, 2}, {4, 5, -6}, {5, 3, 1}},
        {{0, 5, -3}, {1, 0, 4}, {2, 1, -2}, {3, 2, 6}, {4, 3, -1}, {5, 4, 8}},
        {{0, 2, 2}, {1, 3, -5}, {2, 4, 3}, {3, 5, -7}, {4, 0, 1}, {5, 1, 4}},
    };
    SnapshotSequence seq;
    seq.min_timestamp = 0.0;
    seq.slot_duration = 100.0;
    seq.global_node_count = 6;
    for (std::int64_t i = 0; i < 6; ++i) seq.raw_ids.push_back(100 + i);
    for (std::size_t k = 0; k < slots.size(); ++k) {
        Snapshot snap;
        for (const auto& r : slots[k]) {
            snap.edges.push_back({r.s, r.t, r.rating, 100.0 * static_cast<double>(k) + 50.0});
        }
        seq.snapshots.push_back(std::move(snap));
    }
    return seq;
}

TrainConfig fixture_config() {
    TrainConfig c;
    c.feature_dim = 3;
    c.hidden_dim = 4;
    c.layers = 2;
    c.heads = 2;
    c.head_dim = 2;
    c.cheb_order = 3;
    c.ode_steps = 4;
    c.dropout = 0.0;
    c.weight_decay = 1e-3;
    c.tau_cos = 1.3;
    c.seed = 11;
    return c;
}

GradCheckResult run_gradcheck_fixture(const std::string& fixture, GradCheckOptions options) {
    const GradFixture* found = nullptr;
    for (const auto& f : gradcheck_fixtures()) {
        if (f.name == fixture) found = &f;
    }
    if (found == nullptr) throw ConfigError("unknown gradcheck fixture '" + fixture + "'");
    options.prefixes = found->prefixes;

    const SnapshotSequence seq = fixture_sequence();
    const TrainConfig cfg = fixture_config();
    Model model(cfg, static_cast<int>(seq.global_node_count), static_cast<int>(seq.size()), cfg.seed);
    const auto slots = edge_indices(seq, seq.size());
    const EdgeBatch batch = training_batch(seq, seq.size(), true);

    Objective objective;
    objective.value = [&](const ParamRegistry&) { return evaluate_objective(model, slots, batch); };
    objective.value_and_grad = [&](ParamRegistry& params) {
        ad::Tape tape;
        const auto bound = model.bind(tape);
        const ad::Var loss = ad::objective(model, bound, slots, batch, nullptr);
        tape.backward(loss);
        params.collect_grads(bound.all);
        return loss.scalar();
    };
    return grad_check(objective, model.params(), options);
}

}  // namespace dgten
