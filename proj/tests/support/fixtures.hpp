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

#include <algorithm>
#include <cstdint>
#include <random>
#include <tuple>
#include <vector>

#include "dgten/config.hpp"
#include "dgten/graph.hpp"

namespace dgten::testing {

using SlotEdges = std::vector<std::tuple<NodeId, NodeId, int>>;

// Sequence with slot k stamped at k + 1 and identity raw ids.
inline SnapshotSequence make_sequence(std::size_t nodes, const std::vector<SlotEdges>& slots) {
    SnapshotSequence seq;
    seq.min_timestamp = 0.0;
    seq.slot_duration = 1.0;
    seq.global_node_count = nodes;
    for (std::size_t v = 0; v < nodes; ++v) seq.raw_ids.push_back(static_cast<std::int64_t>(v));
    for (std::size_t k = 0; k < slots.size(); ++k) {
        Snapshot snap;
        for (const auto& [a, b, r] : slots[k]) snap.edges.push_back({a, b, r, static_cast<double>(k + 1)});
        std::sort(snap.edges.begin(), snap.edges.end(), [](const LabeledEdge& x, const LabeledEdge& y) {
            return std::tie(x.trustor, x.trustee) < std::tie(y.trustor, y.trustee);
        });
        seq.snapshots.push_back(std::move(snap));
    }
    return seq;
}

// Ratings where the first `bad` nodes mostly receive distrust.
inline EdgeList planted_records(int nodes, int bad, int count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> pick(0, nodes - 1);
    std::uniform_int_distribution<int> mag(1, 10);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    std::vector<std::int64_t> raw;
    std::vector<int> dense(static_cast<std::size_t>(nodes), -1);
    auto id = [&](int v) {
        if (dense[static_cast<std::size_t>(v)] < 0) {
            dense[static_cast<std::size_t>(v)] = static_cast<int>(raw.size());
            raw.push_back(1000 + v);
        }
        return static_cast<NodeId>(dense[static_cast<std::size_t>(v)]);
    };
    EdgeList out;
    for (int k = 0; k < count; ++k) {
        const int a = pick(rng);
        const int b = pick(rng);
        if (a == b) continue;
        const bool negative = b < bad ? coin(rng) < 0.85 : coin(rng) < 0.05;
        const int r = negative ? -mag(rng) : mag(rng);
        const NodeId ia = id(a);
        const NodeId ib = id(b);
        out.records.push_back({ia, ib, r, 1000.0 + 37.0 * k});
    }
    out.raw_ids = std::move(raw);
    return out;
}

inline TrainConfig tiny_config() {
    TrainConfig c;
    c.feature_dim = 6;
    c.hidden_dim = 8;
    c.layers = 2;
    c.heads = 2;
    c.head_dim = 4;
    c.epochs = 40;
    c.dropout = 0.0;
    c.seed = 5;
    return c;
}

}  // namespace dgten::testing
