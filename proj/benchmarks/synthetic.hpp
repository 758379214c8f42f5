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

#include <random>

#include "dgten/graph.hpp"

namespace dgten::bench {

// Uniform random signed ratings, 90% trust, spread over `slots` snapshots.
inline SnapshotSequence random_sequence(int nodes, int edges, int slots, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> pick(0, nodes - 1);
    std::bernoulli_distribution trust(0.9);
    EdgeList list;
    for (int v = 0; v < nodes; ++v) list.raw_ids.push_back(v);
    for (int k = 0; k < edges; ++k) {
        const int a = pick(rng), b = pick(rng);
        if (a == b) continue;
        list.records.push_back({static_cast<NodeId>(a), static_cast<NodeId>(b), trust(rng) ? 3 : -3, static_cast<double>(k)});
    }
    return discretize(list, slots);
}

}  // namespace dgten::bench
