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
#include <vector>

#include "dgten/graph.hpp"

namespace dgten {

enum class AttackKind : std::uint8_t { GoodMouthing, BadMouthing, OnOff };

AttackKind parse_attack_kind(const std::string& name);  // good-mouthing | bad-mouthing | on-off
std::string to_string(AttackKind kind);

struct AttackSpec {
    AttackKind kind = AttackKind::BadMouthing;
    double victim_fraction = 0.10;
    std::uint64_t seed = 1;
    /// First "on" slot of an on-off attack (0-based).
    std::size_t phase_origin = 0;
    /// Slot receiving the injected edges of a static attack; -1 = last slot.
    long long target_slot = -1;

    void validate() const;
};

struct InjectedEdge {
    std::size_t slot = 0;
    NodeId attacker = 0;
    NodeId victim = 0;
    int rating = 0;
    friend bool operator==(const InjectedEdge&, const InjectedEdge&) = default;
};

struct AttackResult {
    SnapshotSequence sequence;
    std::vector<InjectedEdge> injected;
    /// Victims per attacked slot, in selection order.
    std::vector<std::pair<std::size_t, std::vector<NodeId>>> victims;
};

/// Ratings written by the attacks.
inline constexpr int kGoodMouthingRating = 10;
inline constexpr int kBadMouthingRating = -10;

/// Unweighted hop distance from `source` on the undirected version of
/// `edges`; -1 marks unreachable nodes.
std::vector<int> undirected_distances(const std::vector<LabeledEdge>& edges, std::size_t node_count, NodeId source);

/// Attack candidates for `victim`, farthest first: unreachable nodes, then
/// decreasing distance, ties by ascending id. Only nodes in `pool` qualify.
std::vector<NodeId> rank_attackers(const std::vector<LabeledEdge>& edges, std::size_t node_count, NodeId victim,
                                   const std::vector<NodeId>& pool);

/// Random ceil(fraction * |Bad|) Bad victims (by the window up to the target
/// slot), each receiving one Trust edge from each of its total-degree many
/// farthest attackers in the target slot.
AttackResult good_mouthing(const SnapshotSequence& sequence, const AttackSpec& spec);
/// As good_mouthing with Good victims and Distrust edges.
AttackResult bad_mouthing(const SnapshotSequence& sequence, const AttackSpec& spec);
/// Bad-mouthing on every slot at an even offset from phase_origin, each with
/// its own RNG stream; other slots are left untouched.
AttackResult on_off(const SnapshotSequence& sequence, const AttackSpec& spec);
AttackResult apply_attack(const SnapshotSequence& sequence, const AttackSpec& spec);

/// JSON sidecar describing the injected edges (raw ids alongside dense ids).
std::string provenance_json(const AttackResult& result, const AttackSpec& spec, const SnapshotSequence& original);
void save_provenance(const AttackResult& result, const AttackSpec& spec, const SnapshotSequence& original,
                     const std::filesystem::path& path);

}  // namespace dgten
