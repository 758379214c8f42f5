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

#include "dgten/adversarial.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <queue>
#include <random>
#include <set>
#include <tuple>

#include <nlohmann/json.hpp>

#include "dgten/errors.hpp"
#include "dgten/log.hpp"

namespace dgten {
namespace {

std::vector<std::vector<NodeId>> undirected_adjacency(const std::vector<LabeledEdge>& edges, std::size_t n) {
    std::vector<std::vector<NodeId>> adj(n);
    for (const auto& e : edges) {
        adj.at(e.trustor).push_back(e.trustee);
        adj.at(e.trustee).push_back(e.trustor);
    }
    return adj;
}

std::vector<NodeId> active_nodes(const std::vector<LabeledEdge>& edges) {
    std::vector<NodeId> nodes;
    for (const auto& e : edges) {
        nodes.push_back(e.trustor);
        nodes.push_back(e.trustee);
    }
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    return nodes;
}

std::size_t resolve_slot(const SnapshotSequence& seq, long long slot) {
    if (seq.size() == 0) throw ConfigError("attack on an empty sequence");
    if (slot < 0) return seq.size() - 1;
    if (static_cast<std::size_t>(slot) >= seq.size()) throw ConfigError("attack target slot outside the sequence");
    return static_cast<std::size_t>(slot);
}

// One mouthing attack on `slot` of `out`, classes and distances taken from
// the original sequence's window [0, slot].
void mouth_slot(const SnapshotSequence& original, std::size_t slot, NodeClass victim_class, int rating,
                double fraction, std::mt19937_64& rng, AttackResult& result) {
    const auto agg = aggregate_edges(original, slot + 1);
    const std::size_t n = original.global_node_count;
    const auto classes = node_classes(agg, n);
    const auto pool = active_nodes(agg);

    std::vector<NodeId> eligible;
    for (NodeId v : pool) {
        if (classes[v] == victim_class) eligible.push_back(v);
    }
    const auto count = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(eligible.size()) - 1e-9));
    std::shuffle(eligible.begin(), eligible.end(), rng);
    eligible.resize(std::min(count, eligible.size()));

    std::vector<std::size_t> degree(n, 0);
    for (const auto& e : agg) {
        ++degree[e.trustor];
        ++degree[e.trustee];
    }

    Snapshot& snap = result.sequence.snapshots[slot];
    std::set<std::pair<NodeId, NodeId>> present;
    for (const auto& e : snap.edges) present.emplace(e.trustor, e.trustee);
    const double stamp = original.min_timestamp + static_cast<double>(slot + 1) * original.slot_duration;

    for (NodeId victim : eligible) {
        const std::size_t wanted = degree[victim];
        std::size_t added = 0;
        for (NodeId attacker : rank_attackers(agg, n, victim, pool)) {
            if (added == wanted) break;
            if (!present.emplace(attacker, victim).second) continue;
            snap.edges.push_back(LabeledEdge{attacker, victim, rating, stamp});
            result.injected.push_back(InjectedEdge{slot, attacker, victim, rating});
            ++added;
        }
        if (added < wanted) {
            warn("attack: victim " + std::to_string(victim) + " received " + std::to_string(added) + " of " +
                 std::to_string(wanted) + " edges (not enough attackers)");
        }
    }
    std::sort(snap.edges.begin(), snap.edges.end(), [](const LabeledEdge& a, const LabeledEdge& b) {
        return std::tie(a.trustor, a.trustee) < std::tie(b.trustor, b.trustee);
    });
    result.victims.emplace_back(slot, std::move(eligible));
}

AttackResult mouthing(const SnapshotSequence& seq, const AttackSpec& spec, NodeClass victim_class, int rating) {
    spec.validate();
    const std::size_t slot = resolve_slot(seq, spec.target_slot);
    AttackResult result{seq, {}, {}};
    std::mt19937_64 rng(spec.seed);
    mouth_slot(seq, slot, victim_class, rating, spec.victim_fraction, rng, result);
    return result;
}

}  // namespace

AttackKind parse_attack_kind(const std::string& name) {
    if (name == "good-mouthing") return AttackKind::GoodMouthing;
    if (name == "bad-mouthing") return AttackKind::BadMouthing;
    if (name == "on-off") return AttackKind::OnOff;
    throw ConfigError("unknown attack kind '" + name + "'");
}

std::string to_string(AttackKind kind) {
    switch (kind) {
        case AttackKind::GoodMouthing: return "good-mouthing";
        case AttackKind::BadMouthing: return "bad-mouthing";
        case AttackKind::OnOff: return "on-off";
    }
    return "unknown";
}

void AttackSpec::validate() const {
    if (!(victim_fraction > 0.0 && victim_fraction <= 1.0)) throw ConfigError("victim fraction must be in (0, 1]");
}

std::vector<int> undirected_distances(const std::vector<LabeledEdge>& edges, std::size_t node_count, NodeId source) {
    const auto adj = undirected_adjacency(edges, node_count);
    std::vector<int> dist(node_count, -1);
    std::queue<NodeId> frontier;
    dist.at(source) = 0;
    frontier.push(source);
    while (!frontier.empty()) {
        const NodeId u = frontier.front();
        frontier.pop();
        for (NodeId w : adj[u]) {
            if (dist[w] < 0) {
                dist[w] = dist[u] + 1;
                frontier.push(w);
            }
        }
    }
    return dist;
}

std::vector<NodeId> rank_attackers(const std::vector<LabeledEdge>& edges, std::size_t node_count, NodeId victim,
                                   const std::vector<NodeId>& pool) {
    const auto dist = undirected_distances(edges, node_count, victim);
    std::vector<NodeId> out;
    for (NodeId v : pool) {
        if (v != victim) out.push_back(v);
    }
    auto key = [&](NodeId v) { return dist[v] < 0 ? std::numeric_limits<int>::max() : dist[v]; };
    std::stable_sort(out.begin(), out.end(), [&](NodeId a, NodeId b) {
        const int ka = key(a), kb = key(b);
        return ka != kb ? ka > kb : a < b;
    });
    return out;
}

AttackResult good_mouthing(const SnapshotSequence& seq, const AttackSpec& spec) {
    return mouthing(seq, spec, NodeClass::Bad, kGoodMouthingRating);
}

AttackResult bad_mouthing(const SnapshotSequence& seq, const AttackSpec& spec) {
    return mouthing(seq, spec, NodeClass::Good, kBadMouthingRating);
}

AttackResult on_off(const SnapshotSequence& seq, const AttackSpec& spec) {
    spec.validate();
    if (seq.size() < 2) throw ConfigError("on-off attack needs at least two slots");
    AttackResult result{seq, {}, {}};
    for (std::size_t slot = spec.phase_origin; slot < seq.size(); slot += 2) {
        std::seed_seq stream{static_cast<std::uint32_t>(spec.seed), static_cast<std::uint32_t>(spec.seed >> 32),
                             static_cast<std::uint32_t>(slot)};
        std::mt19937_64 rng(stream);
        mouth_slot(seq, slot, NodeClass::Good, kBadMouthingRating, spec.victim_fraction, rng, result);
    }
    return result;
}

AttackResult apply_attack(const SnapshotSequence& seq, const AttackSpec& spec) {
    switch (spec.kind) {
        case AttackKind::GoodMouthing: return good_mouthing(seq, spec);
        case AttackKind::BadMouthing: return bad_mouthing(seq, spec);
        case AttackKind::OnOff: return on_off(seq, spec);
    }
    throw ConfigError("unknown attack kind");
}

std::string provenance_json(const AttackResult& result, const AttackSpec& spec, const SnapshotSequence& original) {
    auto raw = [&](NodeId id) -> std::int64_t {
        return id < original.raw_ids.size() ? original.raw_ids[id] : static_cast<std::int64_t>(id);
    };
    nlohmann::json injected = nlohmann::json::array();
    for (const auto& e : result.injected) {
        injected.push_back({{"slot", e.slot},
                            {"attacker", e.attacker},
                            {"victim", e.victim},
                            {"attacker_raw", raw(e.attacker)},
                            {"victim_raw", raw(e.victim)},
                            {"rating", e.rating}});
    }
    nlohmann::json victims = nlohmann::json::array();
    for (const auto& [slot, ids] : result.victims) victims.push_back({{"slot", slot}, {"nodes", ids}});
    const nlohmann::json j{{"format", "dgten-attack"},
                           {"version", 1},
                           {"kind", to_string(spec.kind)},
                           {"victim_fraction", spec.victim_fraction},
                           {"seed", spec.seed},
                           {"phase_origin", spec.phase_origin},
                           {"target_slot", spec.target_slot},
                           {"victims", victims},
                           {"injected", injected}};
    return j.dump(2);
}

void save_provenance(const AttackResult& result, const AttackSpec& spec, const SnapshotSequence& original,
                     const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path.string());
    out << provenance_json(result, spec, original) << '\n';
}

}  // namespace dgten
