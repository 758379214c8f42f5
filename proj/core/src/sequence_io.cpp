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

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "dgten/errors.hpp"
#include "dgten/graph.hpp"

namespace dgten {
namespace {

constexpr const char* kFormat = "dgten-snapshots";
constexpr int kVersion = 1;

}  // namespace

std::string sequence_to_json(const SnapshotSequence& sequence) {
    nlohmann::json j;
    j["format"] = kFormat;
    j["version"] = kVersion;
    j["min_timestamp"] = sequence.min_timestamp;
    j["slot_duration"] = sequence.slot_duration;
    j["global_node_count"] = sequence.global_node_count;
    j["raw_ids"] = sequence.raw_ids;
    auto& snaps = j["snapshots"] = nlohmann::json::array();
    for (const auto& s : sequence.snapshots) {
        auto edges = nlohmann::json::array();
        for (const auto& e : s.edges) edges.push_back({e.trustor, e.trustee, e.rating, e.timestamp});
        snaps.push_back(std::move(edges));
    }
    return j.dump();
}

SnapshotSequence sequence_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(0, e.what());
    }
    if (j.value("format", "") != kFormat) throw ValidationError("not a snapshot sequence file");
    if (j.value("version", 0) != kVersion) throw ValidationError("unsupported snapshot file version");

    SnapshotSequence seq;
    seq.min_timestamp = j.at("min_timestamp").get<double>();
    seq.slot_duration = j.at("slot_duration").get<double>();
    seq.global_node_count = j.at("global_node_count").get<std::size_t>();
    seq.raw_ids = j.at("raw_ids").get<std::vector<std::int64_t>>();
    for (const auto& snap : j.at("snapshots")) {
        Snapshot s;
        for (const auto& e : snap) {
            LabeledEdge edge{e.at(0).get<NodeId>(), e.at(1).get<NodeId>(), e.at(2).get<int>(), e.at(3).get<double>()};
            if (edge.trustor >= seq.global_node_count || edge.trustee >= seq.global_node_count) {
                throw ValidationError("edge endpoint outside node range");
            }
            s.edges.push_back(edge);
        }
        seq.snapshots.push_back(std::move(s));
    }
    return seq;
}

void save_sequence(const SnapshotSequence& sequence, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path.string());
    out << sequence_to_json(sequence) << '\n';
}

SnapshotSequence load_sequence(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return sequence_from_json(buf.str());
}

}  // namespace dgten
