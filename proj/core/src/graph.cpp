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

#include "dgten/graph.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_map>
#include <utility>

#include "dgten/errors.hpp"

namespace dgten {
namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

template <typename T>
T parse_field(std::string_view field, std::size_t line, const char* name) {
    field = trim(field);
    T value{};
    const auto* end = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(field.data(), end, value);
    if (field.empty() || ec != std::errc{} || ptr != end) {
        throw ParseError(line, std::string("cannot parse ") + name + " '" + std::string(field) + "'");
    }
    return value;
}

struct RawRow {
    std::int64_t source;
    std::int64_t target;
    int rating;
    double time;
};

}  // namespace

EdgeList parse_edge_list(std::istream& in, const CsvOptions& options) {
    std::vector<RawRow> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (options.header && line_no == 1) continue;
        const std::string_view view = trim(line);
        if (view.empty()) continue;

        std::string_view fields[4];
        std::size_t count = 0;
        std::size_t start = 0;
        while (true) {
            const auto comma = view.find(',', start);
            if (count == 4) throw ParseError(line_no, "expected 4 fields");
            fields[count++] = view.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
            if (comma == std::string_view::npos) break;
            start = comma + 1;
        }
        if (count != 4) throw ParseError(line_no, "expected 4 fields, got " + std::to_string(count));

        RawRow row{parse_field<std::int64_t>(fields[0], line_no, "SOURCE"),
                   parse_field<std::int64_t>(fields[1], line_no, "TARGET"),
                   parse_field<int>(fields[2], line_no, "RATING"),
                   parse_field<double>(fields[3], line_no, "TIME")};
        if (row.rating == 0 || row.rating < -10 || row.rating > 10) {
            throw ValidationError("line " + std::to_string(line_no) + ": rating " + std::to_string(row.rating) +
                                  " outside [-10, 10] \\ {0}");
        }
        if (!std::isfinite(row.time)) throw ParseError(line_no, "non-finite TIME");
        if (row.source == row.target) continue;
        rows.push_back(row);
    }

    // Repeated (source, target, time) rows collapse to the last occurrence.
    std::map<std::tuple<std::int64_t, std::int64_t, double>, std::size_t> last;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        last[{rows[i].source, rows[i].target, rows[i].time}] = i;
    }

    EdgeList out;
    std::unordered_map<std::int64_t, NodeId> dense;
    auto intern = [&](std::int64_t raw) {
        auto [it, inserted] = dense.try_emplace(raw, static_cast<NodeId>(out.raw_ids.size()));
        if (inserted) out.raw_ids.push_back(raw);
        return it->second;
    };
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        if (last[{r.source, r.target, r.time}] != i) continue;
        const NodeId s = intern(r.source);
        const NodeId t = intern(r.target);
        out.records.push_back({s, t, r.rating, r.time});
    }
    return out;
}

EdgeList load_edge_list(const std::filesystem::path& path, const CsvOptions& options) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path.string());
    return parse_edge_list(in, options);
}

std::vector<NodeId> Snapshot::active_nodes() const {
    std::vector<NodeId> nodes;
    nodes.reserve(edges.size() * 2);
    for (const auto& e : edges) {
        nodes.push_back(e.trustor);
        nodes.push_back(e.trustee);
    }
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    return nodes;
}

std::size_t SnapshotSequence::edge_count() const noexcept {
    std::size_t n = 0;
    for (const auto& s : snapshots) n += s.edges.size();
    return n;
}

SnapshotSequence SnapshotSequence::prefix(std::size_t count) const {
    if (count > snapshots.size()) throw ConfigError("prefix longer than sequence");
    SnapshotSequence out = *this;
    out.snapshots.resize(count);
    return out;
}

SnapshotSequence discretize(const EdgeList& edges, std::size_t n_snapshots) {
    if (n_snapshots < 2) throw ConfigError("dynamic modeling needs at least 2 snapshots");
    if (edges.records.empty()) throw ConfigError("cannot discretize an empty record list");

    const auto& records = edges.records;
    const auto [lo, hi] = std::minmax_element(records.begin(), records.end(),
                                              [](const auto& a, const auto& b) { return a.timestamp < b.timestamp; });
    const double min_ts = lo->timestamp;
    const double range = hi->timestamp - min_ts;

    SnapshotSequence seq;
    seq.min_timestamp = min_ts;
    seq.slot_duration = range / static_cast<double>(n_snapshots);
    seq.global_node_count = edges.node_count();
    seq.raw_ids = edges.raw_ids;
    seq.snapshots.resize(n_snapshots);

    // Slot k (0-based) is the smallest k with (ts - min) * N <= (k + 1) * range.
    std::vector<std::size_t> slot_of(records.size(), 0);
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (range <= 0.0) continue;
        const double pos = (records[i].timestamp - min_ts) * static_cast<double>(n_snapshots) / range;
        const double k = std::ceil(pos);
        slot_of[i] = static_cast<std::size_t>(std::clamp(k, 1.0, static_cast<double>(n_snapshots))) - 1;
    }

    std::vector<std::size_t> order(records.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return records[a].timestamp < records[b].timestamp; });

    std::vector<std::map<std::pair<NodeId, NodeId>, LabeledEdge>> latest(n_snapshots);
    for (std::size_t i : order) {
        const auto& r = records[i];
        latest[slot_of[i]][{r.trustor, r.trustee}] = LabeledEdge{r.trustor, r.trustee, r.rating, r.timestamp};
    }
    for (std::size_t k = 0; k < n_snapshots; ++k) {
        auto& out = seq.snapshots[k].edges;
        out.reserve(latest[k].size());
        for (auto& [key, edge] : latest[k]) out.push_back(edge);
    }
    return seq;
}

std::vector<LabeledEdge> aggregate_edges(const SnapshotSequence& sequence, std::size_t slot_count) {
    slot_count = std::min(slot_count, sequence.size());
    std::map<std::pair<NodeId, NodeId>, LabeledEdge> merged;
    for (std::size_t k = 0; k < slot_count; ++k) {
        for (const auto& e : sequence.snapshots[k].edges) merged[{e.trustor, e.trustee}] = e;
    }
    std::vector<LabeledEdge> out;
    out.reserve(merged.size());
    for (auto& [key, e] : merged) out.push_back(e);
    return out;
}

std::vector<LabeledEdge> aggregate_edges(const SnapshotSequence& sequence) {
    return aggregate_edges(sequence, sequence.size());
}

std::vector<NodeClass> node_classes(const std::vector<LabeledEdge>& aggregated, std::size_t node_count) {
    std::vector<long> balance(node_count, 0);  // distrust-in minus trust-in
    for (const auto& e : aggregated) {
        balance.at(e.trustee) += e.label() == TrustLabel::Distrust ? 1 : -1;
    }
    std::vector<NodeClass> classes(node_count, NodeClass::Good);
    for (std::size_t i = 0; i < node_count; ++i) {
        if (balance[i] > 0) classes[i] = NodeClass::Bad;
    }
    return classes;
}

std::vector<NodeClass> node_classes(const SnapshotSequence& sequence, std::size_t slot_count) {
    return node_classes(aggregate_edges(sequence, slot_count), sequence.global_node_count);
}

std::vector<NodeClass> node_classes(const SnapshotSequence& sequence) {
    return node_classes(sequence, sequence.size());
}

double edge_homophily(const SnapshotSequence& sequence, const std::vector<NodeClass>& classes) {
    const auto edges = aggregate_edges(sequence);
    if (edges.empty()) throw UndefinedMetricError("edge homophily of an empty edge set");
    std::size_t same = 0;
    for (const auto& e : edges) {
        if (classes.at(e.trustor) == classes.at(e.trustee)) ++same;
    }
    return static_cast<double>(same) / static_cast<double>(edges.size());
}

double edge_homophily(const SnapshotSequence& sequence) {
    return edge_homophily(sequence, node_classes(sequence));
}

std::vector<int> first_appearance(const SnapshotSequence& sequence) {
    std::vector<int> first(sequence.global_node_count, -1);
    for (std::size_t k = sequence.size(); k-- > 0;) {
        for (const auto& e : sequence.snapshots[k].edges) {
            first[e.trustor] = static_cast<int>(k);
            first[e.trustee] = static_cast<int>(k);
        }
    }
    return first;
}

SequenceStats record_stats(const EdgeList& edges) {
    SequenceStats s;
    s.nodes = edges.node_count();
    s.edges = edges.records.size();
    for (const auto& r : edges.records) {
        (r.label() == TrustLabel::Distrust ? s.distrust_edges : s.trust_edges) += 1;
    }
    return s;
}

SequenceStats sequence_stats(const SnapshotSequence& sequence) {
    SequenceStats s;
    s.nodes = sequence.global_node_count;
    for (const auto& snap : sequence.snapshots) {
        for (const auto& e : snap.edges) {
            ++s.edges;
            (e.label() == TrustLabel::Distrust ? s.distrust_edges : s.trust_edges) += 1;
        }
    }
    return s;
}

}  // namespace dgten
