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

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace dgten {

using NodeId = std::uint32_t;

enum class TrustLabel : std::uint8_t { Trust, Distrust };

/// Sign binarization of an integer rating. Zero is rejected upstream.
constexpr TrustLabel label_from_rating(int rating) noexcept {
    return rating < 0 ? TrustLabel::Distrust : TrustLabel::Trust;
}

/// One timestamped rating `trustor -> trustee`. Node ids are dense global indices.
struct InteractionRecord {
    NodeId trustor = 0;
    NodeId trustee = 0;
    int rating = 0;
    double timestamp = 0.0;

    TrustLabel label() const noexcept { return label_from_rating(rating); }
    friend bool operator==(const InteractionRecord&, const InteractionRecord&) = default;
};

/// Records in file order plus the dense-id -> raw-id table.
struct EdgeList {
    std::vector<InteractionRecord> records;
    std::vector<std::int64_t> raw_ids;

    std::size_t node_count() const noexcept { return raw_ids.size(); }
};

struct CsvOptions {
    bool header = false;
};

/// Parses `SOURCE,TARGET,RATING,TIME` rows.
///
/// Node ids are remapped to dense indices in order of first appearance.
/// Self-edges are dropped, repeated (source, target, time) rows collapse to
/// the last one, and ratings must be nonzero integers in [-10, 10].
/// Throws ParseError (with line number) or ValidationError.
EdgeList parse_edge_list(std::istream& in, const CsvOptions& options = {});
EdgeList load_edge_list(const std::filesystem::path& path, const CsvOptions& options = {});

struct LabeledEdge {
    NodeId trustor = 0;
    NodeId trustee = 0;
    int rating = 0;
    double timestamp = 0.0;

    TrustLabel label() const noexcept { return label_from_rating(rating); }
    friend bool operator==(const LabeledEdge&, const LabeledEdge&) = default;
};

/// Directed labeled graph for one time slot. Edges are sorted by
/// (trustor, trustee) and each ordered pair appears at most once.
struct Snapshot {
    std::vector<LabeledEdge> edges;

    /// Sorted ids of nodes incident to at least one edge.
    std::vector<NodeId> active_nodes() const;
    friend bool operator==(const Snapshot&, const Snapshot&) = default;
};

struct SnapshotSequence {
    double min_timestamp = 0.0;
    double slot_duration = 0.0;
    std::size_t global_node_count = 0;
    std::vector<std::int64_t> raw_ids;
    std::vector<Snapshot> snapshots;

    std::size_t size() const noexcept { return snapshots.size(); }
    std::size_t edge_count() const noexcept;

    /// The first `count` snapshots with the same node indexing.
    SnapshotSequence prefix(std::size_t count) const;

    friend bool operator==(const SnapshotSequence&, const SnapshotSequence&) = default;
};

/// Splits [min_ts, max_ts] into `n_snapshots` equal slots. Slot k (1-based)
/// holds timestamps in ((k-1)dt, k*dt] relative to min_ts; the first slot is
/// also closed on the left. Within a slot the latest rating of a pair wins,
/// with file order breaking timestamp ties.
SnapshotSequence discretize(const EdgeList& edges, std::size_t n_snapshots);

/// Union of the first `slot_count` snapshots; a pair repeated across slots
/// keeps its label from the latest slot. Sorted by (trustor, trustee).
std::vector<LabeledEdge> aggregate_edges(const SnapshotSequence& sequence, std::size_t slot_count);
std::vector<LabeledEdge> aggregate_edges(const SnapshotSequence& sequence);

enum class NodeClass : std::uint8_t { Good, Bad };

/// Bad iff incoming Distrust edges outnumber incoming Trust edges in the
/// aggregated graph; ties and nodes without in-edges are Good.
/// Indexed by node id, sized `global_node_count`.
std::vector<NodeClass> node_classes(const SnapshotSequence& sequence);
std::vector<NodeClass> node_classes(const SnapshotSequence& sequence, std::size_t slot_count);
std::vector<NodeClass> node_classes(const std::vector<LabeledEdge>& aggregated, std::size_t node_count);

/// Fraction of aggregated directed edges whose endpoints share a class.
/// Throws UndefinedMetricError on an empty edge set.
double edge_homophily(const SnapshotSequence& sequence, const std::vector<NodeClass>& classes);
double edge_homophily(const SnapshotSequence& sequence);

/// Per node, the 0-based index of the first snapshot it is active in, or -1.
std::vector<int> first_appearance(const SnapshotSequence& sequence);

struct SequenceStats {
    std::size_t nodes = 0;
    std::size_t edges = 0;
    std::size_t trust_edges = 0;
    std::size_t distrust_edges = 0;
};

SequenceStats record_stats(const EdgeList& edges);
SequenceStats sequence_stats(const SnapshotSequence& sequence);

// Versioned JSON encoding; doubles are written in shortest round-trip form.
void save_sequence(const SnapshotSequence& sequence, const std::filesystem::path& path);
SnapshotSequence load_sequence(const std::filesystem::path& path);
std::string sequence_to_json(const SnapshotSequence& sequence);
SnapshotSequence sequence_from_json(const std::string& text);

}  // namespace dgten
