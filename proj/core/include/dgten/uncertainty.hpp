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
#include <iosfwd>
#include <string>
#include <vector>

#include "dgten/graph.hpp"
#include "dgten/model.hpp"

namespace dgten {

/// Layer-L sigma of every slot in `model`'s window (N x d' each), dropout off.
std::vector<Matrix> sigma_stack(const Model& model, const SnapshotSequence& sequence);

struct FingerprintRow {
    NodeId node = 0;
    std::size_t snapshot = 0;
    double mean_sigma = 0.0;
    Vector sigma;
};

struct FingerprintTable {
    std::size_t width = 0;
    std::vector<FingerprintRow> rows;  // ordered by (snapshot, node)
};

/// One row per (node, snapshot) for nodes active in that snapshot.
FingerprintTable fingerprints(const std::vector<Matrix>& sigma, const SnapshotSequence& sequence);
/// One row per (node, snapshot) for every node.
FingerprintTable fingerprints(const std::vector<Matrix>& sigma);

/// Per row, the rank (0 = largest) of each feature among the nodes of the
/// same snapshot.
std::vector<std::vector<std::size_t>> feature_ranks(const FingerprintTable& table);

/// The k nodes with the largest mean sigma over their rows; ties by id.
std::vector<NodeId> top_k_nodes(const FingerprintTable& table, std::size_t k);

/// CSV `node_id,snapshot,mean_sigma,sigma_0..` with round-trip precision.
void write_fingerprints_csv(const FingerprintTable& table, std::ostream& out);
FingerprintTable read_fingerprints_csv(std::istream& in);

struct Watchlist {
    double threshold = 0.0;
    std::vector<std::vector<NodeId>> per_snapshot;
    /// (node, number of snapshots it is listed in), by descending count then id.
    std::vector<std::pair<NodeId, std::size_t>> counts;
    std::string to_json() const;
};

/// Rows whose mean sigma is strictly above `threshold`.
Watchlist watchlist(const FingerprintTable& table, double threshold);

struct KMeansResult {
    std::vector<int> assignment;
    Matrix centroids;
    double inertia = 0.0;
};

/// Euclidean k-means with k-means++ seeding and a fixed iteration budget.
/// Throws ConfigError when k is 0 or exceeds the number of points.
KMeansResult kmeans(const Matrix& points, int k, std::uint64_t seed, int iterations = 100);

/// Rows of the table as a matrix (one sigma vector per row).
Matrix fingerprint_matrix(const FingerprintTable& table);

}  // namespace dgten
