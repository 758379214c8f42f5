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

#include "dgten/uncertainty.hpp"

#include <algorithm>
#include <charconv>
#include <iomanip>
#include <istream>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "dgten/errors.hpp"

namespace dgten {
namespace {

FingerprintRow make_row(const Matrix& sigma, NodeId node, std::size_t snapshot) {
    FingerprintRow r;
    r.node = node;
    r.snapshot = snapshot;
    r.sigma = sigma.row(node).transpose();
    r.mean_sigma = r.sigma.size() ? r.sigma.mean() : 0.0;
    return r;
}

std::size_t common_width(const std::vector<Matrix>& sigma) {
    if (sigma.empty()) return 0;
    for (const auto& m : sigma) {
        if (m.rows() != sigma.front().rows() || m.cols() != sigma.front().cols()) {
            throw ConfigError("sigma stack slots differ in shape");
        }
    }
    return static_cast<std::size_t>(sigma.front().cols());
}

double parse_double(std::string_view s, std::size_t line) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) throw ParseError(line, "bad number '" + std::string(s) + "'");
    return v;
}

}  // namespace

std::vector<Matrix> sigma_stack(const Model& model, const SnapshotSequence& seq) {
    if (seq.global_node_count != static_cast<std::size_t>(model.nodes())) {
        throw LookupError("sequence node count does not match the model");
    }
    const auto slots = edge_indices(seq, std::min<std::size_t>(seq.size(), static_cast<std::size_t>(model.horizon())));
    ad::Tape tape;
    const auto bound = model.bind(tape);
    return model.forward(bound, slots).sigma;
}

FingerprintTable fingerprints(const std::vector<Matrix>& sigma, const SnapshotSequence& seq) {
    FingerprintTable t;
    t.width = common_width(sigma);
    if (sigma.size() > seq.size()) throw ConfigError("more sigma slots than snapshots");
    for (std::size_t s = 0; s < sigma.size(); ++s) {
        for (NodeId v : seq.snapshots[s].active_nodes()) {
            if (v >= sigma[s].rows()) throw LookupError("active node outside the sigma stack");
            t.rows.push_back(make_row(sigma[s], v, s));
        }
    }
    return t;
}

FingerprintTable fingerprints(const std::vector<Matrix>& sigma) {
    FingerprintTable t;
    t.width = common_width(sigma);
    for (std::size_t s = 0; s < sigma.size(); ++s) {
        for (Eigen::Index v = 0; v < sigma[s].rows(); ++v) t.rows.push_back(make_row(sigma[s], static_cast<NodeId>(v), s));
    }
    return t;
}

std::vector<std::vector<std::size_t>> feature_ranks(const FingerprintTable& table) {
    std::vector<std::vector<std::size_t>> ranks(table.rows.size(), std::vector<std::size_t>(table.width));
    std::map<std::size_t, std::vector<std::size_t>> by_snapshot;
    for (std::size_t i = 0; i < table.rows.size(); ++i) by_snapshot[table.rows[i].snapshot].push_back(i);
    for (auto& [snap, idx] : by_snapshot) {
        for (std::size_t f = 0; f < table.width; ++f) {
            std::vector<std::size_t> order = idx;
            std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
                const double va = table.rows[a].sigma(static_cast<Eigen::Index>(f));
                const double vb = table.rows[b].sigma(static_cast<Eigen::Index>(f));
                return va != vb ? va > vb : table.rows[a].node < table.rows[b].node;
            });
            for (std::size_t r = 0; r < order.size(); ++r) ranks[order[r]][f] = r;
        }
    }
    return ranks;
}

std::vector<NodeId> top_k_nodes(const FingerprintTable& table, std::size_t k) {
    std::map<NodeId, std::pair<double, std::size_t>> acc;
    for (const auto& r : table.rows) {
        auto& a = acc[r.node];
        a.first += r.mean_sigma;
        ++a.second;
    }
    std::vector<std::pair<NodeId, double>> means;
    for (const auto& [node, a] : acc) means.emplace_back(node, a.first / static_cast<double>(a.second));
    std::stable_sort(means.begin(), means.end(), [](const auto& a, const auto& b) {
        return a.second != b.second ? a.second > b.second : a.first < b.first;
    });
    std::vector<NodeId> out;
    for (std::size_t i = 0; i < std::min(k, means.size()); ++i) out.push_back(means[i].first);
    return out;
}

void write_fingerprints_csv(const FingerprintTable& table, std::ostream& out) {
    out << "node_id,snapshot,mean_sigma";
    for (std::size_t f = 0; f < table.width; ++f) out << ",sigma_" << f;
    out << '\n';
    out << std::setprecision(std::numeric_limits<double>::max_digits10);
    for (const auto& r : table.rows) {
        out << r.node << ',' << r.snapshot << ',' << r.mean_sigma;
        for (Eigen::Index f = 0; f < r.sigma.size(); ++f) out << ',' << r.sigma(f);
        out << '\n';
    }
}

FingerprintTable read_fingerprints_csv(std::istream& in) {
    FingerprintTable t;
    std::string line;
    if (!std::getline(in, line)) return t;
    const auto commas = static_cast<std::size_t>(std::count(line.begin(), line.end(), ','));
    if (line.rfind("node_id,snapshot,mean_sigma", 0) != 0 || commas < 2) throw ParseError(1, "missing fingerprint header");
    t.width = commas - 2;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string_view> fields;
        std::string_view rest(line);
        while (true) {
            const auto c = rest.find(',');
            fields.push_back(rest.substr(0, c));
            if (c == std::string_view::npos) break;
            rest.remove_prefix(c + 1);
        }
        if (fields.size() != t.width + 3) throw ParseError(line_no, "wrong field count");
        FingerprintRow r;
        r.node = static_cast<NodeId>(parse_double(fields[0], line_no));
        r.snapshot = static_cast<std::size_t>(parse_double(fields[1], line_no));
        r.mean_sigma = parse_double(fields[2], line_no);
        r.sigma.resize(static_cast<Eigen::Index>(t.width));
        for (std::size_t f = 0; f < t.width; ++f) r.sigma(static_cast<Eigen::Index>(f)) = parse_double(fields[f + 3], line_no);
        t.rows.push_back(std::move(r));
    }
    return t;
}

Watchlist watchlist(const FingerprintTable& table, double threshold) {
    Watchlist w;
    w.threshold = threshold;
    std::size_t snapshots = 0;
    for (const auto& r : table.rows) snapshots = std::max(snapshots, r.snapshot + 1);
    w.per_snapshot.resize(snapshots);
    std::map<NodeId, std::size_t> counts;
    for (const auto& r : table.rows) {
        if (r.mean_sigma > threshold) {
            w.per_snapshot[r.snapshot].push_back(r.node);
            ++counts[r.node];
        }
    }
    for (auto& s : w.per_snapshot) std::sort(s.begin(), s.end());
    w.counts.assign(counts.begin(), counts.end());
    std::stable_sort(w.counts.begin(), w.counts.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
    return w;
}

std::string Watchlist::to_json() const {
    nlohmann::json snaps = nlohmann::json::array();
    for (std::size_t s = 0; s < per_snapshot.size(); ++s) {
        snaps.push_back({{"snapshot", s}, {"count", per_snapshot[s].size()}, {"nodes", per_snapshot[s]}});
    }
    nlohmann::json c = nlohmann::json::array();
    for (const auto& [node, n] : counts) c.push_back({{"node", node}, {"snapshots", n}});
    const nlohmann::json j{{"threshold", threshold}, {"per_snapshot", snaps}, {"counts", c}};
    return j.dump(2);
}

KMeansResult kmeans(const Matrix& points, int k, std::uint64_t seed, int iterations) {
    const Eigen::Index n = points.rows();
    if (k < 1 || k > n) throw ConfigError("k-means: k must be in [1, number of points]");
    std::mt19937_64 rng(seed);
    Matrix centroids(k, points.cols());

    // k-means++ seeding
    std::uniform_int_distribution<Eigen::Index> pick(0, n - 1);
    centroids.row(0) = points.row(pick(rng));
    Vector d2 = (points.rowwise() - centroids.row(0)).rowwise().squaredNorm();
    for (int c = 1; c < k; ++c) {
        const double total = d2.sum();
        Eigen::Index chosen = 0;
        if (total > 0.0) {
            std::uniform_real_distribution<double> u(0.0, total);
            double target = u(rng);
            for (chosen = 0; chosen < n - 1; ++chosen) {
                target -= d2(chosen);
                if (target <= 0.0) break;
            }
        } else {
            chosen = pick(rng);
        }
        centroids.row(c) = points.row(chosen);
        d2 = d2.cwiseMin((points.rowwise() - centroids.row(c)).rowwise().squaredNorm());
    }

    KMeansResult r;
    r.assignment.assign(static_cast<std::size_t>(n), 0);
    for (int it = 0; it < iterations; ++it) {
        bool changed = it == 0;
        for (Eigen::Index i = 0; i < n; ++i) {
            Eigen::Index best = 0;
            (centroids.rowwise() - points.row(i)).rowwise().squaredNorm().minCoeff(&best);
            if (r.assignment[static_cast<std::size_t>(i)] != static_cast<int>(best)) {
                r.assignment[static_cast<std::size_t>(i)] = static_cast<int>(best);
                changed = true;
            }
        }
        Matrix sums = Matrix::Zero(k, points.cols());
        std::vector<int> sizes(static_cast<std::size_t>(k), 0);
        for (Eigen::Index i = 0; i < n; ++i) {
            sums.row(r.assignment[static_cast<std::size_t>(i)]) += points.row(i);
            ++sizes[static_cast<std::size_t>(r.assignment[static_cast<std::size_t>(i)])];
        }
        for (int c = 0; c < k; ++c) {
            if (sizes[static_cast<std::size_t>(c)] > 0) centroids.row(c) = sums.row(c) / sizes[static_cast<std::size_t>(c)];
        }
        if (!changed) break;
    }
    r.inertia = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        r.inertia += (points.row(i) - centroids.row(r.assignment[static_cast<std::size_t>(i)])).squaredNorm();
    }
    r.centroids = std::move(centroids);
    return r;
}

Matrix fingerprint_matrix(const FingerprintTable& table) {
    Matrix m(static_cast<Eigen::Index>(table.rows.size()), static_cast<Eigen::Index>(table.width));
    for (std::size_t i = 0; i < table.rows.size(); ++i) m.row(static_cast<Eigen::Index>(i)) = table.rows[i].sigma.transpose();
    return m;
}

}  // namespace dgten
