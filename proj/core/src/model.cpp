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

#include "dgten/model.hpp"

#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

#include "dgten/errors.hpp"

namespace dgten {

void EdgeBatch::add(Eigen::Index n, Eigen::Index p, Eigen::Index t, double label, double w) {
    trustor.push_back(n);
    trustee.push_back(p);
    slot.push_back(t);
    target.push_back(label);
    weight.push_back(w);
}

Model::Model(const TrainConfig& config, int nodes, int horizon, std::uint64_t seed)
    : config_(config), nodes_(nodes), horizon_(horizon) {
    config_.validate();
    if (nodes < 1) throw ConfigError("model needs at least one node");
    if (horizon < 1) throw ConfigError("model horizon must be >= 1");
    std::mt19937_64 rng(seed);
    structural_ = StructuralParams::create(params_, structural_dims(), rng);
    temporal_ = TemporalParams::create(params_, temporal_dims(), rng);
    const double a = std::sqrt(6.0 / (2.0 * config_.hidden_dim + 1.0));
    std::uniform_real_distribution<double> dist(-a, a);
    Matrix w(1, 2 * config_.hidden_dim);
    for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = dist(rng);
    head_w_ = params_.add("head.w", std::move(w));
    head_b_ = params_.add("head.b", Matrix::Zero(1, 1));
}

StructuralDims Model::structural_dims() const {
    return {nodes_, config_.feature_dim, config_.hidden_dim, config_.hidden_dim, config_.layers};
}

TemporalDims Model::temporal_dims() const {
    return {horizon_, config_.hidden_dim, config_.heads, config_.head_dim, config_.cheb_order};
}

void Model::attach() {
    structural_ = StructuralParams::attach(params_, structural_dims());
    temporal_ = TemporalParams::attach(params_, temporal_dims());
    head_w_ = params_.index_of("head.w");
    head_b_ = params_.index_of("head.b");
}

Model::Bound Model::bind(ad::Tape& tape) const {
    Bound b;
    b.all = params_.bind(tape);
    b.structural = ad::StructuralVars::bind(structural_, b.all);
    b.temporal = ad::TemporalVars::bind(temporal_, b.all);
    b.head_w = b.all[head_w_];
    b.head_b = b.all[head_b_];
    return b;
}

Model::Output Model::forward(const Bound& bound, std::span<const EdgeIndex> slots, std::mt19937_64* rng,
                             Matrix* attention_weights) const {
    if (slots.empty() || static_cast<int>(slots.size()) > horizon_) {
        throw ConfigError("forward: slot count must be in [1, horizon]");
    }
    StructuralOptions so;
    so.sigma_min = config_.sigma_min;
    so.raeca = {config_.tau_cos, config_.jaccard_threshold, config_.epsilon};
    so.robust = config_.robust_aggregation;
    so.dropout = config_.dropout;
    so.rng = rng;

    const ad::GaussianVars initial = ad::init_node_gaussian(bound.structural, config_.sigma_min);
    Output out;
    out.steps = static_cast<Eigen::Index>(slots.size());
    std::vector<ad::Var> means;
    for (const EdgeIndex& edges : slots) {
        const ad::GaussianVars h = ad::structural_layers(initial, bound.structural, edges, so);
        means.push_back(h.mu);
        out.sigma.push_back(h.sigma.value());
    }
    const ad::Var x = ad::stack_time(means);

    AttentionOptions ao;
    ao.heads = config_.heads;
    ao.head_dim = config_.head_dim;
    ao.dropout = config_.dropout;
    ao.rng = rng;
    out.z = ad::temporal_forward(x, out.steps, bound.temporal, ao, config_.ode_steps, attention_weights);
    return out;
}

void Model::save(const std::filesystem::path& path) const {
    nlohmann::json params = nlohmann::json::array();
    for (const auto& e : params_) {
        params.push_back({{"name", e.name},
                          {"rows", e.value.rows()},
                          {"cols", e.value.cols()},
                          {"data", std::vector<double>(e.value.data(), e.value.data() + e.value.size())}});
    }
    const nlohmann::json j{{"format", "dgten-model"},
                           {"version", 1},
                           {"config", nlohmann::json::parse(config_.to_json())},
                           {"nodes", nodes_},
                           {"horizon", horizon_},
                           {"params", params}};
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write model " + path.string());
    out << j.dump() << '\n';
}

Model Model::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open model " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("model file: ") + e.what());
    }
    if (j.value("format", "") != "dgten-model" || j.value("version", 0) != 1) {
        throw ConfigError("not a version-1 dgten model file");
    }
    Model m;
    try {
        m.config_ = TrainConfig::from_json(j.at("config").dump());
        m.nodes_ = j.at("nodes").get<int>();
        m.horizon_ = j.at("horizon").get<int>();
        for (const auto& p : j.at("params")) {
            const auto rows = p.at("rows").get<Eigen::Index>();
            const auto cols = p.at("cols").get<Eigen::Index>();
            const auto data = p.at("data").get<std::vector<double>>();
            if (static_cast<Eigen::Index>(data.size()) != rows * cols) throw ConfigError("model tensor size mismatch");
            Matrix value(rows, cols);
            std::copy(data.begin(), data.end(), value.data());
            m.params_.add(p.at("name").get<std::string>(), std::move(value));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("model file: ") + e.what());
    }
    m.attach();
    return m;
}

std::vector<EdgeIndex> edge_indices(const SnapshotSequence& sequence, std::size_t slot_count) {
    if (slot_count > sequence.size()) throw ConfigError("edge_indices: slot count exceeds the sequence");
    std::vector<int> identity(sequence.global_node_count);
    std::iota(identity.begin(), identity.end(), 0);
    std::vector<EdgeIndex> out;
    out.reserve(slot_count);
    for (std::size_t t = 0; t < slot_count; ++t) out.push_back(EdgeIndex::from_snapshot(sequence.snapshots[t], identity));
    return out;
}

namespace ad {

Var predict_logits(const Var& z, Eigen::Index steps, const EdgeBatch& batch, const Var& head_w, const Var& head_b) {
    const Eigen::Index nodes = z.rows() / steps;
    std::vector<Eigen::Index> rows_n(batch.size()), rows_p(batch.size());
    for (std::size_t e = 0; e < batch.size(); ++e) {
        if (batch.trustor[e] < 0 || batch.trustor[e] >= nodes || batch.trustee[e] < 0 || batch.trustee[e] >= nodes) {
            throw LookupError("edge endpoint is not a known node");
        }
        if (batch.slot[e] < 0 || batch.slot[e] >= steps) throw ConfigError("edge slot outside the embedded window");
        rows_n[e] = batch.trustor[e] * steps + batch.slot[e];
        rows_p[e] = batch.trustee[e] * steps + batch.slot[e];
    }
    const Var parts[] = {gather_rows(z, rows_n), gather_rows(z, rows_p)};
    const Var pair = hcat(parts);
    const Var bias = broadcast(head_b, static_cast<Eigen::Index>(batch.size()), 1);
    return matmul_nt(pair, head_w) + bias;
}

Var weighted_bce(const Var& logits, std::span<const double> targets, std::span<const double> weights) {
    const Eigen::Index n = logits.rows();
    if (logits.cols() != 1 || static_cast<Eigen::Index>(targets.size()) != n ||
        static_cast<Eigen::Index>(weights.size()) != n) {
        throw ConfigError("weighted_bce: size mismatch");
    }
    Tape& tape = *logits.tape();
    const Matrix& y = logits.value();
    // -[r log s(y) + (1-r) log(1 - s(y))] = softplus(y) - r y
    double total = 0.0;
    for (Eigen::Index e = 0; e < n; ++e) {
        const double v = y(e, 0);
        const double sp = std::max(v, 0.0) + std::log1p(std::exp(-std::abs(v)));
        total += weights[static_cast<std::size_t>(e)] * (sp - targets[static_cast<std::size_t>(e)] * v);
    }
    const auto il = logits.id();
    std::vector<double> r(targets.begin(), targets.end());
    std::vector<double> w(weights.begin(), weights.end());
    return tape.record(Matrix::Constant(1, 1, total), logits.requires_grad(),
                       [il, r = std::move(r), w = std::move(w)](Tape& t, const Matrix& g) {
                           const Matrix& y = t.value(il);
                           Matrix gy(y.rows(), 1);
                           for (Eigen::Index e = 0; e < y.rows(); ++e) {
                               const double s = 1.0 / (1.0 + std::exp(-y(e, 0)));
                               gy(e, 0) = g(0, 0) * w[static_cast<std::size_t>(e)] * (s - r[static_cast<std::size_t>(e)]);
                           }
                           t.accumulate(il, gy);
                       });
}

}  // namespace ad
}  // namespace dgten
