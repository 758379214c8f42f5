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

#include "dgten/structural.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "dgten/errors.hpp"

namespace dgten {
namespace {

Matrix normal(Eigen::Index rows, Eigen::Index cols, double stddev, std::mt19937_64& rng) {
    std::normal_distribution<double> dist(0.0, stddev);
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = dist(rng);
    return m;
}

Matrix uniform(Eigen::Index rows, Eigen::Index cols, double lo, double hi, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> dist(lo, hi);
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = dist(rng);
    return m;
}

// Glorot uniform for an (out x in) weight.
Matrix xavier(Eigen::Index out, Eigen::Index in, std::mt19937_64& rng) {
    const double a = std::sqrt(6.0 / static_cast<double>(in + out));
    return uniform(out, in, -a, a, rng);
}

GaussianHeadParams create_head(ParamRegistry& reg, const std::string& prefix, int in_dim, int width,
                               double freq_std, std::mt19937_64& rng) {
    GaussianHeadParams h;
    h.w_freq = reg.add(prefix + ".w_freq", normal(width / 2, in_dim, freq_std, rng));
    h.b_freq = reg.add(prefix + ".b_freq", uniform(1, width / 2, 0.0, 2.0 * std::numbers::pi, rng));
    h.w_mu = reg.add(prefix + ".w_mu", xavier(width, width, rng));
    h.b_mu = reg.add(prefix + ".b_mu", Matrix::Zero(1, width));
    h.w_sigma = reg.add(prefix + ".w_sigma", xavier(width, width, rng));
    h.b_sigma = reg.add(prefix + ".b_sigma", Matrix::Zero(1, width));
    return h;
}

GaussianHeadParams attach_head(const ParamRegistry& reg, const std::string& prefix) {
    GaussianHeadParams h;
    h.w_freq = reg.index_of(prefix + ".w_freq");
    h.b_freq = reg.index_of(prefix + ".b_freq");
    h.w_mu = reg.index_of(prefix + ".w_mu");
    h.b_mu = reg.index_of(prefix + ".b_mu");
    h.w_sigma = reg.index_of(prefix + ".w_sigma");
    h.b_sigma = reg.index_of(prefix + ".b_sigma");
    return h;
}

void check_dims(const StructuralDims& d) {
    if (d.nodes < 1) throw ConfigError("structural: need at least one node");
    if (d.layers < 1) throw ConfigError("structural: layers must be >= 1");
    if (d.hidden_dim < 2 || d.hidden_dim % 2) throw ConfigError("structural: hidden_dim must be even");
    if (d.edge_dim < 2 || d.edge_dim % 2) throw ConfigError("structural: edge_dim must be even");
    if (d.feature_dim < 1) throw ConfigError("structural: feature_dim must be >= 1");
}

std::string edge_prefix(int layer) { return "structural.edge" + std::to_string(layer); }
std::string conv_prefix(int layer) { return "structural.conv" + std::to_string(layer); }

}  // namespace

StructuralParams StructuralParams::create(ParamRegistry& reg, const StructuralDims& dims, std::mt19937_64& rng) {
    check_dims(dims);
    StructuralParams p;
    p.dims = dims;
    p.features = reg.add("structural.features", normal(dims.nodes, dims.feature_dim, 0.1, rng));
    p.has_projection = dims.feature_dim != dims.hidden_dim;
    if (p.has_projection) {
        p.w_proj = reg.add("structural.proj.w", xavier(dims.hidden_dim, dims.feature_dim, rng));
        p.b_proj = reg.add("structural.proj.b", Matrix::Zero(1, dims.hidden_dim));
    }
    p.node_head = create_head(reg, "structural.node", dims.hidden_dim, dims.hidden_dim, 1.0, rng);
    const int conv_in = 2 * dims.hidden_dim + 2 * dims.edge_dim;
    for (int k = 0; k < dims.layers; ++k) {
        p.edge_heads.push_back(create_head(reg, edge_prefix(k), 1, dims.edge_dim, 2.0, rng));
        p.conv_w.push_back(reg.add(conv_prefix(k) + ".w", xavier(dims.hidden_dim, conv_in, rng)));
        p.conv_b.push_back(reg.add(conv_prefix(k) + ".b", Matrix::Zero(1, dims.hidden_dim)));
    }
    return p;
}

StructuralParams StructuralParams::attach(const ParamRegistry& reg, const StructuralDims& dims) {
    check_dims(dims);
    StructuralParams p;
    p.dims = dims;
    p.features = reg.index_of("structural.features");
    p.has_projection = dims.feature_dim != dims.hidden_dim;
    if (p.has_projection) {
        p.w_proj = reg.index_of("structural.proj.w");
        p.b_proj = reg.index_of("structural.proj.b");
    }
    p.node_head = attach_head(reg, "structural.node");
    for (int k = 0; k < dims.layers; ++k) {
        p.edge_heads.push_back(attach_head(reg, edge_prefix(k)));
        p.conv_w.push_back(reg.index_of(conv_prefix(k) + ".w"));
        p.conv_b.push_back(reg.index_of(conv_prefix(k) + ".b"));
    }
    const Matrix& x = reg[p.features].value;
    if (x.rows() != dims.nodes || x.cols() != dims.feature_dim) {
        throw ConfigError("structural: stored feature table does not match dimensions");
    }
    return p;
}

namespace ad {
namespace {

GaussianHeadVars bind_head(const GaussianHeadParams& h, std::span<const Var> bound) {
    return {bound[h.w_freq], bound[h.b_freq], bound[h.w_mu], bound[h.b_mu], bound[h.w_sigma], bound[h.b_sigma]};
}

}  // namespace

StructuralVars StructuralVars::bind(const StructuralParams& p, std::span<const Var> bound) {
    StructuralVars v;
    v.features = bound[p.features];
    v.has_projection = p.has_projection;
    if (p.has_projection) {
        v.w_proj = bound[p.w_proj];
        v.b_proj = bound[p.b_proj];
    }
    v.node_head = bind_head(p.node_head, bound);
    for (const auto& h : p.edge_heads) v.edge_heads.push_back(bind_head(h, bound));
    for (auto i : p.conv_w) v.conv_w.push_back(bound[i]);
    for (auto i : p.conv_b) v.conv_b.push_back(bound[i]);
    return v;
}

GaussianVars gaussian_head(const Var& input, const GaussianHeadVars& head, double sigma_min) {
    const Var p = add_row(matmul_nt(input, head.w_freq), head.b_freq);
    const Var parts[] = {cos(p), sin(p)};
    const Var rff = hcat(parts);
    const Var mu = add_row(matmul_nt(rff, head.w_mu), head.b_mu);
    const Var log_var = add_row(matmul_nt(rff, head.w_sigma), head.b_sigma);
    return {mu, floor_max(exp(scale(log_var, 0.5)), sigma_min)};
}

GaussianVars init_node_gaussian(const StructuralVars& vars, double sigma_min) {
    Var x = vars.features;
    if (vars.has_projection) x = add_row(matmul_nt(x, vars.w_proj), vars.b_proj);
    return gaussian_head(x, vars.node_head, sigma_min);
}

GaussianVars edge_gaussian(const Var& labels, const GaussianHeadVars& head, double sigma_min) {
    return gaussian_head(labels, head, sigma_min);
}

GaussianVars aggregate(const GaussianVars& nodes, const GaussianVars& opinions, const CoefficientVars& coeffs,
                       const EdgeIndex& edges, const Matrix* dropout_mask) {
    const Eigen::Index n = nodes.mu.rows();
    if (opinions.mu.rows() != static_cast<Eigen::Index>(edges.size()) ||
        coeffs.edge_alpha.rows() != static_cast<Eigen::Index>(edges.size()) || coeffs.self_alpha.rows() != n) {
        throw ConfigError("aggregate: edge count mismatch");
    }
    const std::span<const Eigen::Index> src(edges.src);
    const std::span<const Eigen::Index> dst(edges.dst);

    auto blocks = [&](const Var& node_val, const Var& op_val, const Var& alpha, const Var& self) {
        const Var in = index_add(n, dst, scale_rows(gather_rows(node_val, src), alpha)) + scale_rows(node_val, self);
        const Var out = index_add(n, src, scale_rows(gather_rows(node_val, dst), alpha));
        const Var weighted_op = scale_rows(op_val, alpha);
        const Var parts[] = {in, out, index_add(n, dst, weighted_op), index_add(n, src, weighted_op)};
        return hcat(parts);
    };

    Var mu = blocks(nodes.mu, opinions.mu, coeffs.edge_alpha, coeffs.self_alpha);
    Var sigma = blocks(nodes.sigma, opinions.sigma, abs(coeffs.edge_alpha), abs(coeffs.self_alpha));
    if (dropout_mask != nullptr) mu = mask(mu, *dropout_mask);
    return {mu, sigma};
}

GaussianVars conv_update(const GaussianVars& concat, const Var& w, const Var& b) {
    const Var pre = add_row(matmul_nt(concat.mu, w), b);
    const Var sigma_pre = matmul_nt(concat.sigma, abs(w));
    const Matrix gate = (pre.value().array() > 0.0).cast<double>().matrix();
    return {relu(pre), mask(sigma_pre, gate)};
}

GaussianVars structural_layers(const GaussianVars& initial, const StructuralVars& vars, const EdgeIndex& edges,
                               const StructuralOptions& options, std::vector<DefensiveCoefficients>* coefficient_log) {
    Tape& tape = *initial.mu.tape();
    Matrix labels(static_cast<Eigen::Index>(edges.size()), 1);
    for (std::size_t e = 0; e < edges.size(); ++e) labels(static_cast<Eigen::Index>(e), 0) = edges.label[e];
    const Var label_var = tape.constant(std::move(labels));

    GaussianVars h = initial;
    for (std::size_t k = 0; k < vars.conv_w.size(); ++k) {
        const GaussianVars op = edge_gaussian(label_var, vars.edge_heads[k], options.sigma_min);
        const CoefficientVars coeffs = options.robust ? raeca(h.mu, edges, options.raeca)
                                                      : mean_coefficients(tape, h.mu.rows(), edges);
        if (coefficient_log != nullptr) coefficient_log->push_back(dgten::raeca(h.mu.value(), edges, options.raeca));

        Matrix drop;
        const Matrix* drop_ptr = nullptr;
        if (options.rng != nullptr && options.dropout > 0.0) {
            const Eigen::Index width = 2 * h.mu.cols() + 2 * op.mu.cols();
            std::bernoulli_distribution keep(1.0 - options.dropout);
            drop.resize(h.mu.rows(), width);
            const double s = 1.0 / (1.0 - options.dropout);
            for (Eigen::Index i = 0; i < drop.size(); ++i) drop.data()[i] = keep(*options.rng) ? s : 0.0;
            drop_ptr = &drop;
        }
        h = conv_update(aggregate(h, op, coeffs, edges, drop_ptr), vars.conv_w[k], vars.conv_b[k]);
    }
    return h;
}

GaussianVars structural_forward(const StructuralVars& vars, const EdgeIndex& edges, const StructuralOptions& options) {
    return structural_layers(init_node_gaussian(vars, options.sigma_min), vars, edges, options);
}

}  // namespace ad
}  // namespace dgten
