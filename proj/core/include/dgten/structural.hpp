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
#include <random>
#include <span>
#include <vector>

#include "dgten/autodiff.hpp"
#include "dgten/graph.hpp"
#include "dgten/numerics.hpp"

namespace dgten {

/// Per-node (mu, sigma) pair; row i belongs to node i.
struct GaussianEmbedding {
    Matrix mu;
    Matrix sigma;
};

/// Edges of one snapshot in local node indices. `label` is the raw rating
/// scaled to [-1, 1].
struct EdgeIndex {
    std::vector<Eigen::Index> src;
    std::vector<Eigen::Index> dst;
    std::vector<double> label;

    std::size_t size() const noexcept { return src.size(); }
    void add(Eigen::Index from, Eigen::Index to, double scaled_label);

    /// Maps a snapshot through `local_of` (global id -> local row, -1 = absent).
    static EdgeIndex from_snapshot(const Snapshot& snapshot, std::span<const int> local_of);
};

/// Message weights for one layer. `edge_alpha[e]` is the weight of edge e in
/// its trustee's row; `self_alpha[i]` is node i's self-loop weight.
struct DefensiveCoefficients {
    std::vector<double> edge_alpha;
    std::vector<double> self_alpha;
    std::vector<int> pruned_degree;
    std::vector<double> cosine;   // shifted cosine per edge, in [0, 2]
    std::vector<double> jaccard;  // per edge
    std::vector<bool> pruned;     // both similarities below their thresholds
};

struct RaecaOptions {
    double tau_cos = 1.3;
    double jaccard_threshold = 0.05;
    double epsilon = 1e-8;
};

/// Defensive coefficients from previous-layer means.
///
/// Shifted cosine and Jaccard (on ReLU-clipped means) are computed per
/// in-edge, thresholded, fused by the quadratic mean, normalized over the
/// trustee's retained neighbors and scaled by the pruned in-degree; a unit
/// self-loop is added and every row is normalized with +epsilon.
DefensiveCoefficients raeca(const Matrix& mu_prev, const EdgeIndex& edges, const RaecaOptions& options);

namespace ad {

struct CoefficientVars {
    Var edge_alpha;  // E x 1
    Var self_alpha;  // N x 1
};

struct GaussianVars {
    Var mu;
    Var sigma;
};

/// Differentiable form of dgten::raeca; gradients flow into mu_prev.
CoefficientVars raeca(const Var& mu_prev, const EdgeIndex& edges, const RaecaOptions& options);

/// Non-robust baseline: every in-edge and the self-loop get 1 / (in-degree + 1).
CoefficientVars mean_coefficients(Tape& tape, Eigen::Index nodes, const EdgeIndex& edges);

}  // namespace ad

/// Indices into a ParamRegistry for one RFF -> (mu, log-var) head.
struct GaussianHeadParams {
    std::size_t w_freq = 0, b_freq = 0, w_mu = 0, b_mu = 0, w_sigma = 0, b_sigma = 0;
};

struct StructuralDims {
    int nodes = 0;
    int feature_dim = 32;  // f
    int hidden_dim = 32;   // d'
    int edge_dim = 32;     // d_l
    int layers = 3;
};

/// Registry handles of every structural tensor.
struct StructuralParams {
    StructuralDims dims;
    std::size_t features = 0;  // nodes x f, trainable
    bool has_projection = false;
    std::size_t w_proj = 0, b_proj = 0;
    GaussianHeadParams node_head;
    std::vector<GaussianHeadParams> edge_heads;  // one per layer
    std::vector<std::size_t> conv_w;             // d' x (2d' + 2d_l)
    std::vector<std::size_t> conv_b;             // 1 x d'

    static StructuralParams create(ParamRegistry& registry, const StructuralDims& dims, std::mt19937_64& rng);
    /// Re-resolves the handles by name (after loading a registry from disk).
    static StructuralParams attach(const ParamRegistry& registry, const StructuralDims& dims);
};

struct StructuralOptions {
    double sigma_min = 1e-4;
    RaecaOptions raeca;
    bool robust = true;
    /// Dropout on mu_concat; active only when `rng` is set.
    double dropout = 0.0;
    std::mt19937_64* rng = nullptr;
};

namespace ad {

struct GaussianHeadVars {
    Var w_freq, b_freq, w_mu, b_mu, w_sigma, b_sigma;
};

struct StructuralVars {
    Var features;
    bool has_projection = false;
    Var w_proj, b_proj;
    GaussianHeadVars node_head;
    std::vector<GaussianHeadVars> edge_heads;
    std::vector<Var> conv_w;
    std::vector<Var> conv_b;

    static StructuralVars bind(const StructuralParams& params, std::span<const Var> bound);
};

/// p = W_freq x + b_freq; rff = [cos p, sin p]; mu = W_mu rff + b_mu;
/// sigma = max(exp(0.5 (W_sigma rff + b_sigma)), sigma_min).
GaussianVars gaussian_head(const Var& input, const GaussianHeadVars& head, double sigma_min);

/// Node Gaussians from raw features (projected first when f != d').
GaussianVars init_node_gaussian(const StructuralVars& vars, double sigma_min);

/// Layer-specific edge opinion from scaled labels (E x 1).
GaussianVars edge_gaussian(const Var& labels, const GaussianHeadVars& head, double sigma_min);

/// [in | out | op_in | op_out] for mu (weights alpha) and sigma (weights |alpha|).
/// The self-loop enters the trustee (in) block. `dropout_mask` scales mu_concat.
GaussianVars aggregate(const GaussianVars& nodes, const GaussianVars& opinions, const CoefficientVars& coeffs,
                       const EdgeIndex& edges, const Matrix* dropout_mask = nullptr);

/// mu' = W c_mu + b; sigma' = |W| c_sigma; mu = ReLU(mu'); sigma = sigma' * 1[mu' > 0].
GaussianVars conv_update(const GaussianVars& concat, const Var& w, const Var& b);

/// L message-passing layers over one snapshot starting from `initial`.
/// Returns the layer-L embeddings. `coefficient_log`, when set, receives
/// the per-layer coefficient values.
GaussianVars structural_layers(const GaussianVars& initial, const StructuralVars& vars, const EdgeIndex& edges,
                               const StructuralOptions& options,
                               std::vector<DefensiveCoefficients>* coefficient_log = nullptr);

/// init_node_gaussian followed by structural_layers.
GaussianVars structural_forward(const StructuralVars& vars, const EdgeIndex& edges, const StructuralOptions& options);

}  // namespace ad
}  // namespace dgten
