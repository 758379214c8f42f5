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
#include "dgten/numerics.hpp"

namespace dgten {

struct TemporalDims {
    int horizon = 1;      // T_max, rows of the absolute table
    int hidden_dim = 32;  // d'
    int heads = 20;
    int head_dim = 8;
    int cheb_order = 3;
};

/// Registry handles of every temporal tensor. KAN coefficient tensors are
/// stored as (d_in * (K+1)) x d_out with row i*(K+1) + k; the q/k/v maps of
/// all heads share one tensor each, head h owning columns [h*d_h, (h+1)*d_h).
struct TemporalParams {
    TemporalDims dims;
    std::size_t hagh_table = 0;   // T_max x d'
    std::size_t hagh_center = 0;  // 1 x 1
    std::size_t hagh_width = 0;   // 1 x 1, pre-softplus
    std::size_t hagh_w_gau = 0;   // 1 x d'
    std::size_t hagh_w_hour = 0;  // 1 x d'
    std::size_t kan_q = 0, kan_k = 0, kan_v = 0;
    std::size_t kan_o = 0;
    std::size_t ode_w1 = 0, ode_b1 = 0, ode_w2 = 0, ode_b2 = 0;

    static TemporalParams create(ParamRegistry& registry, const TemporalDims& dims, std::mt19937_64& rng);
    static TemporalParams attach(const ParamRegistry& registry, const TemporalDims& dims);
};

/// Inverse of softplus, for initializing the width parameter.
double softplus_inverse(double y);

struct AttentionOptions {
    int heads = 1;
    int head_dim = 1;
    /// Dropout on attention weights; active only when `rng` is set.
    double dropout = 0.0;
    std::mt19937_64* rng = nullptr;
};

namespace ad {

struct HaghVars {
    Var table, center, width, w_gau, w_hour;
};

struct OdeVars {
    Var w1, b1, w2, b2;
};

struct TemporalVars {
    HaghVars hagh;
    Var kan_q, kan_k, kan_v, kan_o;
    OdeVars ode;
    int cheb_order = 3;

    static TemporalVars bind(const TemporalParams& params, std::span<const Var> bound);
};

/// T x d' positional encoding: table row + Gaussian bump + hourglass envelope.
Var hagh_encode(const HaghVars& hagh, int steps);

/// Chebyshev-KAN on each row of `input` (r x d_in): tanh, basis expansion,
/// then a linear map by `theta` ((d_in*(K+1)) x d_out).
Var kan_apply(const Var& input, const Var& theta, int order);

/// Causal scaled dot-product attention over node-major rows (row n*T + t).
/// q, k, v are (N*T) x (H*d_h). Returns the concatenated head outputs.
/// `weights`, when set, receives the (pre-dropout) weights with row
/// (n*H + h)*T + t and column s.
Var causal_attention(const Var& q, const Var& k, const Var& v, Eigen::Index steps, const AttentionOptions& options,
                     Matrix* weights = nullptr);

/// Vector field f(h) = W2 tanh(W1 h + b1) + b2 applied row-wise.
Var ode_field(const Var& h, const OdeVars& ode);

/// Z = H + RK4(X - H) over tau in [0, 1] with `steps` steps.
Var ode_refine(const Var& x, const Var& h, const OdeVars& ode, int steps);

/// X ((N*T) x d') -> Z. The positional encoding is added, attention runs
/// with KAN projections and a residual, and the ODE refines the residual
/// against X.
Var temporal_forward(const Var& x, Eigen::Index steps, const TemporalVars& vars, const AttentionOptions& attention,
                     int ode_steps, Matrix* weights = nullptr);

}  // namespace ad
}  // namespace dgten
