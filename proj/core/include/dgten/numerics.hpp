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
#include <functional>
#include <string>
#include <vector>

#include "dgten/autodiff.hpp"
#include "dgten/errors.hpp"

namespace dgten {

/// [T_0(v), ..., T_K(v)] via T_k = 2v T_{k-1} - T_{k-2}. The caller keeps v in [-1, 1].
Vector chebyshev_basis(double v, int order);

namespace ad {
/// Expands every entry of v (r x c) into its Chebyshev values T_0..T_K.
/// Output is r x (c * (K+1)); column i*(K+1) + k holds T_k(v(:, i)).
Var chebyshev_expand(const Var& v, int order);
}  // namespace ad

/// Numerically stable softmax (max-shifted).
Vector softmax(const Vector& logits);

inline bool all_finite(const Vector& v) { return v.allFinite(); }
inline bool all_finite(const Matrix& v) { return v.allFinite(); }

/// Classical fourth-order Runge-Kutta from tau = 0 to tau = 1 in `steps`
/// equal steps. Works on plain Eigen values and on tape variables alike, so
/// gradients flow through every stage when `State` is ad::Var.
template <typename State, typename Field>
State rk4_integrate(State y, Field&& field, int steps) {
    if (steps < 1) throw ConfigError("rk4_integrate needs at least one step");
    const double h = 1.0 / steps;
    for (int s = 0; s < steps; ++s) {
        const State k1 = field(y);
        const State k2 = field(y + (0.5 * h) * k1);
        const State k3 = field(y + (0.5 * h) * k2);
        const State k4 = field(y + h * k3);
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!all_finite(y)) throw IntegrationError("non-finite state at step " + std::to_string(s + 1));
    }
    return y;
}

/// Named trainable tensors with one gradient slot each.
class ParamRegistry {
public:
    struct Entry {
        std::string name;
        Matrix value;
        Matrix grad;
    };

    /// Registers a tensor; names must be unique. Returns its index.
    std::size_t add(std::string name, Matrix value);

    std::size_t index_of(const std::string& name) const;
    bool contains(const std::string& name) const;

    Entry& operator[](std::size_t i) { return entries_.at(i); }
    const Entry& operator[](std::size_t i) const { return entries_.at(i); }
    Matrix& value(const std::string& name) { return entries_.at(index_of(name)).value; }
    const Matrix& value(const std::string& name) const { return entries_.at(index_of(name)).value; }

    std::size_t size() const noexcept { return entries_.size(); }
    std::size_t scalar_count() const noexcept;
    auto begin() { return entries_.begin(); }
    auto end() { return entries_.end(); }
    auto begin() const { return entries_.begin(); }
    auto end() const { return entries_.end(); }

    void zero_grad();
    double squared_norm() const;

    /// One tape variable per entry, in registration order.
    std::vector<ad::Var> bind(ad::Tape& tape) const;
    /// Copies gradients of bound variables back into the grad slots.
    void collect_grads(const std::vector<ad::Var>& bound);

private:
    std::vector<Entry> entries_;
};

/// Scalar objective over a registry. `value_and_grad` must also fill every
/// entry's grad slot.
struct Objective {
    std::function<double(const ParamRegistry&)> value;
    std::function<double(ParamRegistry&)> value_and_grad;
};

struct GradCheckOptions {
    double epsilon = 1e-5;
    /// Coordinates sampled per parameter tensor (all of them if the tensor is smaller).
    std::size_t coords_per_param = 8;
    std::uint64_t seed = 7;
    /// Only entries whose name starts with one of these prefixes; empty = all.
    std::vector<std::string> prefixes;
};

struct GradCheckResult {
    double max_relative_error = 0.0;
    std::string worst_param;
    std::size_t worst_index = 0;
    double worst_analytic = 0.0;
    double worst_numeric = 0.0;
    std::size_t coords_checked = 0;
};

/// Compares analytic gradients with central differences
/// (f(x+eps) - f(x-eps)) / 2eps on a random subset of coordinates and
/// returns max |a - n| / max(|a|, |n|, 1e-8).
GradCheckResult grad_check(const Objective& objective, ParamRegistry& params, const GradCheckOptions& options = {});

}  // namespace dgten
