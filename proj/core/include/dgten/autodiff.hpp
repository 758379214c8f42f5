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
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace dgten {

/// Dense row-major matrix of doubles. Rows index items (nodes, edges, node-slot
/// pairs); columns index features.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

namespace ad {

class Tape;

/// Handle to a value recorded on a Tape. Cheap to copy; valid while the tape lives.
class Var {
public:
    Var() = default;

    const Matrix& value() const;
    const Matrix& grad() const;
    Eigen::Index rows() const { return value().rows(); }
    Eigen::Index cols() const { return value().cols(); }
    double scalar() const;
    bool requires_grad() const;

    Tape* tape() const noexcept { return tape_; }
    std::size_t id() const noexcept { return id_; }
    bool valid() const noexcept { return tape_ != nullptr; }

private:
    friend class Tape;
    Var(Tape* tape, std::size_t id) : tape_(tape), id_(id) {}

    Tape* tape_ = nullptr;
    std::size_t id_ = 0;
};

/// Reverse-mode tape over matrix-valued nodes.
///
/// Every op evaluates eagerly and records a closure that maps the output
/// gradient to its inputs. `backward` walks the tape once in reverse.
class Tape {
public:
    using Backward = std::function<void(Tape&, const Matrix& out_grad)>;

    Tape() = default;
    Tape(const Tape&) = delete;
    Tape& operator=(const Tape&) = delete;

    Var constant(Matrix value);
    Var variable(Matrix value);
    Var scalar_constant(double value);

    /// Records an op result. `backward` runs only if some input requires grad.
    Var record(Matrix value, bool requires_grad, Backward backward);

    /// Seeds d(root)/d(root) = 1 for a 1x1 root and propagates.
    void backward(const Var& root);

    const Matrix& value(std::size_t id) const { return nodes_[id].value; }
    const Matrix& grad(std::size_t id) const;
    bool requires_grad(std::size_t id) const { return nodes_[id].requires_grad; }

    /// Adds `g` to the gradient of node `id` (no-op for constants).
    template <typename Expr>
    void accumulate(std::size_t id, const Expr& g) {
        Node& n = nodes_[id];
        if (!n.requires_grad) return;
        if (n.grad.size() == 0) {
            n.grad = g;
        } else {
            n.grad += g;
        }
    }

    std::size_t size() const noexcept { return nodes_.size(); }

private:
    struct Node {
        Matrix value;
        Matrix grad;
        bool requires_grad = false;
        Backward backward;
    };
    std::vector<Node> nodes_;
    Matrix empty_;
};

// Elementwise and linear-algebra ops. Shapes must agree exactly unless noted.
Var add(const Var& a, const Var& b);
Var sub(const Var& a, const Var& b);
Var mul(const Var& a, const Var& b);
Var scale(const Var& a, double s);
Var add_scalar(const Var& a, double s);
Var neg(const Var& a);
Var matmul(const Var& a, const Var& b);
/// a * b^T
Var matmul_nt(const Var& a, const Var& b);
/// a (r x c) + row (1 x c) broadcast over rows.
Var add_row(const Var& a, const Var& row);
/// Row i of a scaled by w(i); w is r x 1.
Var scale_rows(const Var& a, const Var& w);
/// 1x1 value broadcast to rows x cols.
Var broadcast(const Var& scalar, Eigen::Index rows, Eigen::Index cols);

Var cos(const Var& a);
Var sin(const Var& a);
Var exp(const Var& a);
Var tanh(const Var& a);
Var relu(const Var& a);
Var abs(const Var& a);
Var square(const Var& a);
Var softplus(const Var& a);
/// max(a, floor) elementwise; gradient passes where a > floor.
Var floor_max(const Var& a, double floor);
/// Elementwise product with a constant mask (dropout, gating).
Var mask(const Var& a, const Matrix& m);

Var sum(const Var& a);
Var sum_squares(const Var& a);

/// Horizontal concatenation; all parts share the row count.
Var hcat(std::span<const Var> parts);
Var gather_rows(const Var& a, std::span<const Eigen::Index> index);
/// out(index[e], :) += src(e, :); out has `rows` rows.
Var index_add(Eigen::Index rows, std::span<const Eigen::Index> index, const Var& src);

/// Interleaves per-slot matrices (N x d each) into an (N*T) x d matrix with
/// row n*T + t holding slot t of node n.
Var stack_time(std::span<const Var> slots);
/// x ((N*T) x d) + p (T x d), adding p(t, :) to every row n*T + t.
Var add_time_tiled(const Var& x, const Var& p);

inline Var operator+(const Var& a, const Var& b) { return add(a, b); }
inline Var operator-(const Var& a, const Var& b) { return sub(a, b); }
inline Var operator*(double s, const Var& a) { return scale(a, s); }
inline Var operator*(const Var& a, double s) { return scale(a, s); }

bool all_finite(const Var& v);

}  // namespace ad
}  // namespace dgten
