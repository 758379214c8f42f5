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

#include "dgten/autodiff.hpp"

#include <cassert>
#include <cmath>
#include <utility>

#include "dgten/errors.hpp"

namespace dgten::ad {
namespace {

Tape& tape_of(const Var& a) {
    assert(a.valid());
    return *a.tape();
}

Tape& tape_of(const Var& a, const Var& b) {
    if (a.tape() != b.tape()) throw ConfigError("operands recorded on different tapes");
    return tape_of(a);
}

void require_same_shape(const Var& a, const Var& b, const char* op) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw ConfigError(std::string(op) + ": shape mismatch");
    }
}

template <typename Fwd, typename Deriv>
Var unary(const Var& a, Fwd fwd, Deriv deriv) {
    Tape& t = tape_of(a);
    const std::size_t ia = a.id();
    Matrix out = fwd(a.value());
    return t.record(std::move(out), a.requires_grad(), [ia, deriv](Tape& t, const Matrix& g) {
        t.accumulate(ia, deriv(t.value(ia), g));
    });
}

}  // namespace

const Matrix& Var::value() const { return tape_->value(id_); }
const Matrix& Var::grad() const { return tape_->grad(id_); }
bool Var::requires_grad() const { return tape_->requires_grad(id_); }

double Var::scalar() const {
    const Matrix& v = value();
    if (v.size() != 1) throw ConfigError("scalar() on a non-1x1 value");
    return v(0, 0);
}

Var Tape::constant(Matrix value) { return record(std::move(value), false, nullptr); }

Var Tape::variable(Matrix value) {
    nodes_.push_back(Node{std::move(value), Matrix{}, true, nullptr});
    return Var(this, nodes_.size() - 1);
}

Var Tape::scalar_constant(double value) { return constant(Matrix::Constant(1, 1, value)); }

Var Tape::record(Matrix value, bool requires_grad, Backward backward) {
#ifndef NDEBUG
    assert(value.allFinite() && "non-finite tensor entry");
#endif
    nodes_.push_back(Node{std::move(value), Matrix{}, requires_grad, requires_grad ? std::move(backward) : nullptr});
    return Var(this, nodes_.size() - 1);
}

const Matrix& Tape::grad(std::size_t id) const {
    const Node& n = nodes_[id];
    return n.grad.size() == 0 ? empty_ : n.grad;
}

void Tape::backward(const Var& root) {
    if (root.tape() != this) throw ConfigError("backward on a foreign tape");
    if (root.value().size() != 1) throw ConfigError("backward needs a 1x1 root");
    for (auto& n : nodes_) n.grad.resize(0, 0);
    accumulate(root.id(), Matrix::Ones(1, 1));
    for (std::size_t i = root.id() + 1; i-- > 0;) {
        Node& n = nodes_[i];
        if (!n.backward || n.grad.size() == 0) continue;
        Matrix g = std::move(n.grad);
        n.backward(*this, g);
        // Interior gradients are not kept; leaves (variables) retain theirs.
        n.grad.resize(0, 0);
    }
}

Var add(const Var& a, const Var& b) {
    require_same_shape(a, b, "add");
    Tape& t = tape_of(a, b);
    const auto ia = a.id(), ib = b.id();
    return t.record(a.value() + b.value(), a.requires_grad() || b.requires_grad(),
                    [ia, ib](Tape& t, const Matrix& g) {
                        t.accumulate(ia, g);
                        t.accumulate(ib, g);
                    });
}

Var sub(const Var& a, const Var& b) {
    require_same_shape(a, b, "sub");
    Tape& t = tape_of(a, b);
    const auto ia = a.id(), ib = b.id();
    return t.record(a.value() - b.value(), a.requires_grad() || b.requires_grad(),
                    [ia, ib](Tape& t, const Matrix& g) {
                        t.accumulate(ia, g);
                        t.accumulate(ib, -g);
                    });
}

Var mul(const Var& a, const Var& b) {
    require_same_shape(a, b, "mul");
    Tape& t = tape_of(a, b);
    const auto ia = a.id(), ib = b.id();
    return t.record(a.value().cwiseProduct(b.value()), a.requires_grad() || b.requires_grad(),
                    [ia, ib](Tape& t, const Matrix& g) {
                        if (t.requires_grad(ia)) t.accumulate(ia, g.cwiseProduct(t.value(ib)));
                        if (t.requires_grad(ib)) t.accumulate(ib, g.cwiseProduct(t.value(ia)));
                    });
}

Var scale(const Var& a, double s) {
    return unary(a, [s](const Matrix& v) -> Matrix { return v * s; },
                 [s](const Matrix&, const Matrix& g) -> Matrix { return g * s; });
}

Var add_scalar(const Var& a, double s) {
    return unary(a, [s](const Matrix& v) -> Matrix { return v.array() + s; },
                 [](const Matrix&, const Matrix& g) -> Matrix { return g; });
}

Var neg(const Var& a) { return scale(a, -1.0); }

Var matmul(const Var& a, const Var& b) {
    if (a.cols() != b.rows()) throw ConfigError("matmul: inner dimension mismatch");
    Tape& t = tape_of(a, b);
    const auto ia = a.id(), ib = b.id();
    return t.record(a.value() * b.value(), a.requires_grad() || b.requires_grad(),
                    [ia, ib](Tape& t, const Matrix& g) {
                        if (t.requires_grad(ia)) t.accumulate(ia, g * t.value(ib).transpose());
                        if (t.requires_grad(ib)) t.accumulate(ib, t.value(ia).transpose() * g);
                    });
}

Var matmul_nt(const Var& a, const Var& b) {
    if (a.cols() != b.cols()) throw ConfigError("matmul_nt: inner dimension mismatch");
    Tape& t = tape_of(a, b);
    const auto ia = a.id(), ib = b.id();
    return t.record(a.value() * b.value().transpose(), a.requires_grad() || b.requires_grad(),
                    [ia, ib](Tape& t, const Matrix& g) {
                        if (t.requires_grad(ia)) t.accumulate(ia, g * t.value(ib));
                        if (t.requires_grad(ib)) t.accumulate(ib, g.transpose() * t.value(ia));
                    });
}

Var add_row(const Var& a, const Var& row) {
    if (row.rows() != 1 || row.cols() != a.cols()) throw ConfigError("add_row: shape mismatch");
    Tape& t = tape_of(a, row);
    const auto ia = a.id(), ir = row.id();
    Matrix out = a.value().rowwise() + row.value().row(0);
    return t.record(std::move(out), a.requires_grad() || row.requires_grad(), [ia, ir](Tape& t, const Matrix& g) {
        t.accumulate(ia, g);
        if (t.requires_grad(ir)) t.accumulate(ir, g.colwise().sum());
    });
}

Var scale_rows(const Var& a, const Var& w) {
    if (w.cols() != 1 || w.rows() != a.rows()) throw ConfigError("scale_rows: weight shape mismatch");
    Tape& t = tape_of(a, w);
    const auto ia = a.id(), iw = w.id();
    Matrix out = a.value().array().colwise() * w.value().col(0).array();
    return t.record(std::move(out), a.requires_grad() || w.requires_grad(), [ia, iw](Tape& t, const Matrix& g) {
        if (t.requires_grad(ia)) {
            Matrix ga = g.array().colwise() * t.value(iw).col(0).array();
            t.accumulate(ia, ga);
        }
        if (t.requires_grad(iw)) t.accumulate(iw, g.cwiseProduct(t.value(ia)).rowwise().sum());
    });
}

Var broadcast(const Var& scalar, Eigen::Index rows, Eigen::Index cols) {
    if (scalar.value().size() != 1) throw ConfigError("broadcast needs a 1x1 value");
    Tape& t = tape_of(scalar);
    const auto is = scalar.id();
    return t.record(Matrix::Constant(rows, cols, scalar.value()(0, 0)), scalar.requires_grad(),
                    [is](Tape& t, const Matrix& g) { t.accumulate(is, Matrix::Constant(1, 1, g.sum())); });
}

Var cos(const Var& a) {
    return unary(a, [](const Matrix& v) -> Matrix { return v.array().cos(); },
                 [](const Matrix& v, const Matrix& g) -> Matrix { return -g.array() * v.array().sin(); });
}

Var sin(const Var& a) {
    return unary(a, [](const Matrix& v) -> Matrix { return v.array().sin(); },
                 [](const Matrix& v, const Matrix& g) -> Matrix { return g.array() * v.array().cos(); });
}

Var exp(const Var& a) {
    return unary(a, [](const Matrix& v) -> Matrix { return v.array().exp(); },
                 [](const Matrix& v, const Matrix& g) -> Matrix { return g.array() * v.array().exp(); });
}

Var tanh(const Var& a) {
    Tape& t = tape_of(a);
    const std::size_t ia = a.id();
    Matrix out = a.value().array().tanh();
    Matrix slope = 1.0 - out.array().square();
    return t.record(std::move(out), a.requires_grad(), [ia, slope = std::move(slope)](Tape& t, const Matrix& g) {
        t.accumulate(ia, g.cwiseProduct(slope));
    });
}

Var relu(const Var& a) {
    return unary(a, [](const Matrix& v) -> Matrix { return v.cwiseMax(0.0); },
                 [](const Matrix& v, const Matrix& g) -> Matrix {
                     return (v.array() > 0.0).select(g, Matrix::Zero(g.rows(), g.cols()));
                 });
}

Var abs(const Var& a) {
    return unary(a, [](const Matrix& v) -> Matrix { return v.cwiseAbs(); },
                 [](const Matrix& v, const Matrix& g) -> Matrix { return g.array() * v.array().sign(); });
}

Var square(const Var& a) {
    return unary(a, [](const Matrix& v) -> Matrix { return v.array().square(); },
                 [](const Matrix& v, const Matrix& g) -> Matrix { return 2.0 * g.array() * v.array(); });
}

Var softplus(const Var& a) {
    // log(1 + e^x) = max(x, 0) + log1p(e^{-|x|})
    return unary(a,
                 [](const Matrix& v) -> Matrix {
                     return v.unaryExpr([](double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); });
                 },
                 [](const Matrix& v, const Matrix& g) -> Matrix {
                     return g.array() * v.unaryExpr([](double x) { return 1.0 / (1.0 + std::exp(-x)); }).array();
                 });
}

Var floor_max(const Var& a, double floor) {
    return unary(a, [floor](const Matrix& v) -> Matrix { return v.cwiseMax(floor); },
                 [floor](const Matrix& v, const Matrix& g) -> Matrix {
                     return (v.array() > floor).select(g, Matrix::Zero(g.rows(), g.cols()));
                 });
}

Var mask(const Var& a, const Matrix& m) {
    if (m.rows() != a.rows() || m.cols() != a.cols()) throw ConfigError("mask: shape mismatch");
    return unary(a, [&m](const Matrix& v) -> Matrix { return v.cwiseProduct(m); },
                 [m](const Matrix&, const Matrix& g) -> Matrix { return g.cwiseProduct(m); });
}

Var sum(const Var& a) {
    Tape& t = tape_of(a);
    const auto ia = a.id();
    const auto r = a.rows(), c = a.cols();
    return t.record(Matrix::Constant(1, 1, a.value().sum()), a.requires_grad(),
                    [ia, r, c](Tape& t, const Matrix& g) { t.accumulate(ia, Matrix::Constant(r, c, g(0, 0))); });
}

Var sum_squares(const Var& a) {
    Tape& t = tape_of(a);
    const auto ia = a.id();
    return t.record(Matrix::Constant(1, 1, a.value().squaredNorm()), a.requires_grad(),
                    [ia](Tape& t, const Matrix& g) { t.accumulate(ia, 2.0 * g(0, 0) * t.value(ia)); });
}

Var hcat(std::span<const Var> parts) {
    if (parts.empty()) throw ConfigError("hcat of nothing");
    Tape& t = tape_of(parts.front());
    const Eigen::Index rows = parts.front().rows();
    Eigen::Index cols = 0;
    bool needs = false;
    std::vector<std::size_t> ids;
    std::vector<Eigen::Index> widths;
    for (const auto& p : parts) {
        if (p.tape() != &t || p.rows() != rows) throw ConfigError("hcat: row mismatch");
        cols += p.cols();
        needs = needs || p.requires_grad();
        ids.push_back(p.id());
        widths.push_back(p.cols());
    }
    Matrix out(rows, cols);
    Eigen::Index offset = 0;
    for (const auto& p : parts) {
        out.middleCols(offset, p.cols()) = p.value();
        offset += p.cols();
    }
    return t.record(std::move(out), needs, [ids, widths](Tape& t, const Matrix& g) {
        Eigen::Index off = 0;
        for (std::size_t k = 0; k < ids.size(); ++k) {
            if (t.requires_grad(ids[k])) t.accumulate(ids[k], g.middleCols(off, widths[k]));
            off += widths[k];
        }
    });
}

Var gather_rows(const Var& a, std::span<const Eigen::Index> index) {
    Tape& t = tape_of(a);
    const auto ia = a.id();
    const auto src_rows = a.rows();
    std::vector<Eigen::Index> idx(index.begin(), index.end());
    Matrix out(static_cast<Eigen::Index>(idx.size()), a.cols());
    for (std::size_t e = 0; e < idx.size(); ++e) {
        if (idx[e] < 0 || idx[e] >= src_rows) throw ConfigError("gather_rows: index out of range");
        out.row(static_cast<Eigen::Index>(e)) = a.value().row(idx[e]);
    }
    return t.record(std::move(out), a.requires_grad(), [ia, idx = std::move(idx), src_rows](Tape& t, const Matrix& g) {
        Matrix ga = Matrix::Zero(src_rows, g.cols());
        for (std::size_t e = 0; e < idx.size(); ++e) ga.row(idx[e]) += g.row(static_cast<Eigen::Index>(e));
        t.accumulate(ia, ga);
    });
}

Var index_add(Eigen::Index rows, std::span<const Eigen::Index> index, const Var& src) {
    if (static_cast<Eigen::Index>(index.size()) != src.rows()) throw ConfigError("index_add: index length mismatch");
    Tape& t = tape_of(src);
    const auto is = src.id();
    std::vector<Eigen::Index> idx(index.begin(), index.end());
    Matrix out = Matrix::Zero(rows, src.cols());
    for (std::size_t e = 0; e < idx.size(); ++e) {
        if (idx[e] < 0 || idx[e] >= rows) throw ConfigError("index_add: index out of range");
        out.row(idx[e]) += src.value().row(static_cast<Eigen::Index>(e));
    }
    return t.record(std::move(out), src.requires_grad(), [is, idx = std::move(idx)](Tape& t, const Matrix& g) {
        Matrix gs(static_cast<Eigen::Index>(idx.size()), g.cols());
        for (std::size_t e = 0; e < idx.size(); ++e) gs.row(static_cast<Eigen::Index>(e)) = g.row(idx[e]);
        t.accumulate(is, gs);
    });
}

Var stack_time(std::span<const Var> slots) {
    if (slots.empty()) throw ConfigError("stack_time of nothing");
    Tape& t = tape_of(slots.front());
    const auto n = slots.front().rows();
    const auto d = slots.front().cols();
    const auto steps = static_cast<Eigen::Index>(slots.size());
    std::vector<std::size_t> ids;
    bool needs = false;
    Matrix out(n * steps, d);
    for (Eigen::Index s = 0; s < steps; ++s) {
        const Var& v = slots[static_cast<std::size_t>(s)];
        if (v.tape() != &t || v.rows() != n || v.cols() != d) throw ConfigError("stack_time: shape mismatch");
        for (Eigen::Index i = 0; i < n; ++i) out.row(i * steps + s) = v.value().row(i);
        ids.push_back(v.id());
        needs = needs || v.requires_grad();
    }
    return t.record(std::move(out), needs, [ids, n, d, steps](Tape& t, const Matrix& g) {
        for (Eigen::Index s = 0; s < steps; ++s) {
            const auto id = ids[static_cast<std::size_t>(s)];
            if (!t.requires_grad(id)) continue;
            Matrix gs(n, d);
            for (Eigen::Index i = 0; i < n; ++i) gs.row(i) = g.row(i * steps + s);
            t.accumulate(id, gs);
        }
    });
}

Var add_time_tiled(const Var& x, const Var& p) {
    const auto steps = p.rows();
    if (p.cols() != x.cols() || steps == 0 || x.rows() % steps != 0) throw ConfigError("add_time_tiled: shape mismatch");
    Tape& t = tape_of(x, p);
    const auto ix = x.id(), ip = p.id();
    Matrix out = x.value();
    for (Eigen::Index r = 0; r < out.rows(); ++r) out.row(r) += p.value().row(r % steps);
    return t.record(std::move(out), x.requires_grad() || p.requires_grad(), [ix, ip, steps](Tape& t, const Matrix& g) {
        t.accumulate(ix, g);
        if (t.requires_grad(ip)) {
            Matrix gp = Matrix::Zero(steps, g.cols());
            for (Eigen::Index r = 0; r < g.rows(); ++r) gp.row(r % steps) += g.row(r);
            t.accumulate(ip, gp);
        }
    });
}

bool all_finite(const Var& v) { return v.value().allFinite(); }

}  // namespace dgten::ad
