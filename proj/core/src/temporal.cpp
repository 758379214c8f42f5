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

#include "dgten/temporal.hpp"

#include <cmath>
#include <memory>
#include <numeric>

#include "dgten/errors.hpp"

namespace dgten {
namespace {

Matrix uniform(Eigen::Index rows, Eigen::Index cols, double a, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> dist(-a, a);
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = dist(rng);
    return m;
}

Matrix glorot(Eigen::Index rows, Eigen::Index cols, Eigen::Index fan_in, Eigen::Index fan_out, std::mt19937_64& rng) {
    return uniform(rows, cols, std::sqrt(6.0 / static_cast<double>(fan_in + fan_out)), rng);
}

void check_dims(const TemporalDims& d) {
    if (d.horizon < 1) throw ConfigError("temporal: horizon must be >= 1");
    if (d.hidden_dim < 1 || d.heads < 1 || d.head_dim < 1) throw ConfigError("temporal: widths must be >= 1");
    if (d.cheb_order < 0) throw ConfigError("temporal: Chebyshev order must be >= 0");
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

double softplus_inverse(double y) {
    if (y <= 0.0) throw ConfigError("softplus_inverse needs y > 0");
    return y > 30.0 ? y : std::log(std::expm1(y));
}

TemporalParams TemporalParams::create(ParamRegistry& reg, const TemporalDims& dims, std::mt19937_64& rng) {
    check_dims(dims);
    TemporalParams p;
    p.dims = dims;
    const int d = dims.hidden_dim;
    const int width = dims.heads * dims.head_dim;
    const int basis = dims.cheb_order + 1;
    const double steps = dims.horizon;

    std::normal_distribution<double> table_dist(0.0, 0.02);
    Matrix table(dims.horizon, d);
    for (Eigen::Index i = 0; i < table.size(); ++i) table.data()[i] = table_dist(rng);
    p.hagh_table = reg.add("temporal.hagh.table", std::move(table));
    p.hagh_center = reg.add("temporal.hagh.center", Matrix::Constant(1, 1, (steps - 1.0) / 2.0));
    p.hagh_width = reg.add("temporal.hagh.width", Matrix::Constant(1, 1, softplus_inverse(steps / 4.0)));
    p.hagh_w_gau = reg.add("temporal.hagh.w_gau", Matrix::Zero(1, d));
    p.hagh_w_hour = reg.add("temporal.hagh.w_hour", Matrix::Zero(1, d));

    p.kan_q = reg.add("temporal.kan_q", glorot(d * basis, width, d * basis, width, rng));
    p.kan_k = reg.add("temporal.kan_k", glorot(d * basis, width, d * basis, width, rng));
    p.kan_v = reg.add("temporal.kan_v", glorot(d * basis, width, d * basis, width, rng));
    p.kan_o = reg.add("temporal.kan_o", glorot(width * basis, d, width * basis, d, rng));

    p.ode_w1 = reg.add("temporal.ode.w1", glorot(d, d, d, d, rng));
    p.ode_b1 = reg.add("temporal.ode.b1", Matrix::Zero(1, d));
    p.ode_w2 = reg.add("temporal.ode.w2", glorot(d, d, d, d, rng));
    p.ode_b2 = reg.add("temporal.ode.b2", Matrix::Zero(1, d));
    return p;
}

TemporalParams TemporalParams::attach(const ParamRegistry& reg, const TemporalDims& dims) {
    check_dims(dims);
    TemporalParams p;
    p.dims = dims;
    p.hagh_table = reg.index_of("temporal.hagh.table");
    p.hagh_center = reg.index_of("temporal.hagh.center");
    p.hagh_width = reg.index_of("temporal.hagh.width");
    p.hagh_w_gau = reg.index_of("temporal.hagh.w_gau");
    p.hagh_w_hour = reg.index_of("temporal.hagh.w_hour");
    p.kan_q = reg.index_of("temporal.kan_q");
    p.kan_k = reg.index_of("temporal.kan_k");
    p.kan_v = reg.index_of("temporal.kan_v");
    p.kan_o = reg.index_of("temporal.kan_o");
    p.ode_w1 = reg.index_of("temporal.ode.w1");
    p.ode_b1 = reg.index_of("temporal.ode.b1");
    p.ode_w2 = reg.index_of("temporal.ode.w2");
    p.ode_b2 = reg.index_of("temporal.ode.b2");
    const int basis = dims.cheb_order + 1;
    if (reg[p.hagh_table].value.rows() != dims.horizon ||
        reg[p.kan_q].value.rows() != dims.hidden_dim * basis ||
        reg[p.kan_q].value.cols() != dims.heads * dims.head_dim) {
        throw ConfigError("temporal: stored tensors do not match dimensions");
    }
    return p;
}

namespace ad {
namespace {

// exp(-(t - mu)^2 / (2 sigma^2)) for t = 0..steps-1, sigma = softplus(rho).
Var gaussian_profile(const Var& center, const Var& width_raw, int steps) {
    Tape& tape = *center.tape();
    const double mu = center.scalar();
    const double rho = width_raw.scalar();
    const double sigma = std::max(rho, 0.0) + std::log1p(std::exp(-std::abs(rho)));
    Matrix g(steps, 1);
    for (int t = 0; t < steps; ++t) {
        const double d = t - mu;
        g(t, 0) = std::exp(-d * d / (2.0 * sigma * sigma));
    }
    const auto ic = center.id(), iw = width_raw.id();
    return tape.record(g, center.requires_grad() || width_raw.requires_grad(),
                       [ic, iw, mu, rho, sigma, g, steps](Tape& t, const Matrix& grad) {
                           double g_mu = 0.0, g_sigma = 0.0;
                           for (int s = 0; s < steps; ++s) {
                               const double d = s - mu;
                               const double upstream = grad(s, 0) * g(s, 0);
                               g_mu += upstream * d / (sigma * sigma);
                               g_sigma += upstream * d * d / (sigma * sigma * sigma);
                           }
                           t.accumulate(ic, Matrix::Constant(1, 1, g_mu));
                           t.accumulate(iw, Matrix::Constant(1, 1, g_sigma * sigmoid(rho)));
                       });
}

}  // namespace

TemporalVars TemporalVars::bind(const TemporalParams& p, std::span<const Var> bound) {
    TemporalVars v;
    v.hagh = {bound[p.hagh_table], bound[p.hagh_center], bound[p.hagh_width], bound[p.hagh_w_gau],
              bound[p.hagh_w_hour]};
    v.kan_q = bound[p.kan_q];
    v.kan_k = bound[p.kan_k];
    v.kan_v = bound[p.kan_v];
    v.kan_o = bound[p.kan_o];
    v.ode = {bound[p.ode_w1], bound[p.ode_b1], bound[p.ode_w2], bound[p.ode_b2]};
    v.cheb_order = p.dims.cheb_order;
    return v;
}

Var hagh_encode(const HaghVars& hagh, int steps) {
    if (steps < 1 || steps > hagh.table.rows()) throw ConfigError("hagh_encode: horizon exceeds the table");
    Tape& tape = *hagh.table.tape();
    std::vector<Eigen::Index> rows(static_cast<std::size_t>(steps));
    std::iota(rows.begin(), rows.end(), Eigen::Index{0});

    Matrix hour(steps, 1);
    const double c = (steps - 1) / 2.0;
    for (int t = 0; t < steps; ++t) {
        hour(t, 0) = steps == 1 ? 1.0 : 1.0 - 2.0 * std::abs(t - c) / (steps - 1);
    }
    const Var absolute = gather_rows(hagh.table, rows);
    const Var gauss = matmul(gaussian_profile(hagh.center, hagh.width, steps), hagh.w_gau);
    const Var hourglass = matmul(tape.constant(std::move(hour)), hagh.w_hour);
    return absolute + gauss + hourglass;
}

Var kan_apply(const Var& input, const Var& theta, int order) {
    if (theta.rows() != input.cols() * (order + 1)) throw ConfigError("kan_apply: coefficient shape mismatch");
    return matmul(chebyshev_expand(tanh(input), order), theta);
}

Var causal_attention(const Var& q, const Var& k, const Var& v, Eigen::Index steps, const AttentionOptions& options,
                     Matrix* weights) {
    const Eigen::Index heads = options.heads;
    const Eigen::Index dh = options.head_dim;
    if (q.cols() != heads * dh || k.cols() != q.cols() || v.cols() != q.cols() || k.rows() != q.rows() ||
        v.rows() != q.rows() || steps < 1 || q.rows() % steps != 0) {
        throw ConfigError("causal_attention: shape mismatch");
    }
    Tape& tape = *q.tape();
    const Eigen::Index nodes = q.rows() / steps;
    const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
    const bool train = options.rng != nullptr && options.dropout > 0.0;
    const double keep_scale = train ? 1.0 / (1.0 - options.dropout) : 1.0;

    // Row (n*H + h)*T + t, column s; lower triangular.
    auto probs = std::make_shared<Matrix>(Matrix::Zero(nodes * heads * steps, steps));
    auto drop = std::make_shared<Matrix>();
    if (train) drop->setZero(nodes * heads * steps, steps);
    std::bernoulli_distribution keep(1.0 - options.dropout);

    const Matrix& qv = q.value();
    const Matrix& kv = k.value();
    const Matrix& vv = v.value();
    Matrix out = Matrix::Zero(q.rows(), q.cols());
    Vector logits;
    for (Eigen::Index n = 0; n < nodes; ++n) {
        for (Eigen::Index h = 0; h < heads; ++h) {
            const auto qb = qv.block(n * steps, h * dh, steps, dh);
            const auto kb = kv.block(n * steps, h * dh, steps, dh);
            const auto vb = vv.block(n * steps, h * dh, steps, dh);
            const Eigen::Index base = (n * heads + h) * steps;
            for (Eigen::Index t = 0; t < steps; ++t) {
                logits = (kb.topRows(t + 1) * qb.row(t).transpose()) * scale;
                const Vector a = softmax(logits);
                probs->row(base + t).head(t + 1) = a.transpose();
                Vector used = a;
                if (train) {
                    for (Eigen::Index s = 0; s <= t; ++s) {
                        const double m = keep(*options.rng) ? keep_scale : 0.0;
                        (*drop)(base + t, s) = m;
                        used(s) *= m;
                    }
                }
                out.block(n * steps + t, h * dh, 1, dh) = used.transpose() * vb.topRows(t + 1);
            }
        }
    }
    if (weights != nullptr) *weights = *probs;

    const auto iq = q.id(), ik = k.id(), iv = v.id();
    const bool needs = q.requires_grad() || k.requires_grad() || v.requires_grad();
    return tape.record(std::move(out), needs, [=](Tape& t, const Matrix& g) {
        const Matrix& qv = t.value(iq);
        const Matrix& kv = t.value(ik);
        const Matrix& vv = t.value(iv);
        Matrix gq = Matrix::Zero(qv.rows(), qv.cols());
        Matrix gk = Matrix::Zero(kv.rows(), kv.cols());
        Matrix gv = Matrix::Zero(vv.rows(), vv.cols());
        for (Eigen::Index n = 0; n < nodes; ++n) {
            for (Eigen::Index h = 0; h < heads; ++h) {
                const Eigen::Index r0 = n * steps;
                const Eigen::Index c0 = h * dh;
                const Eigen::Index base = (n * heads + h) * steps;
                const Matrix a = probs->block(base, 0, steps, steps);
                const Matrix used = train ? Matrix(a.cwiseProduct(drop->block(base, 0, steps, steps))) : a;
                const Matrix gu = g.block(r0, c0, steps, dh);
                gv.block(r0, c0, steps, dh) += used.transpose() * gu;
                Matrix ga = gu * vv.block(r0, c0, steps, dh).transpose();
                if (train) ga = ga.cwiseProduct(drop->block(base, 0, steps, steps));
                // softmax backward per row; masked entries have a = 0
                const Vector row_dot = a.cwiseProduct(ga).rowwise().sum();
                const Matrix gs = a.cwiseProduct(ga - row_dot.replicate(1, steps)) * scale;
                gq.block(r0, c0, steps, dh) += gs * kv.block(r0, c0, steps, dh);
                gk.block(r0, c0, steps, dh) += gs.transpose() * qv.block(r0, c0, steps, dh);
            }
        }
        t.accumulate(iq, gq);
        t.accumulate(ik, gk);
        t.accumulate(iv, gv);
    });
}

Var ode_field(const Var& h, const OdeVars& ode) {
    const Var hidden = tanh(add_row(matmul_nt(h, ode.w1), ode.b1));
    return add_row(matmul_nt(hidden, ode.w2), ode.b2);
}

Var ode_refine(const Var& x, const Var& h, const OdeVars& ode, int steps) {
    const Var residual = x - h;
    const Var refined = rk4_integrate(residual, [&](const Var& y) { return ode_field(y, ode); }, steps);
    return h + refined;
}

Var temporal_forward(const Var& x, Eigen::Index steps, const TemporalVars& vars, const AttentionOptions& attention,
                     int ode_steps, Matrix* weights) {
    const Var z = add_time_tiled(x, hagh_encode(vars.hagh, static_cast<int>(steps)));
    const Var q = kan_apply(z, vars.kan_q, vars.cheb_order);
    const Var k = kan_apply(z, vars.kan_k, vars.cheb_order);
    const Var v = kan_apply(z, vars.kan_v, vars.cheb_order);
    const Var u = causal_attention(q, k, v, steps, attention, weights);
    const Var h = kan_apply(u, vars.kan_o, vars.cheb_order) + z;
    return ode_refine(x, h, vars.ode, ode_steps);
}

}  // namespace ad
}  // namespace dgten
