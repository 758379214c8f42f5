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

#include <algorithm>
#include <cmath>

#include "dgten/errors.hpp"
#include "dgten/structural.hpp"

namespace dgten {
namespace {

// Forward intermediates shared by the value-only and the differentiable form.
struct RaecaState {
    std::vector<std::vector<std::size_t>> in_edges;  // per trustee
    std::vector<double> dotp, norm_prod;             // cosine pieces per edge
    std::vector<double> jac_num, jac_den;            // Jaccard pieces per edge (den includes eps)
    std::vector<double> s_cos, s_jac;                // raw similarities
    std::vector<double> kept_cos, kept_jac;          // after thresholding
    std::vector<double> fused;                       // S~
    std::vector<double> ratio;                       // r-hat
    std::vector<double> fused_sum;                   // per node, sum S~ + eps
    std::vector<int> degree;                         // D'
    std::vector<double> row_den;                     // per node, sum A + eps
    std::vector<double> alpha;
    std::vector<double> self_alpha;
};

RaecaState run_raeca(const Matrix& mu, const EdgeIndex& edges, const RaecaOptions& opt) {
    const auto n = static_cast<std::size_t>(mu.rows());
    const std::size_t m = edges.size();
    RaecaState st;
    st.in_edges.resize(n);
    st.dotp.resize(m);
    st.norm_prod.resize(m);
    st.jac_num.resize(m);
    st.jac_den.resize(m);
    st.s_cos.resize(m);
    st.s_jac.resize(m);
    st.kept_cos.resize(m);
    st.kept_jac.resize(m);
    st.fused.resize(m);
    st.ratio.resize(m);
    st.alpha.resize(m);
    st.fused_sum.assign(n, 0.0);
    st.degree.assign(n, 0);
    st.row_den.assign(n, 0.0);
    st.self_alpha.assign(n, 0.0);

    const Vector norms = mu.rowwise().norm();
    const Matrix clipped = mu.cwiseMax(0.0);
    for (std::size_t e = 0; e < m; ++e) {
        const auto i = edges.dst[e];
        const auto j = edges.src[e];
        if (i < 0 || j < 0 || static_cast<std::size_t>(i) >= n || static_cast<std::size_t>(j) >= n) {
            throw ConfigError("raeca: edge endpoint out of range");
        }
        st.in_edges[static_cast<std::size_t>(i)].push_back(e);

        st.dotp[e] = mu.row(i).dot(mu.row(j));
        st.norm_prod[e] = norms(i) * norms(j) + opt.epsilon;
        st.s_cos[e] = 1.0 + st.dotp[e] / st.norm_prod[e];

        st.jac_num[e] = clipped.row(i).cwiseMin(clipped.row(j)).sum();
        st.jac_den[e] = clipped.row(i).cwiseMax(clipped.row(j)).sum() + opt.epsilon;
        st.s_jac[e] = st.jac_num[e] / st.jac_den[e];

        st.kept_cos[e] = st.s_cos[e] >= opt.tau_cos ? st.s_cos[e] : 0.0;
        st.kept_jac[e] = st.s_jac[e] >= opt.jaccard_threshold ? st.s_jac[e] : 0.0;
        const double total = st.kept_cos[e] + st.kept_jac[e];
        st.fused[e] = total > 0.0 ? (st.kept_cos[e] * st.kept_cos[e] + st.kept_jac[e] * st.kept_jac[e]) / total : 0.0;
    }

    for (std::size_t i = 0; i < n; ++i) {
        double sum = 0.0;
        int degree = 0;
        for (std::size_t e : st.in_edges[i]) {
            sum += st.fused[e];
            if (st.fused[e] > 0.0) ++degree;
        }
        st.fused_sum[i] = sum + opt.epsilon;
        st.degree[i] = degree;
        double row = 1.0;  // self-loop
        for (std::size_t e : st.in_edges[i]) {
            st.ratio[e] = st.fused[e] / st.fused_sum[i] * degree;
            row += st.ratio[e];
        }
        st.row_den[i] = row + opt.epsilon;
        for (std::size_t e : st.in_edges[i]) st.alpha[e] = st.ratio[e] / st.row_den[i];
        st.self_alpha[i] = 1.0 / st.row_den[i];
    }
    return st;
}

}  // namespace

void EdgeIndex::add(Eigen::Index from, Eigen::Index to, double scaled_label) {
    src.push_back(from);
    dst.push_back(to);
    label.push_back(scaled_label);
}

EdgeIndex EdgeIndex::from_snapshot(const Snapshot& snapshot, std::span<const int> local_of) {
    EdgeIndex out;
    for (const auto& e : snapshot.edges) {
        const int s = local_of[e.trustor];
        const int t = local_of[e.trustee];
        if (s < 0 || t < 0) throw LookupError("snapshot edge endpoint missing from node index");
        out.add(s, t, e.rating / 10.0);
    }
    return out;
}

DefensiveCoefficients raeca(const Matrix& mu_prev, const EdgeIndex& edges, const RaecaOptions& options) {
    RaecaState st = run_raeca(mu_prev, edges, options);
    DefensiveCoefficients out;
    out.edge_alpha = std::move(st.alpha);
    out.self_alpha = std::move(st.self_alpha);
    out.pruned_degree = std::move(st.degree);
    out.cosine = std::move(st.s_cos);
    out.jaccard = std::move(st.s_jac);
    out.pruned.resize(edges.size());
    for (std::size_t e = 0; e < edges.size(); ++e) out.pruned[e] = st.fused[e] == 0.0;
    return out;
}

namespace ad {

CoefficientVars raeca(const Var& mu_prev, const EdgeIndex& edges, const RaecaOptions& options) {
    Tape& tape = *mu_prev.tape();
    auto st = std::make_shared<RaecaState>(run_raeca(mu_prev.value(), edges, options));
    const auto m = static_cast<Eigen::Index>(edges.size());
    const auto n = mu_prev.rows();

    Matrix alpha(m, 1);
    for (Eigen::Index e = 0; e < m; ++e) alpha(e, 0) = st->alpha[static_cast<std::size_t>(e)];
    Matrix self(n, 1);
    for (Eigen::Index i = 0; i < n; ++i) self(i, 0) = st->self_alpha[static_cast<std::size_t>(i)];

    // Both outputs share one backward, run from the edge node.
    auto self_grad = std::make_shared<Matrix>();
    const bool needs = mu_prev.requires_grad();
    const auto imu = mu_prev.id();
    const auto src = edges.src;
    const auto dst = edges.dst;

    Var edge_alpha = tape.record(std::move(alpha), needs, [=](Tape& t, const Matrix& g_alpha) {
        const Matrix& mu = t.value(imu);
        const auto nn = static_cast<std::size_t>(mu.rows());
        const std::size_t mm = src.size();
        const Matrix g_self = self_grad->size() ? *self_grad : Matrix::Zero(mu.rows(), 1);
        self_grad->resize(0, 0);

        // alpha_e = r_e / den_i, self_i = 1 / den_i, den_i = 1 + sum r + eps
        std::vector<double> g_ratio(mm, 0.0);
        for (std::size_t i = 0; i < nn; ++i) {
            const double den = st->row_den[i];
            double dot = g_self(static_cast<Eigen::Index>(i), 0);
            for (std::size_t e : st->in_edges[i]) dot += g_alpha(static_cast<Eigen::Index>(e), 0) * st->ratio[e];
            for (std::size_t e : st->in_edges[i]) {
                g_ratio[e] = g_alpha(static_cast<Eigen::Index>(e), 0) / den - dot / (den * den);
            }
        }
        // r_e = D_i S_e / (sum S + eps), D_i piecewise constant
        std::vector<double> g_fused(mm, 0.0);
        for (std::size_t i = 0; i < nn; ++i) {
            const double fs = st->fused_sum[i];
            const double d = st->degree[i];
            double dot = 0.0;
            for (std::size_t e : st->in_edges[i]) dot += g_ratio[e] * st->fused[e];
            for (std::size_t e : st->in_edges[i]) g_fused[e] = d * g_ratio[e] / fs - d * dot / (fs * fs);
        }

        Matrix g_mu = Matrix::Zero(mu.rows(), mu.cols());
        const Vector norms = mu.rowwise().norm();
        for (std::size_t e = 0; e < mm; ++e) {
            const double c = st->kept_cos[e];
            const double j = st->kept_jac[e];
            const double total = c + j;
            if (total <= 0.0 || g_fused[e] == 0.0) continue;
            const double q = c * c + j * j;
            const double g_c = c > 0.0 ? g_fused[e] * (2.0 * c * total - q) / (total * total) : 0.0;
            const double g_j = j > 0.0 ? g_fused[e] * (2.0 * j * total - q) / (total * total) : 0.0;
            const auto a = dst[e];  // trustee i
            const auto b = src[e];  // neighbor j

            if (g_c != 0.0) {
                // cos = dot / (|a||b| + eps)
                const double np = st->norm_prod[e];
                const double dp = st->dotp[e];
                g_mu.row(a) += g_c * mu.row(b) / np;
                g_mu.row(b) += g_c * mu.row(a) / np;
                if (norms(a) > 0.0) g_mu.row(a) -= g_c * dp * norms(b) / (np * np) * mu.row(a) / norms(a);
                if (norms(b) > 0.0) g_mu.row(b) -= g_c * dp * norms(a) / (np * np) * mu.row(b) / norms(b);
            }
            if (g_j != 0.0) {
                // jac = sum min(a+, b+) / (sum max(a+, b+) + eps)
                const double num = st->jac_num[e];
                const double den = st->jac_den[e];
                for (Eigen::Index l = 0; l < mu.cols(); ++l) {
                    const double x = mu(a, l);
                    const double y = mu(b, l);
                    const double xp = std::max(x, 0.0);
                    const double yp = std::max(y, 0.0);
                    // min picks x when xp <= yp, max picks x otherwise
                    const double dmin_dx = xp <= yp ? 1.0 : 0.0;
                    const double dmax_dx = 1.0 - dmin_dx;
                    const double gx = (dmin_dx / den - num * dmax_dx / (den * den)) * (x > 0.0 ? 1.0 : 0.0);
                    const double gy = ((1.0 - dmin_dx) / den - num * (1.0 - dmax_dx) / (den * den)) * (y > 0.0 ? 1.0 : 0.0);
                    g_mu(a, l) += g_j * gx;
                    g_mu(b, l) += g_j * gy;
                }
            }
        }
        t.accumulate(imu, g_mu);
    });

    // Recorded after edge_alpha, so its backward runs first; the zero seed
    // makes sure the shared chain runs even if only self_alpha is used.
    const auto edge_id = edge_alpha.id();
    Var self_alpha = tape.record(std::move(self), needs, [self_grad, edge_id, m](Tape& t, const Matrix& g) {
        *self_grad = g;
        t.accumulate(edge_id, Matrix::Zero(m, 1));
    });
    return {edge_alpha, self_alpha};
}

CoefficientVars mean_coefficients(Tape& tape, Eigen::Index nodes, const EdgeIndex& edges) {
    std::vector<int> indeg(static_cast<std::size_t>(nodes), 0);
    for (auto d : edges.dst) ++indeg[static_cast<std::size_t>(d)];
    Matrix alpha(static_cast<Eigen::Index>(edges.size()), 1);
    for (std::size_t e = 0; e < edges.size(); ++e) {
        alpha(static_cast<Eigen::Index>(e), 0) = 1.0 / (indeg[static_cast<std::size_t>(edges.dst[e])] + 1.0);
    }
    Matrix self(nodes, 1);
    for (Eigen::Index i = 0; i < nodes; ++i) self(i, 0) = 1.0 / (indeg[static_cast<std::size_t>(i)] + 1.0);
    return {tape.constant(std::move(alpha)), tape.constant(std::move(self))};
}

}  // namespace ad
}  // namespace dgten
