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

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "dgten/errors.hpp"
#include "dgten/temporal.hpp"

using namespace dgten;

namespace {

Matrix random_matrix(Eigen::Index r, Eigen::Index c, std::mt19937_64& rng) {
    std::normal_distribution<double> d(0.0, 1.0);
    Matrix m(r, c);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = d(rng);
    return m;
}

ad::HaghVars zero_hagh(ad::Tape& t, int steps, int d) {
    return {t.variable(Matrix::Zero(steps, d)), t.variable(Matrix::Constant(1, 1, (steps - 1) / 2.0)),
            t.variable(Matrix::Constant(1, 1, softplus_inverse(steps / 4.0))), t.variable(Matrix::Zero(1, d)),
            t.variable(Matrix::Zero(1, d))};
}

struct TemporalFixture {
    ParamRegistry reg;
    TemporalParams params;
    TemporalDims dims{4, 6, 2, 3, 3};

    explicit TemporalFixture(std::uint64_t seed) {
        std::mt19937_64 rng(seed);
        params = TemporalParams::create(reg, dims, rng);
        // Non-trivial encoding so every path contributes.
        reg.value("temporal.hagh.w_gau") = random_matrix(1, dims.hidden_dim, rng);
        reg.value("temporal.hagh.w_hour") = random_matrix(1, dims.hidden_dim, rng);
    }
};

}  // namespace

TEST(SoftplusInverse, RoundTrips) {
    for (double y : {0.01, 0.5, 1.0, 2.5, 40.0}) {
        const double x = softplus_inverse(y);
        EXPECT_NEAR(std::log1p(std::exp(x)), y, 1e-12 * std::max(1.0, y));
    }
}

TEST(Hagh, HourglassEnvelope) {
    ad::Tape t;
    auto h = zero_hagh(t, 5, 2);
    h.w_hour = t.variable(Matrix::Ones(1, 2));
    const Matrix p = ad::hagh_encode(h, 5).value();
    const double expect[] = {0.0, 0.5, 1.0, 0.5, 0.0};
    for (int s = 0; s < 5; ++s) EXPECT_DOUBLE_EQ(p(s, 0), expect[s]);
}

TEST(Hagh, GaussianPeakAtCenter) {
    ad::Tape t;
    auto h = zero_hagh(t, 6, 1);
    h.center = t.variable(Matrix::Constant(1, 1, 2.0));
    h.w_gau = t.variable(Matrix::Ones(1, 1));
    const Matrix p = ad::hagh_encode(h, 6).value();
    EXPECT_EQ(p(2, 0), 1.0);
    EXPECT_LT(p(0, 0), 1.0);
    EXPECT_LT(p(5, 0), p(3, 0));
}

TEST(Hagh, SingleStepUsesFullHourglass) {
    ad::Tape t;
    auto h = zero_hagh(t, 3, 2);
    h.w_hour = t.variable(Matrix::Constant(1, 2, 0.25));
    const Matrix p = ad::hagh_encode(h, 1).value();
    ASSERT_EQ(p.rows(), 1);
    EXPECT_DOUBLE_EQ(p(0, 0), 0.25);
    EXPECT_THROW(ad::hagh_encode(h, 4), ConfigError);
}

TEST(Kan, ConstantBasisIgnoresInput) {
    ad::Tape t;
    Matrix theta = Matrix::Zero(2 * 4, 2);  // d_in 2, K 3, d_out 2
    theta(0 * 4 + 0, 0) = 1.5;
    theta(1 * 4 + 0, 0) = -0.5;
    theta(1 * 4 + 0, 1) = 2.0;
    std::mt19937_64 rng(1);
    const Matrix out = ad::kan_apply(t.constant(random_matrix(5, 2, rng)), t.constant(theta), 3).value();
    for (Eigen::Index r = 0; r < 5; ++r) {
        EXPECT_NEAR(out(r, 0), 1.0, 1e-15);
        EXPECT_NEAR(out(r, 1), 2.0, 1e-15);
    }
}

TEST(Kan, LinearBasisIsScaledTanh) {
    ad::Tape t;
    Matrix theta = Matrix::Zero(4, 1);
    theta(1, 0) = 3.0;
    Matrix v(3, 1);
    v << -2.0, 0.1, 0.9;
    const Matrix out = ad::kan_apply(t.constant(v), t.constant(theta), 3).value();
    for (Eigen::Index r = 0; r < 3; ++r) EXPECT_NEAR(out(r, 0), 3.0 * std::tanh(v(r, 0)), 1e-15);
}

TEST(Kan, CubicAtHalf) {
    ad::Tape t;
    Matrix theta = Matrix::Zero(4, 1);
    theta(3, 0) = 1.0;
    const Matrix out = ad::kan_apply(t.constant(Matrix::Constant(1, 1, std::atanh(0.5))), t.constant(theta), 3).value();
    EXPECT_NEAR(out(0, 0), -1.0, 1e-12);
}

TEST(Kan, ShapeMismatchThrows) {
    ad::Tape t;
    EXPECT_THROW(ad::kan_apply(t.constant(Matrix::Ones(2, 2)), t.constant(Matrix::Ones(4, 1)), 3), ConfigError);
}

TEST(Attention, FirstStepAttendsToItself) {
    ad::Tape t;
    std::mt19937_64 rng(3);
    const int nodes = 3, steps = 4, heads = 2, dh = 2;
    const Matrix q = random_matrix(nodes * steps, heads * dh, rng);
    const Matrix k = random_matrix(nodes * steps, heads * dh, rng);
    const Matrix v = random_matrix(nodes * steps, heads * dh, rng);
    Matrix w;
    const Matrix u =
        ad::causal_attention(t.constant(q), t.constant(k), t.constant(v), steps, {heads, dh, 0.0, nullptr}, &w).value();
    ASSERT_EQ(w.rows(), nodes * heads * steps);
    ASSERT_EQ(w.cols(), steps);
    for (int n = 0; n < nodes; ++n) {
        EXPECT_EQ(Matrix(u.row(n * steps)), Matrix(v.row(n * steps)));
        for (int h = 0; h < heads; ++h) {
            for (int s = 0; s < steps; ++s) {
                const auto r = (n * heads + h) * steps + s;
                EXPECT_NEAR(w.row(r).sum(), 1.0, 1e-12);
                for (int c = s + 1; c < steps; ++c) EXPECT_EQ(w(r, c), 0.0);
            }
            EXPECT_EQ(w((n * heads + h) * steps, 0), 1.0);
        }
    }
}

TEST(Attention, IdenticalKeysGiveUniformWeights) {
    ad::Tape t;
    Matrix q(2, 2), k(2, 2), v(2, 2);
    q << 0.3, -0.1, 1.2, 0.7;
    k << 0.5, 0.5, 0.5, 0.5;
    v << 1.0, 2.0, 3.0, 6.0;
    Matrix w;
    const Matrix u = ad::causal_attention(t.constant(q), t.constant(k), t.constant(v), 2, {1, 2, 0.0, nullptr}, &w).value();
    EXPECT_DOUBLE_EQ(w(1, 0), 0.5);
    EXPECT_DOUBLE_EQ(w(1, 1), 0.5);
    EXPECT_DOUBLE_EQ(u(1, 0), 2.0);
    EXPECT_DOUBLE_EQ(u(1, 1), 4.0);
}

TEST(Attention, DropoutOnlyWithGenerator) {
    ad::Tape t;
    std::mt19937_64 data(5);
    const ad::Var q = t.constant(random_matrix(8, 4, data));
    const ad::Var k = t.constant(random_matrix(8, 4, data));
    const ad::Var v = t.constant(random_matrix(8, 4, data));
    const Matrix eval = ad::causal_attention(q, k, v, 4, {2, 2, 0.5, nullptr}).value();
    const Matrix plain = ad::causal_attention(q, k, v, 4, {2, 2, 0.0, nullptr}).value();
    EXPECT_EQ(eval, plain);
    std::mt19937_64 rng(1);
    const Matrix train = ad::causal_attention(q, k, v, 4, {2, 2, 0.5, &rng}).value();
    EXPECT_NE(train, plain);
}

TEST(Ode, ZeroFieldReturnsInput) {
    ad::Tape t;
    std::mt19937_64 rng(2);
    const Matrix x = random_matrix(6, 3, rng);
    const Matrix h = random_matrix(6, 3, rng);
    const ad::OdeVars f{t.constant(random_matrix(3, 3, rng)), t.constant(Matrix::Zero(1, 3)),
                        t.constant(Matrix::Zero(3, 3)), t.constant(Matrix::Zero(1, 3))};
    const Matrix z = ad::ode_refine(t.constant(x), t.constant(h), f, 4).value();
    EXPECT_LE((z - x).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Ode, ConstantFieldShiftsByConstant) {
    ad::Tape t;
    std::mt19937_64 rng(4);
    const Matrix x = random_matrix(4, 2, rng);
    const Matrix h = random_matrix(4, 2, rng);
    Matrix c(1, 2);
    c << 0.75, -1.25;
    const ad::OdeVars f{t.constant(random_matrix(2, 2, rng)), t.constant(Matrix::Zero(1, 2)),
                        t.constant(Matrix::Zero(2, 2)), t.constant(c)};
    const Matrix z = ad::ode_refine(t.constant(x), t.constant(h), f, 3).value();
    EXPECT_LE((z - (x.rowwise() + c.row(0))).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(TemporalForward, ShapesAndSingleStep) {
    TemporalFixture fx(7);
    std::mt19937_64 rng(1);
    for (int steps : {1, 4}) {
        ad::Tape t;
        auto vars = ad::TemporalVars::bind(fx.params, fx.reg.bind(t));
        const ad::Var x = t.constant(random_matrix(5 * steps, 6, rng));
        const ad::Var z = ad::temporal_forward(x, steps, vars, {2, 3, 0.0, nullptr}, 4);
        EXPECT_EQ(z.rows(), 5 * steps);
        EXPECT_EQ(z.cols(), 6);
        EXPECT_TRUE(z.value().allFinite());
    }
}

TEST(TemporalForward, FutureSlotsDoNotLeakBackwards) {
    TemporalFixture fx(9);
    std::mt19937_64 rng(2);
    const int nodes = 3, steps = 4;
    const Matrix x = random_matrix(nodes * steps, 6, rng);
    auto run = [&](const Matrix& in) {
        ad::Tape t;
        auto vars = ad::TemporalVars::bind(fx.params, fx.reg.bind(t));
        return Matrix(ad::temporal_forward(t.constant(in), steps, vars, {2, 3, 0.0, nullptr}, 4).value());
    };
    const Matrix base = run(x);
    for (int cut = 0; cut < steps - 1; ++cut) {
        Matrix y = x;
        for (int n = 0; n < nodes; ++n) {
            for (int s = cut + 1; s < steps; ++s) y.row(n * steps + s) += random_matrix(1, 6, rng);
        }
        const Matrix out = run(y);
        for (int n = 0; n < nodes; ++n) {
            for (int s = 0; s <= cut; ++s) EXPECT_EQ(Matrix(out.row(n * steps + s)), Matrix(base.row(n * steps + s)));
        }
    }
}
