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

#include "dgten/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace dgten {

Vector chebyshev_basis(double v, int order) {
    if (order < 0) throw ConfigError("Chebyshev order must be >= 0");
    Vector t(order + 1);
    t(0) = 1.0;
    if (order >= 1) t(1) = v;
    for (int k = 2; k <= order; ++k) t(k) = 2.0 * v * t(k - 1) - t(k - 2);
    return t;
}

Vector softmax(const Vector& logits) {
    if (logits.size() == 0) return logits;
    const Vector e = (logits.array() - logits.maxCoeff()).exp();
    return e / e.sum();
}

namespace ad {

Var chebyshev_expand(const Var& v, int order) {
    if (order < 0) throw ConfigError("Chebyshev order must be >= 0");
    Tape& t = *v.tape();
    const auto rows = v.rows();
    const auto cols = v.cols();
    const int width = order + 1;
    const Matrix& x = v.value();
    Matrix out(rows, cols * width);
    for (Eigen::Index r = 0; r < rows; ++r) {
        for (Eigen::Index c = 0; c < cols; ++c) {
            const double val = x(r, c);
            double* dst = &out(r, c * width);
            dst[0] = 1.0;
            if (order >= 1) dst[1] = val;
            for (int k = 2; k <= order; ++k) dst[k] = 2.0 * val * dst[k - 1] - dst[k - 2];
        }
    }
    const auto iv = v.id();
    return t.record(std::move(out), v.requires_grad(), [iv, order, width](Tape& t, const Matrix& g) {
        const Matrix& x = t.value(iv);
        Matrix gx = Matrix::Zero(x.rows(), x.cols());
        std::vector<double> tk(static_cast<std::size_t>(width));
        std::vector<double> dk(static_cast<std::size_t>(width));
        for (Eigen::Index r = 0; r < x.rows(); ++r) {
            for (Eigen::Index c = 0; c < x.cols(); ++c) {
                const double val = x(r, c);
                // T'_k = 2 T_{k-1} + 2v T'_{k-1} - T'_{k-2}
                tk[0] = 1.0;
                dk[0] = 0.0;
                if (order >= 1) {
                    tk[1] = val;
                    dk[1] = 1.0;
                }
                double acc = order >= 1 ? g(r, c * width + 1) : 0.0;
                for (int k = 2; k <= order; ++k) {
                    tk[k] = 2.0 * val * tk[k - 1] - tk[k - 2];
                    dk[k] = 2.0 * tk[k - 1] + 2.0 * val * dk[k - 1] - dk[k - 2];
                    acc += g(r, c * width + k) * dk[k];
                }
                gx(r, c) = acc;
            }
        }
        t.accumulate(iv, gx);
    });
}

}  // namespace ad

std::size_t ParamRegistry::add(std::string name, Matrix value) {
    if (contains(name)) throw ConfigError("parameter registered twice: " + name);
    Matrix grad = Matrix::Zero(value.rows(), value.cols());
    entries_.push_back(Entry{std::move(name), std::move(value), std::move(grad)});
    return entries_.size() - 1;
}

std::size_t ParamRegistry::index_of(const std::string& name) const {
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        if (entries_[i].name == name) return i;
    }
    throw LookupError("unknown parameter " + name);
}

bool ParamRegistry::contains(const std::string& name) const {
    return std::any_of(entries_.begin(), entries_.end(), [&](const Entry& e) { return e.name == name; });
}

std::size_t ParamRegistry::scalar_count() const noexcept {
    std::size_t n = 0;
    for (const auto& e : entries_) n += static_cast<std::size_t>(e.value.size());
    return n;
}

void ParamRegistry::zero_grad() {
    for (auto& e : entries_) e.grad.setZero(e.value.rows(), e.value.cols());
}

double ParamRegistry::squared_norm() const {
    double s = 0.0;
    for (const auto& e : entries_) s += e.value.squaredNorm();
    return s;
}

std::vector<ad::Var> ParamRegistry::bind(ad::Tape& tape) const {
    std::vector<ad::Var> vars;
    vars.reserve(entries_.size());
    for (const auto& e : entries_) vars.push_back(tape.variable(e.value));
    return vars;
}

void ParamRegistry::collect_grads(const std::vector<ad::Var>& bound) {
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        const Matrix& g = bound.at(i).grad();
        if (g.size() == 0) {
            entries_[i].grad.setZero(entries_[i].value.rows(), entries_[i].value.cols());
        } else {
            entries_[i].grad = g;
        }
    }
}

GradCheckResult grad_check(const Objective& objective, ParamRegistry& params, const GradCheckOptions& options) {
    params.zero_grad();
    objective.value_and_grad(params);

    std::mt19937_64 rng(options.seed);
    GradCheckResult result;
    for (auto& entry : params) {
        if (!options.prefixes.empty() &&
            std::none_of(options.prefixes.begin(), options.prefixes.end(),
                         [&](const std::string& p) { return entry.name.rfind(p, 0) == 0; })) {
            continue;
        }
        const auto size = static_cast<std::size_t>(entry.value.size());
        std::vector<std::size_t> coords(size);
        std::iota(coords.begin(), coords.end(), 0);
        if (size > options.coords_per_param) {
            std::shuffle(coords.begin(), coords.end(), rng);
            coords.resize(options.coords_per_param);
        }
        for (std::size_t c : coords) {
            double& x = entry.value.data()[c];
            const double saved = x;
            x = saved + options.epsilon;
            const double up = objective.value(params);
            x = saved - options.epsilon;
            const double down = objective.value(params);
            x = saved;

            const double numeric = (up - down) / (2.0 * options.epsilon);
            const double analytic = entry.grad.data()[c];
            const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-8});
            const double err = std::abs(analytic - numeric) / denom;
            ++result.coords_checked;
            if (err > result.max_relative_error || result.worst_param.empty()) {
                if (err >= result.max_relative_error) {
                    result.max_relative_error = err;
                    result.worst_param = entry.name;
                    result.worst_index = c;
                    result.worst_analytic = analytic;
                    result.worst_numeric = numeric;
                }
            }
        }
    }
    return result;
}

}  // namespace dgten
