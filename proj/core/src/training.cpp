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

#include "dgten/training.hpp"

#include <cmath>

#include "dgten/errors.hpp"
#include "dgten/log.hpp"

namespace dgten {

std::vector<double> class_weights(std::span<const double> targets) {
    double positives = 0.0;
    for (double t : targets) positives += t;
    const double total = static_cast<double>(targets.size());
    const double negatives = total - positives;
    std::vector<double> w(targets.size(), 1.0);
    if (targets.empty()) return w;
    if (positives == 0.0 || negatives == 0.0) {
        warn("class weights: only one class present, using unit weights");
        return w;
    }
    for (std::size_t i = 0; i < targets.size(); ++i) {
        w[i] = total / (2.0 * (targets[i] > 0.5 ? positives : negatives));
    }
    return w;
}

Madgrad::Madgrad(double learning_rate, double momentum, double eps)
    : lr_(learning_rate), momentum_(momentum), eps_(eps) {
    if (!(learning_rate > 0.0) || momentum < 0.0 || momentum >= 1.0 || !(eps > 0.0)) {
        throw ConfigError("invalid optimizer settings");
    }
}

void Madgrad::step(ParamRegistry& params) {
    if (x0_.empty()) {
        for (const auto& e : params) {
            x0_.push_back(e.value);
            s_.push_back(Matrix::Zero(e.value.rows(), e.value.cols()));
            nu_.push_back(Matrix::Zero(e.value.rows(), e.value.cols()));
        }
    }
    if (x0_.size() != params.size()) throw ConfigError("optimizer bound to a different registry");
    const double lambda = lr_ * std::sqrt(static_cast<double>(k_ + 1));
    const double c = 1.0 - momentum_;
    for (std::size_t i = 0; i < params.size(); ++i) {
        auto& e = params[i];
        s_[i] += lambda * e.grad;
        nu_[i] += lambda * e.grad.cwiseAbs2();
        const Matrix z = x0_[i].array() - s_[i].array() / (nu_[i].array().unaryExpr([](double v) { return std::cbrt(v); }) + eps_);
        e.value = (1.0 - c) * e.value + c * z;
    }
    ++k_;
}

EdgeBatch training_batch(const SnapshotSequence& seq, std::size_t slot_count, bool next_slot) {
    if (slot_count > seq.size()) throw ConfigError("training window longer than the sequence");
    EdgeBatch batch;
    const std::size_t first = next_slot ? 1 : 0;
    for (std::size_t t = first; t < slot_count; ++t) {
        const auto z_slot = static_cast<Eigen::Index>(next_slot ? t - 1 : t);
        for (const auto& e : seq.snapshots[t].edges) {
            batch.add(e.trustor, e.trustee, z_slot, e.label() == TrustLabel::Distrust ? 1.0 : 0.0);
        }
    }
    batch.weight = class_weights(batch.target);
    return batch;
}

namespace ad {

Var objective(const Model& model, const Model::Bound& bound, std::span<const EdgeIndex> slots, const EdgeBatch& batch,
              std::mt19937_64* rng) {
    const Model::Output out = model.forward(bound, slots, rng);
    Tape& tape = *out.z.tape();
    Var loss = tape.scalar_constant(0.0);
    if (batch.size() > 0) {
        const Var logits = predict_logits(out.z, out.steps, batch, bound.head_w, bound.head_b);
        loss = weighted_bce(logits, batch.target, batch.weight);
    }
    const double lambda = model.config().weight_decay;
    if (lambda > 0.0) {
        for (const Var& p : bound.all) loss = loss + lambda * sum_squares(p);
    }
    return loss;
}

}  // namespace ad

double evaluate_objective(const Model& model, std::span<const EdgeIndex> slots, const EdgeBatch& batch) {
    ad::Tape tape;
    const auto bound = model.bind(tape);
    return ad::objective(model, bound, slots, batch, nullptr).scalar();
}

TrainResult train(Model& model, std::span<const EdgeIndex> slots, const EdgeBatch& batch, std::uint64_t seed,
                  const std::function<void(int, double)>& on_epoch) {
    const TrainConfig& cfg = model.config();
    Madgrad opt(cfg.learning_rate, cfg.momentum, cfg.optimizer_eps);
    std::mt19937_64 rng(seed);
    TrainResult result;
    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        ad::Tape tape;
        const auto bound = model.bind(tape);
        const ad::Var loss = ad::objective(model, bound, slots, batch, cfg.dropout > 0.0 ? &rng : nullptr);
        const double value = loss.scalar();
        if (!std::isfinite(value)) throw TrainingError(epoch, "loss is not finite");
        tape.backward(loss);
        model.params().collect_grads(bound.all);
        opt.step(model.params());
        result.loss.push_back(value);
        if (on_epoch) on_epoch(epoch, value);
    }
    return result;
}

}  // namespace dgten
