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

#include "dgten/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "dgten/errors.hpp"
#include "dgten/log.hpp"

namespace dgten {
namespace {

void check_sizes(std::span<const double> scores, std::span<const int> labels) {
    if (scores.size() != labels.size()) throw ConfigError("scores and labels differ in length");
    for (int l : labels) {
        if (l != 0 && l != 1) throw ConfigError("labels must be 0 or 1");
    }
}

double safe_ratio(double num, double den) { return den == 0.0 ? 0.0 : num / den; }

}  // namespace

ConfusionCounts confusion(std::span<const double> scores, std::span<const int> labels, double threshold) {
    check_sizes(scores, labels);
    ConfusionCounts c;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        const bool pred = scores[i] >= threshold;
        if (labels[i] == 1) {
            pred ? ++c.tp : ++c.fn;
        } else {
            pred ? ++c.fp : ++c.tn;
        }
    }
    return c;
}

double mcc(const ConfusionCounts& c) {
    const double tp = static_cast<double>(c.tp), tn = static_cast<double>(c.tn);
    const double fp = static_cast<double>(c.fp), fn = static_cast<double>(c.fn);
    const double a = tp + fp, b = tp + fn, d = tn + fp, e = tn + fn;
    if (a == 0.0 || b == 0.0 || d == 0.0 || e == 0.0) return 0.0;
    return (tp * tn - fp * fn) / std::sqrt(a * b * d * e);
}

double balanced_accuracy(const ConfusionCounts& c) {
    const double pos = static_cast<double>(c.tp + c.fn);
    const double neg = static_cast<double>(c.tn + c.fp);
    if (pos == 0.0) warn("balanced accuracy: no positive instances, sensitivity taken as 0");
    if (neg == 0.0) warn("balanced accuracy: no negative instances, specificity taken as 0");
    return 0.5 * (safe_ratio(static_cast<double>(c.tp), pos) + safe_ratio(static_cast<double>(c.tn), neg));
}

double f1_micro(const ConfusionCounts& c) {
    return safe_ratio(2.0 * static_cast<double>(c.tp), static_cast<double>(2 * c.tp + c.fp + c.fn));
}

double f1_macro(const ConfusionCounts& c) {
    const double trust = safe_ratio(2.0 * static_cast<double>(c.tn), static_cast<double>(2 * c.tn + c.fn + c.fp));
    return 0.5 * (f1_micro(c) + trust);
}

double auc(std::span<const double> scores, std::span<const int> labels) {
    check_sizes(scores, labels);
    const std::size_t n = scores.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    double rank_sum = 0.0;
    double positives = 0.0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j < n && scores[order[j]] == scores[order[i]]) ++j;
        const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);  // mean of ranks i+1..j
        for (std::size_t k = i; k < j; ++k) {
            if (labels[order[k]] == 1) {
                rank_sum += avg_rank;
                positives += 1.0;
            }
        }
        i = j;
    }
    const double negatives = static_cast<double>(n) - positives;
    if (positives == 0.0 || negatives == 0.0) throw UndefinedMetricError("AUC needs both classes");
    return (rank_sum - positives * (positives + 1.0) / 2.0) / (positives * negatives);
}

double average_precision(std::span<const double> scores, std::span<const int> labels) {
    check_sizes(scores, labels);
    const std::size_t n = scores.size();
    const double positives = static_cast<double>(std::count(labels.begin(), labels.end(), 1));
    if (positives == 0.0) throw UndefinedMetricError("average precision needs at least one positive");
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

    double ap = 0.0, tp = 0.0, fp = 0.0, prev_recall = 0.0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j < n && scores[order[j]] == scores[order[i]]) {
            labels[order[j]] == 1 ? tp += 1.0 : fp += 1.0;
            ++j;
        }
        const double recall = tp / positives;
        ap += (recall - prev_recall) * (tp / (tp + fp));
        prev_recall = recall;
        i = j;
    }
    return ap;
}

MetricSet evaluate_logits(std::span<const double> logits, std::span<const int> labels) {
    // sigmoid is monotone: logit >= 0 <=> p >= 0.5, and rankings are unchanged
    // (ranking logits avoids ties from saturated probabilities)
    const ConfusionCounts c = confusion(logits, labels, 0.0);
    MetricSet m;
    m.mcc = mcc(c);
    m.auc = auc(logits, labels);
    m.ba = balanced_accuracy(c);
    m.ap = average_precision(logits, labels);
    m.f1_micro = f1_micro(c);
    m.f1_macro = f1_macro(c);
    return m;
}

}  // namespace dgten
