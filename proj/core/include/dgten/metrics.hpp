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

#include <cstdint>
#include <span>

namespace dgten {

/// Distrust is the positive class.
struct ConfusionCounts {
    std::uint64_t tp = 0, tn = 0, fp = 0, fn = 0;
    std::uint64_t total() const noexcept { return tp + tn + fp + fn; }
};

/// Counts with `score >= threshold` predicted positive. Labels are 1 (Distrust) or 0.
ConfusionCounts confusion(std::span<const double> scores, std::span<const int> labels, double threshold);

/// 0 when any factor of the denominator is 0.
double mcc(const ConfusionCounts& c);
/// Mean of TPR and TNR; an empty class contributes 0 and logs a warning.
double balanced_accuracy(const ConfusionCounts& c);
/// F1 of the positive class; 0 on a zero denominator.
double f1_micro(const ConfusionCounts& c);
/// Unweighted mean of the Trust and Distrust F1 scores.
double f1_macro(const ConfusionCounts& c);

/// Rank statistic with average ranks for ties. Throws UndefinedMetricError
/// unless both classes are present.
double auc(std::span<const double> scores, std::span<const int> labels);
/// Sum over descending thresholds of (R_k - R_{k-1}) P_k, equal scores forming
/// one threshold. Throws UndefinedMetricError without positives.
double average_precision(std::span<const double> scores, std::span<const int> labels);

struct MetricSet {
    double mcc = 0, auc = 0, ba = 0, ap = 0, f1_micro = 0, f1_macro = 0;
};

/// All six metrics from logits; predictions use sigmoid(logit) >= 0.5.
MetricSet evaluate_logits(std::span<const double> logits, std::span<const int> labels);

}  // namespace dgten
