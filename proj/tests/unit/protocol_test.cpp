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

#include <gtest/gtest.h>

#include "dgten/errors.hpp"
#include "dgten/gradcheck.hpp"
#include "dgten/log.hpp"
#include "dgten/protocol.hpp"
#include "support/fixtures.hpp"

using namespace dgten;
using dgten::testing::make_sequence;

TEST(Rounds, Counts) {
    EXPECT_EQ(protocol_rounds(10, 1, 2, 3).size(), 8u);
    EXPECT_EQ(protocol_rounds(10, 3, 2, 3).size(), 8u);
    EXPECT_EQ(protocol_rounds(10, 2, 2, 3).size(), 6u);
    EXPECT_EQ(protocol_rounds(10, 1, 2, 3).front(), 2u);
    EXPECT_EQ(protocol_rounds(10, 2, 2, 3).back(), 7u);
    EXPECT_THROW(protocol_rounds(2, 1, 2, 3), ConfigError);
    EXPECT_THROW(protocol_rounds(4, 2, 2, 3), ConfigError);
    EXPECT_THROW(protocol_rounds(10, 4, 2, 3), ConfigError);
}

TEST(TestBatch, NextSlotFilteredToObservedNodes) {
    const auto seq = make_sequence(5, {{{0, 1, 1}}, {{1, 2, -1}}, {{0, 2, 1}, {3, 0, -1}}, {{2, 1, 1}}});
    const EdgeBatch b = test_batch(seq, 2, 1, 3);
    ASSERT_EQ(b.size(), 1u);  // 3 -> 0 dropped: node 3 unseen
    EXPECT_EQ(b.trustor[0], 0);
    EXPECT_EQ(b.trustee[0], 2);
    EXPECT_EQ(b.slot[0], 1);
    EXPECT_DOUBLE_EQ(b.target[0], 0.0);
}

TEST(TestBatch, MultiStepCoversDeltaSlots) {
    const auto seq = make_sequence(3, {{{0, 1, 1}}, {{1, 2, -1}}, {{0, 2, 1}}, {{2, 1, -1}}, {{1, 0, 1}}});
    const EdgeBatch b = test_batch(seq, 2, 2, 3);
    EXPECT_EQ(b.size(), 3u);
    for (auto s : b.slot) EXPECT_EQ(s, 1);
    EXPECT_THROW(test_batch(seq, 3, 2, 3), ConfigError);
}

TEST(TestBatch, ColdStartNeedsFreshEndpoint) {
    // Node 2 first appears in slot 1, the last training slot for t_end = 2.
    const auto seq = make_sequence(4, {{{0, 1, 1}, {3, 0, 1}}, {{1, 2, -1}}, {{0, 1, -1}, {2, 0, 1}, {0, 3, 1}}});
    const EdgeBatch b = test_batch(seq, 2, 3, 3);
    ASSERT_EQ(b.size(), 1u);
    EXPECT_EQ(b.trustor[0], 2);
}

TEST(ObservedNodes, WindowOnly) {
    const auto seq = make_sequence(4, {{{0, 1, 1}}, {{2, 3, 1}}});
    EXPECT_EQ(observed_nodes(seq, 1), (std::vector<bool>{true, true, false, false}));
}

TEST(Evaluate, SyntheticEndToEnd) {
    const auto seq = discretize(dgten::testing::planted_records(40, 8, 600, 13), 5);
    TrainConfig cfg = dgten::testing::tiny_config();
    EvaluateOptions opts;
    opts.task = 1;
    opts.seeds = {1, 2};
    std::optional<Model> last;
    const EvalReport r = evaluate(seq, cfg, opts, &last);
    EXPECT_EQ(r.planned_rounds, 3u);
    EXPECT_EQ(r.rounds.size() + r.skipped.size(), 6u);
    ASSERT_TRUE(last.has_value());
    EXPECT_EQ(last->horizon(), 4);
    double mean_auc = 0.0;
    for (const auto& round : r.rounds) mean_auc += round.metrics.auc / static_cast<double>(r.rounds.size());
    EXPECT_GT(mean_auc, 0.6);

    const EvalReport back = EvalReport::from_json(r.to_json());
    EXPECT_EQ(back.rounds.size(), r.rounds.size());
    EXPECT_EQ(back.seeds, r.seeds);
    EXPECT_DOUBLE_EQ(back.rounds[0].metrics.mcc, r.rounds[0].metrics.mcc);
}

TEST(Evaluate, ThreadCountDoesNotChangeResults) {
    const auto seq = discretize(dgten::testing::planted_records(30, 6, 300, 21), 4);
    TrainConfig cfg = dgten::testing::tiny_config();
    cfg.epochs = 5;
    cfg.dropout = 0.2;
    EvaluateOptions opts;
    opts.seeds = {3, 4};
    opts.threads = 1;
    const EvalReport a = evaluate(seq, cfg, opts);
    opts.threads = 3;
    const EvalReport b = evaluate(seq, cfg, opts);
    ASSERT_EQ(a.rounds.size(), b.rounds.size());
    for (std::size_t i = 0; i < a.rounds.size(); ++i) {
        EXPECT_EQ(a.rounds[i].final_loss, b.rounds[i].final_loss);
        EXPECT_EQ(a.rounds[i].metrics.auc, b.rounds[i].metrics.auc);
    }
}

TEST(Evaluate, SingleClassRoundIsSkipped) {
    const auto seq = make_sequence(4, {{{0, 1, 1}, {1, 2, -1}}, {{1, 0, 1}, {2, 1, -1}}, {{0, 2, 1}, {2, 0, 1}}});
    std::vector<std::string> warnings;
    auto prev = set_warning_sink([&](const std::string& m) { warnings.push_back(m); });
    TrainConfig cfg = dgten::testing::tiny_config();
    cfg.epochs = 2;
    EvaluateOptions opts;
    const EvalReport r = evaluate(seq, cfg, opts);
    set_warning_sink(prev);
    EXPECT_TRUE(r.rounds.empty());
    ASSERT_EQ(r.skipped.size(), 1u);
    EXPECT_FALSE(warnings.empty());
}

TEST(Report, AggregateUsesSampleDeviation) {
    EvalReport r;
    RoundResult a, b;
    a.metrics.mcc = 0.2;
    b.metrics.mcc = 0.4;
    r.rounds = {a, b};
    const auto agg = r.aggregate();
    ASSERT_EQ(agg.front().first, "mcc");
    EXPECT_NEAR(agg.front().second.mean, 0.3, 1e-15);
    EXPECT_NEAR(agg.front().second.sd, std::sqrt(0.02), 1e-15);
}
