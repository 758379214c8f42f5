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

#include <sstream>

#include <gtest/gtest.h>

#include "dgten/errors.hpp"
#include "dgten/graph.hpp"
#include "support/fixtures.hpp"

using namespace dgten;
using dgten::testing::make_sequence;

namespace {

EdgeList parse(const std::string& text, bool header = false) {
    std::istringstream in(text);
    return parse_edge_list(in, CsvOptions{header});
}

}  // namespace

TEST(EdgeListParse, EmptyInput) {
    const EdgeList e = parse("");
    EXPECT_TRUE(e.records.empty());
    EXPECT_EQ(e.node_count(), 0u);
}

TEST(EdgeListParse, RemapsIdsInFirstAppearanceOrder) {
    const EdgeList e = parse("7,42,3,10\n42,7,-2,11\n7,42,5,12\n");
    ASSERT_EQ(e.records.size(), 3u);
    EXPECT_EQ(e.node_count(), 2u);
    EXPECT_EQ(e.raw_ids, (std::vector<std::int64_t>{7, 42}));
    EXPECT_EQ(e.records[0].trustor, 0u);
    EXPECT_EQ(e.records[0].trustee, 1u);
    EXPECT_EQ(e.records[1].trustor, 1u);
    EXPECT_EQ(e.records[1].label(), TrustLabel::Distrust);
}

TEST(EdgeListParse, HeaderRowSkipped) {
    const EdgeList e = parse("SOURCE,TARGET,RATING,TIME\n1,2,1,5\n", true);
    EXPECT_EQ(e.records.size(), 1u);
}

TEST(EdgeListParse, DropsSelfEdges) {
    const EdgeList e = parse("1,1,5,1\n1,2,5,2\n");
    EXPECT_EQ(e.records.size(), 1u);
}

TEST(EdgeListParse, MalformedRowReportsLine) {
    try {
        parse("1,2,3,4\n1,x,3,4\n");
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 2u);
    }
    EXPECT_THROW(parse("1,2,3\n"), ParseError);
}

TEST(EdgeListParse, RatingOutOfDomain) {
    EXPECT_THROW(parse("1,2,0,4\n"), ValidationError);
    EXPECT_THROW(parse("1,2,11,4\n"), ValidationError);
    EXPECT_THROW(parse("1,2,-11,4\n"), ValidationError);
    EXPECT_NO_THROW(parse("1,2,-10,4\n1,3,10,5\n"));
}

TEST(Discretize, NeedsTwoSlots) {
    const EdgeList e = parse("1,2,3,10\n");
    EXPECT_THROW(discretize(e, 1), ConfigError);
    EXPECT_THROW(discretize(e, 0), ConfigError);
}

TEST(Discretize, LatestRatingWinsInsideASlot) {
    const EdgeList e = parse("1,2,3,10\n1,2,-5,20\n3,1,4,100\n");
    const SnapshotSequence s = discretize(e, 2);
    ASSERT_EQ(s.size(), 2u);
    ASSERT_EQ(s.snapshots[0].edges.size(), 1u);
    EXPECT_EQ(s.snapshots[0].edges[0].label(), TrustLabel::Distrust);
    EXPECT_EQ(s.snapshots[0].edges[0].rating, -5);
    EXPECT_EQ(s.snapshots[1].edges.size(), 1u);
}

TEST(Discretize, FirstSlotClosedOnTheLeftAndBoundariesGoDown) {
    // min 0, max 40, N = 4: slot width 10; t = 10 sits on the right edge of slot 0.
    const EdgeList e = parse("1,2,1,0\n2,3,1,10\n3,4,1,10.5\n4,5,1,40\n");
    const SnapshotSequence s = discretize(e, 4);
    EXPECT_EQ(s.snapshots[0].edges.size(), 2u);
    EXPECT_EQ(s.snapshots[1].edges.size(), 1u);
    EXPECT_EQ(s.snapshots[2].edges.size(), 0u);
    EXPECT_EQ(s.snapshots[3].edges.size(), 1u);
    EXPECT_DOUBLE_EQ(s.slot_duration, 10.0);
}

TEST(Discretize, SingleRecordLandsInFirstSlot) {
    const SnapshotSequence s = discretize(parse("1,2,1,5\n"), 2);
    EXPECT_EQ(s.snapshots[0].edges.size(), 1u);
    EXPECT_TRUE(s.snapshots[1].edges.empty());
}

TEST(Discretize, EveryRecordKeptOnceAcrossSlots) {
    const EdgeList e = dgten::testing::planted_records(40, 8, 500, 3);
    const SnapshotSequence s = discretize(e, 7);
    std::size_t total = 0;
    for (std::size_t k = 0; k < s.size(); ++k) {
        const auto& edges = s.snapshots[k].edges;
        total += edges.size();
        for (std::size_t i = 1; i < edges.size(); ++i) {
            EXPECT_TRUE(std::tie(edges[i - 1].trustor, edges[i - 1].trustee) <
                        std::tie(edges[i].trustor, edges[i].trustee));
        }
    }
    EXPECT_LE(total, e.records.size());
    EXPECT_EQ(discretize(e, 7), s);
}

TEST(NodeClasses, MajorityOfIncomingLabels) {
    const auto seq = make_sequence(5, {{{1, 0, -3}, {2, 0, -1}, {3, 0, 4}, {0, 1, 2}, {2, 1, -2}}});
    const auto c = node_classes(seq);
    EXPECT_EQ(c[0], NodeClass::Bad);
    EXPECT_EQ(c[1], NodeClass::Good);  // tie
    EXPECT_EQ(c[2], NodeClass::Good);  // no in-edges
    EXPECT_EQ(c[4], NodeClass::Good);  // isolated
}

TEST(NodeClasses, LaterSlotOverridesPairLabel) {
    const auto seq = make_sequence(2, {{{1, 0, 5}}, {{1, 0, -5}}});
    EXPECT_EQ(node_classes(seq)[0], NodeClass::Bad);
    EXPECT_EQ(node_classes(seq, 1)[0], NodeClass::Good);
}

TEST(Homophily, ToyGraph) {
    const auto seq = make_sequence(3, {{{0, 1, 1}, {1, 0, 1}, {0, 2, 1}, {2, 0, 1}}});
    const std::vector<NodeClass> classes{NodeClass::Good, NodeClass::Good, NodeClass::Bad};
    EXPECT_DOUBLE_EQ(edge_homophily(seq, classes), 0.5);
}

TEST(Homophily, SingleClassIsOne) {
    const auto seq = make_sequence(3, {{{0, 1, 1}, {1, 2, 3}}});
    EXPECT_DOUBLE_EQ(edge_homophily(seq), 1.0);
}

TEST(Homophily, EmptyEdgeSetUndefined) {
    const auto seq = make_sequence(3, {{}, {}});
    EXPECT_THROW(edge_homophily(seq), UndefinedMetricError);
}

TEST(Sequence, FirstAppearanceAndPrefix) {
    const auto seq = make_sequence(4, {{{0, 1, 1}}, {{1, 2, -1}}, {}});
    EXPECT_EQ(first_appearance(seq), (std::vector<int>{0, 0, 1, -1}));
    const auto p = seq.prefix(2);
    EXPECT_EQ(p.size(), 2u);
    EXPECT_EQ(p.global_node_count, 4u);
    EXPECT_EQ(seq.snapshots[1].active_nodes(), (std::vector<NodeId>{1, 2}));
}

TEST(Sequence, StatsCountLabels) {
    const auto seq = make_sequence(4, {{{0, 1, 1}, {2, 1, -1}}, {{0, 1, -4}}});
    const auto s = sequence_stats(seq);
    EXPECT_EQ(s.edges, 3u);
    EXPECT_EQ(s.distrust_edges, 2u);
    EXPECT_EQ(s.trust_edges, 1u);
}

TEST(Sequence, JsonRoundTripIsExact) {
    const EdgeList e = dgten::testing::planted_records(30, 5, 200, 9);
    const SnapshotSequence s = discretize(e, 5);
    EXPECT_EQ(sequence_from_json(sequence_to_json(s)), s);
    EXPECT_THROW(sequence_from_json("{\"format\":\"other\"}"), Error);
}
