#include <gtest/gtest.h>

#include "fixtures.hpp"

using namespace dolha;
using namespace dolha::test;

namespace {

using Store = BasicSnapshotStore<TableHasher>;

Store replay(std::size_t n) {
  Store s(5, 6, example_hash());
  auto events = running_example();
  for (std::size_t i = 0; i < n; ++i) s.process_edge(events[i]);
  return s;
}

void expect_clean(const Store& s) {
  auto v = audit(s);
  EXPECT_TRUE(v.empty()) << v.front();
}

}  // namespace

TEST(Snapshot, RejectsZeroCapacity) {
  EXPECT_THROW(SnapshotStore(0, 6), ConfigError);
  EXPECT_THROW(SnapshotStore(5, 0), ConfigError);
  SnapshotStore one(1, 1);
  EXPECT_EQ(one.vertex_capacity(), 1u);
  EXPECT_EQ(one.edge_capacity(), 1u);
}

TEST(Snapshot, EmptyStore) {
  Store s(5, 6, example_hash());
  EXPECT_EQ(s.edge_cursor(), 0u);
  EXPECT_EQ(s.vertices().cursor(), 0u);
  EXPECT_FALSE(s.edge_query("v1", "v2"));
  EXPECT_FALSE(s.vertex_query("v1"));
  EXPECT_TRUE(s.successors("v1").empty());
  EXPECT_TRUE(s.precursors("v1").empty());
  for (Index b : s.edge_buckets()) EXPECT_EQ(b, kNil);
  expect_clean(s);
}

TEST(Snapshot, G5TablesMatchGolden) {
  Store s = replay(5);
  EXPECT_EQ(dump_string(s), golden("snapshot_g5.txt"));
  expect_clean(s);
}

TEST(Snapshot, G5HashArrays) {
  Store s = replay(5);
  EXPECT_EQ(s.vertices().buckets(), (std::vector<Index>{2, 0, 1, 4, kNil}));
  EXPECT_EQ(s.edge_buckets(), (std::vector<Index>{1, 0, 3, kNil, 2, kNil}));
  EXPECT_EQ(s.vertices().cursor(), 5u);
  EXPECT_EQ(s.edge_cursor(), 5u);
  const VertexCell& v1 = s.vertices()[0];
  EXPECT_EQ(v1.id, "v1");
  EXPECT_EQ(v1.w_out, 2);
  EXPECT_EQ(v1.w_in, 0);
  EXPECT_EQ(v1.out_head, 0u);
  EXPECT_EQ(v1.out_tail, 2u);
  EXPECT_EQ(v1.hash_next, 3u);
  EXPECT_EQ(s.edges()[2].hash_next, 4u);
}

TEST(Snapshot, G5Queries) {
  Store s = replay(5);
  EXPECT_EQ(s.vertex_query("v2"), (VertexInfo{2, 1, 2, 1}));
  EXPECT_EQ(s.successors("v1"),
            (std::vector<Neighbor>{{"v2", 1, 1}, {"v4", 1, 3}}));
  EXPECT_EQ(s.precursors("v4"),
            (std::vector<Neighbor>{{"v1", 1, 3}, {"v3", 1, 4}}));
  EXPECT_TRUE(s.precursors("v1").empty());
  EXPECT_EQ(s.successors_before("v1", kEndOfTime), s.successors("v1"));
  EXPECT_TRUE(s.successors_before("v1", 0).empty());
}

TEST(Snapshot, UpdateMovesEdgeToDollTails) {
  Store s = replay(6);
  EXPECT_EQ(s.process_edge(ev("v1", "v2", 7, 1)), EdgeOutcome::Updated);
  EXPECT_EQ(s.edge_query("v1", "v2"), (EdgeInfo{2, 7}));
  const Index v1 = s.find_vertex("v1");
  const Index v2 = s.find_vertex("v2");
  const Index e = s.find_edge("v1", "v2");
  EXPECT_EQ(s.vertices()[v1].out_tail, e);
  EXPECT_EQ(s.vertices()[v2].in_tail, e);
  EXPECT_EQ(s.successors("v1"),
            (std::vector<Neighbor>{{"v4", 1, 3}, {"v2", 2, 7}}));
  EXPECT_EQ(s.successors_before("v1", 7), (std::vector<Neighbor>{{"v4", 1, 3}}));
  expect_clean(s);
}

TEST(Snapshot, DeletionFreesSlotAndVertex) {
  Store s = replay(7);
  EXPECT_EQ(s.process_edge(ev("v1", "v4", 8, -1)), EdgeOutcome::Deleted);
  EXPECT_EQ(s.edge_free_list(), (std::vector<Index>{2}));
  EXPECT_FALSE(s.edge_query("v1", "v4"));
  EXPECT_FALSE(s.edges()[2].occupied());
  expect_clean(s);

  EXPECT_EQ(s.process_edge(ev("v1", "v2", 9, -2)), EdgeOutcome::Deleted);
  EXPECT_FALSE(s.vertex_query("v1"));
  EXPECT_EQ(s.find_vertex("v1"), kNil);
  EXPECT_EQ(s.vertices().free_list(), (std::vector<Index>{0}));
  expect_clean(s);

  EXPECT_EQ(s.process_edge(ev("v1", "v2", 10, 1)), EdgeOutcome::Inserted);
  EXPECT_EQ(s.edge_query("v1", "v2"), (EdgeInfo{1, 10}));
  // Free slots are reused before the cursor advances.
  EXPECT_EQ(s.find_vertex("v1"), 0u);
  EXPECT_EQ(s.find_edge("v1", "v2"), 0u);
  EXPECT_EQ(s.live_edges(), 5u);
  EXPECT_EQ(s.live_vertices(), 5u);
  expect_clean(s);
}

TEST(Snapshot, DiscardsNonPositiveDeltaOnAbsentKey) {
  Store s(5, 6, example_hash());
  EXPECT_EQ(s.process_edge(ev("v9", "v9", 1, -5)), EdgeOutcome::Discarded);
  EXPECT_EQ(s.process_edge(ev("v9", "v8", 1, 0)), EdgeOutcome::Discarded);
  EXPECT_EQ(s.live_vertices(), 0u);
  EXPECT_EQ(s.last_time(), Timestamp{1});
  expect_clean(s);
}

TEST(Snapshot, ZeroDeltaRefreshesTime) {
  SnapshotStore s(4, 4);
  s.process_edge(ev("a", "b", 1, 2));
  s.process_edge(ev("a", "c", 2, 1));
  EXPECT_EQ(s.process_edge(ev("a", "b", 3, 0)), EdgeOutcome::Updated);
  EXPECT_EQ(s.edge_query("a", "b"), (EdgeInfo{2, 3}));
  EXPECT_EQ(s.successors("a").back().id, "b");
}

TEST(Snapshot, RejectsOutOfOrder) {
  SnapshotStore s(4, 4);
  s.process_edge(ev("a", "b", 5, 1));
  EXPECT_THROW(s.process_edge(ev("a", "c", 4, 1)), OrderError);
  EXPECT_FALSE(s.edge_query("a", "c"));
  EXPECT_NO_THROW(s.process_edge(ev("a", "c", 5, 1)));
}

TEST(Snapshot, SelfLoop) {
  SnapshotStore s(2, 2);
  EXPECT_EQ(s.process_edge(ev("a", "a", 1, 3)), EdgeOutcome::Inserted);
  EXPECT_EQ(s.vertex_query("a"), (VertexInfo{3, 3, 1, 1}));
  EXPECT_EQ(s.live_vertices(), 1u);
  EXPECT_TRUE(audit(s).empty());
  EXPECT_EQ(s.process_edge(ev("a", "a", 2, -3)), EdgeOutcome::Deleted);
  EXPECT_EQ(s.live_vertices(), 0u);
  EXPECT_TRUE(audit(s).empty());
}

TEST(Snapshot, GrowsWhenFull) {
  SnapshotStore s(1, 1);
  for (int i = 0; i < 50; ++i)
    s.process_edge(ev(("a" + std::to_string(i)).c_str(),
                      ("b" + std::to_string(i % 7)).c_str(), i, 1));
  EXPECT_EQ(s.live_edges(), 50u);
  EXPECT_GE(s.edge_capacity(), 50u);
  EXPECT_GE(s.vertex_capacity(), s.live_vertices());
  auto v = audit(s);
  EXPECT_TRUE(v.empty()) << v.front();
  EXPECT_EQ(s.edge_query("a3", "b3"), (EdgeInfo{1, 3}));
}

TEST(Snapshot, FixedCapacityThrowsWithoutSideEffects) {
  SnapshotStore s(2, 1, MurmurHasher{}, StoreOptions{false});
  s.process_edge(ev("a", "b", 1, 1));
  EXPECT_THROW(s.process_edge(ev("a", "c", 2, 1)), CapacityError);
  EXPECT_THROW(s.process_edge(ev("b", "a", 2, 1)), CapacityError);
  EXPECT_EQ(s.live_vertices(), 2u);
  EXPECT_EQ(s.live_edges(), 1u);
  EXPECT_TRUE(audit(s).empty());
  EXPECT_EQ(s.process_edge(ev("a", "b", 3, 1)), EdgeOutcome::Updated);
}

TEST(Snapshot, AuditCatchesCorruption) {
  // Break one Doll link by hand.
  Store s = replay(5);
  auto& edges = const_cast<std::vector<EdgeCell>&>(s.edges());
  edges[2].out_prev = kNil;
  EXPECT_FALSE(audit(s).empty());
}
