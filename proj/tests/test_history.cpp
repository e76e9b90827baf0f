#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "cclab/fixtures.hpp"
#include "cclab/history.hpp"
#include "cclab/history_json.hpp"
#include "cclab/partial_order.hpp"
#include "support.hpp"

using namespace cclab;

namespace {

Operation write(const char* id, const char* p, const char* ns, const char* key, const char* value, int t) {
  Operation o;
  o.id = id;
  o.process = p;
  o.kind = OpKind::WriteValue;
  o.object = {ns, key};
  o.value = value;
  o.inv = Time(t);
  o.resp = Time(t + 1);
  return o;
}

Operation wall_read(const char* id, const char* p, const char* ns, std::vector<OpId> got, int t) {
  Operation o;
  o.id = id;
  o.process = p;
  o.kind = OpKind::ReadWallDiff;
  o.object = {ns, {}};
  o.returned = std::move(got);
  o.inv = Time(t);
  o.resp = Time(t + 1);
  return o;
}

bool has_code(const std::vector<Violation>& v, const std::string& code) {
  return std::any_of(v.begin(), v.end(), [&](const Violation& x) { return x.code == code; });
}

}  // namespace

TEST(History, CanonicalOrderAndLocals) {
  History h({"A", "B"}, {write("b1", "B", "wall:A", "x", "1", 5), write("a1", "A", "wall:A", "y", "2", 1),
                         write("a2", "A", "wall:A", "z", "3", 3)});
  EXPECT_EQ(h.op(0).id, "a1");
  EXPECT_EQ(h.op(1).id, "a2");
  EXPECT_EQ(h.local("A"), (std::vector<OpIndex>{0, 1}));
  EXPECT_THROW(h.local("Z"), HistoryError);
  EXPECT_THROW(h.index_of("nope"), HistoryError);
  EXPECT_EQ(project_pi_plus_w(h, "B"), (std::vector<OpIndex>{0, 1, 2}));
}

TEST(History, FixturesValidate) {
  for (const auto& h : {fixture_a(), fixture_b(), fixture_c(), fixture_d()}) {
    auto v = validate_history(h);
    EXPECT_TRUE(v.empty()) << (v.empty() ? "" : v.front().code + " " + v.front().detail);
  }
}

TEST(History, ValidationCodes) {
  auto dup = write("w", "A", "wall:A", "x", "1", 0);
  auto dup2 = write("w", "A", "wall:A", "y", "2", 4);
  EXPECT_TRUE(has_code(validate_history(History({"A"}, {dup, dup2})), "duplicate_op_id"));

  EXPECT_TRUE(has_code(validate_history(History({"A"}, {write("w", "Z", "wall:A", "x", "1", 0)})), "unknown_process"));

  auto bad = write("w", "A", "wall:A", "x", "1", 0);
  bad.resp = bad.inv;
  EXPECT_TRUE(has_code(validate_history(History({"A"}, {bad})), "bad_interval"));

  auto o1 = write("w1", "A", "wall:A", "x", "1", 0);
  auto o2 = write("w2", "A", "wall:A", "y", "2", 0);
  EXPECT_TRUE(has_code(validate_history(History({"A"}, {o1, o2})), "overlapping_ops"));

  auto v1 = write("w1", "A", "wall:A", "x", "1", 0);
  auto v2 = write("w2", "A", "wall:A", "x", "1", 4);
  EXPECT_TRUE(has_code(validate_history(History({"A"}, {v1, v2})), "duplicate_write_value"));

  auto c = write("w1", "A", "wall:A", "x", "1", 0);
  c.tag = AppTag{TagKind::Comment, "nothing", {}};
  EXPECT_TRUE(has_code(validate_history(History({"A"}, {c})), "orphan_comment"));

  auto r = wall_read("r", "B", "wall:A", {"ghost"}, 0);
  EXPECT_TRUE(has_code(validate_history(History({"A", "B"}, {r})), "read_of_nonexistent_value"));

  auto w = write("w1", "A", "wall:A", "x", "1", 0);
  auto r2 = wall_read("r", "B", "wall:A", {"w1", "w1"}, 4);
  EXPECT_TRUE(has_code(validate_history(History({"A", "B"}, {w, r2})), "malformed_diff"));

  auto ro = write("r", "A", "wall:A", "x", "1", 0);
  ro.kind = OpKind::ReadObject;
  ro.read_value = "7";
  EXPECT_TRUE(has_code(validate_history(History({"A"}, {ro})), "read_of_nonexistent_value"));

  auto wt = write("w1", "A", "wall:A", "x", "1", 0);
  wt.tag = AppTag{TagKind::WallRead, {}, {}};
  EXPECT_TRUE(has_code(validate_history(History({"A"}, {wt})), "bad_tag"));

  EXPECT_TRUE(has_code(validate_history(History({"A"}, {}, {{"A", "Q"}})), "unknown_friend"));
}

TEST(History, WallDiffLegality) {
  // A posts twice; B's two reads split the posts between them.
  History h({"A", "B"}, {write("w1", "A", "wall:A", "x", "1", 0), write("w2", "A", "wall:A", "y", "2", 2),
                         wall_read("r1", "B", "wall:A", {"w1"}, 1), wall_read("r2", "B", "wall:A", {"w2"}, 3)},
            {{"A", "B"}});
  auto id = [&](const char* s) { return h.index_of(s); };
  EXPECT_TRUE(is_legal_serialization({{id("w1"), id("r1"), id("w2"), id("r2")}, "B"}, h, "B"));
  EXPECT_FALSE(is_legal_serialization({{id("w1"), id("w2"), id("r1"), id("r2")}, "B"}, h, "B"));
  EXPECT_FALSE(is_legal_serialization({{id("r1"), id("w1"), id("w2"), id("r2")}, "B"}, h, "B"));
  EXPECT_THROW(is_legal_serialization({{id("w1"), id("r1")}, "B"}, h, "B"), HistoryError);
  auto why = explain_illegal({{id("w1"), id("w2"), id("r1"), id("r2")}, "B"}, h, "B");
  ASSERT_TRUE(why);
  EXPECT_NE(why->find("r1"), std::string::npos);
}

TEST(History, AccessControlInLegality) {
  // Without friendship B sees nothing; after A adds B the post is visible.
  Operation add = write("f1", "A", kFriendsNamespace, "A|B", "f1", 2);
  add.tag = AppTag{TagKind::AddFriend, {}, "B"};
  History h({"A", "B"}, {write("w1", "A", "wall:A", "x", "1", 0), add, wall_read("r1", "B", "wall:A", {}, 4)});
  auto id = [&](const char* s) { return h.index_of(s); };
  EXPECT_TRUE(is_legal_serialization({{id("w1"), id("r1"), id("f1")}, "B"}, h, "B"));
  EXPECT_FALSE(is_legal_serialization({{id("w1"), id("f1"), id("r1")}, "B"}, h, "B"));
}

TEST(History, ReadsFromEdges) {
  History h = fixture_a();
  auto rf = derive_reads_from(h);
  EXPECT_TRUE(rf.has_edge(h.index_of("w:No"), h.index_of("rA:No")));
  EXPECT_TRUE(rf.has_edge(h.index_of("w:found"), h.index_of("rC:found")));
  EXPECT_EQ(rf.edges().size(), 7u);
}

TEST(History, FriendshipLatestWins) {
  Friendship f({make_friend_pair("A", "B")});
  EXPECT_TRUE(f.permitted("B", "A"));
  Operation rm = write("f", "A", kFriendsNamespace, "A|B", "f", 0);
  rm.tag = AppTag{TagKind::RemoveFriend, {}, "B"};
  f.apply(rm);
  EXPECT_FALSE(f.permitted("B", "A"));
  EXPECT_FALSE(f.permitted("A", "B"));
  Operation add = rm;
  add.tag->kind = TagKind::AddFriend;
  f.apply(add);
  EXPECT_TRUE(f.permitted("A", "B"));
  EXPECT_TRUE(f.permitted("C", "C"));
}

TEST(HistoryJson, RoundTripsFixtures) {
  for (const auto& h : {fixture_a(), fixture_b(), fixture_d()}) {
    auto j = history_to_json(h);
    History back = history_from_json(j);
    EXPECT_EQ(history_to_json(back), j);
    ASSERT_EQ(back.size(), h.size());
    for (OpIndex i = 0; i < h.size(); ++i) {
      EXPECT_EQ(back.op(i).id, h.op(i).id);
      EXPECT_EQ(back.op(i).inv, h.op(i).inv);
      EXPECT_EQ(back.op(i).tag, h.op(i).tag);
      EXPECT_EQ(back.op(i).returned, h.op(i).returned);
    }
  }
}

TEST(HistoryJson, RandomRoundTrip) {
  std::mt19937_64 rng(11);
  cclab::testing::GenOptions g;
  g.friend_ops = true;
  g.registers = true;
  for (int i = 0; i < 50; ++i) {
    History h = cclab::testing::random_history(rng, g);
    EXPECT_EQ(history_to_json(history_from_json(history_to_json(h))), history_to_json(h));
  }
}

TEST(HistoryJson, NumericTimesAccepted) {
  auto j = json::parse(R"({"processes":["A"],"ops":[{"id":"w","process":"A","kind":"write",
      "namespace":"wall:A","key":"x","value":"1","inv":1,"resp":2.5}]})");
  History h = history_from_json(j);
  EXPECT_EQ(h.op(0).resp, Time(5, 2));
  EXPECT_THROW(history_from_json(json::parse(R"({"processes":["A"],"ops":[{"id":"w"}]})")), std::exception);
}

TEST(HistoryJson, OrdersRoundTrip) {
  History h = fixture_a();
  auto rf = derive_reads_from(h);
  auto back = order_from_json(order_to_json(rf, h), h);
  EXPECT_EQ(back.edges(), rf.edges());
}

TEST(HistoryProperty, RandomHistoriesAreValid) {
  std::mt19937_64 rng(3);
  cclab::testing::GenOptions g;
  g.friend_ops = true;
  g.registers = true;
  g.max_ops = 12;
  for (int i = 0; i < 200; ++i) {
    History h = cclab::testing::random_history(rng, g);
    auto v = validate_history(h);
    ASSERT_TRUE(v.empty()) << v.front().code << " " << v.front().detail;
  }
}

// The library's legality replay agrees with the test oracle's replay on
// random permutations of random ground sets.
TEST(HistoryProperty, LegalityMatchesOracle) {
  std::mt19937_64 rng(5);
  cclab::testing::GenOptions g;
  g.friend_ops = true;
  g.registers = true;
  g.partial_friends = true;
  int legal = 0;
  for (int i = 0; i < 400; ++i) {
    History h = cclab::testing::random_history(rng, g);
    const auto& p = h.processes()[0];
    auto ground = project_pi_plus_w(h, p);
    for (int k = 0; k < 10; ++k) {
      std::shuffle(ground.begin(), ground.end(), rng);
      bool mine = is_legal_serialization({ground, p}, h, p);
      ASSERT_EQ(mine, cclab::testing::oracle_legal(ground, h, p));
      legal += mine;
    }
  }
  EXPECT_GT(legal, 0);
}
