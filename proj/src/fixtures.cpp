#include "cclab/fixtures.hpp"

#include <stdexcept>

namespace cclab {

namespace {

const std::vector<ProcessId> kStoryUsers = {"Alice", "Bob", "Calvin"};

std::vector<FriendPair> all_pairs(const std::vector<ProcessId>& users) {
  std::vector<FriendPair> out;
  for (std::size_t i = 0; i < users.size(); ++i) {
    for (std::size_t j = i + 1; j < users.size(); ++j) out.emplace_back(users[i], users[j]);
  }
  return out;
}

WallAction post(const OpId& id, const ProcessId& actor, const std::string& t, const std::string& text,
                const std::string& topic, const ProcessId& wall) {
  return {ActionKind::Post, actor, parse_time(t), text, topic, wall, {}, id};
}

WallAction comment(const OpId& id, const ProcessId& actor, const std::string& t, const std::string& text,
                   const std::string& topic, const ProcessId& wall) {
  return {ActionKind::Comment, actor, parse_time(t), text, topic, wall, {}, id};
}

WallAction read(const OpId& id, const ProcessId& actor, const std::string& t, const ProcessId& wall) {
  return {ActionKind::ReadWall, actor, parse_time(t), {}, {}, wall, {}, id};
}

// Alice's and Bob's side of the story, times in minutes after 9 am.
std::vector<WallAction> story_core() {
  return {
      post("w:lost", "Alice", "539", "lost", "lost", "Alice"),
      read("rB:lost", "Bob", "541", "Alice"),
      comment("w:No", "Bob", "544", "No", "lost", "Alice"),
      read("rA:No", "Alice", "550", "Alice"),
      post("w:found", "Alice", "570", "found", "found", "Alice"),
      read("rB:found", "Bob", "575", "Alice"),
      comment("w:glad", "Bob", "580", "glad", "found", "Alice"),
      read("rA:glad", "Alice", "585", "Alice"),
  };
}

const std::map<OpId, std::vector<OpId>> kCoreDiffs = {
    {"rB:lost", {"w:lost"}},
    {"rA:No", {"w:No"}},
    {"rB:found", {"w:found"}},
    {"rA:glad", {"w:glad"}},
};

History story_variant(const ProcessId& third, const std::string& tag,
                      const std::vector<std::pair<std::string, OpId>>& reads) {
  auto actions = story_core();
  auto diffs = kCoreDiffs;
  for (const auto& [t, write] : reads) {
    OpId rid = "r" + tag + ":" + write.substr(2);
    actions.push_back(read(rid, third, t, "Alice"));
    diffs[rid] = {write};
  }
  std::vector<ProcessId> users = {"Alice", "Bob", third};
  CompileOptions opts{users, all_pairs(users), Time(1)};
  return with_diffs(compile_script(actions, opts), diffs, users, all_pairs(users));
}

Scenario story_scenario(Protocol p) {
  Scenario sc;
  sc.replicas = {"RA", "RB", "RC"};
  sc.processes = kStoryUsers;
  sc.home = {{"Alice", "RA"}, {"Bob", "RB"}, {"Calvin", "RC"}};
  sc.initial_friends = all_pairs(kStoryUsers);
  sc.delays.base = Time(1);
  sc.protocol = p;
  sc.script = {
      post("w:lost", "Alice", "0", "lost", "lost", "Alice"),
      read("rB:1", "Bob", "2", "Alice"),
      comment("w:No", "Bob", "3", "No", "lost", "Alice"),
      read("rA:1", "Alice", "5", "Alice"),
      post("w:found", "Alice", "10", "found", "found", "Alice"),
      read("rB:2", "Bob", "12", "Alice"),
      comment("w:glad", "Bob", "13", "glad", "found", "Alice"),
      read("rA:2", "Alice", "15", "Alice"),
  };
  if (p == Protocol::InterCausalP) sc.inter_graph = InterDepGraph::complete(kStoryUsers);
  return sc;
}

}  // namespace

History with_diffs(const CompiledScript& cs, const std::map<OpId, std::vector<OpId>>& diffs,
                   const std::vector<ProcessId>& processes, const std::vector<FriendPair>& friends) {
  std::vector<Operation> ops = cs.ops;
  std::size_t used = 0;
  for (auto& o : ops) {
    auto it = diffs.find(o.id);
    if (it == diffs.end()) continue;
    if (o.kind != OpKind::ReadWallDiff) throw std::invalid_argument(o.id + " is not a wall read");
    o.returned = it->second;
    ++used;
  }
  if (used != diffs.size()) throw std::invalid_argument("diff given for an unknown read");
  return History(processes, ops, friends);
}

History fixture_a() {
  return story_variant("Calvin", "C", {{"542", "w:lost"}, {"577", "w:found"}, {"590", "w:No"}});
}

History fixture_b() {
  return story_variant("Darren", "D", {{"542", "w:lost"}, {"583", "w:glad"}, {"590", "w:found"}});
}

History fixture_c() {
  return story_variant("Calvin", "C", {{"542", "w:lost"}, {"583", "w:glad"}, {"590", "w:found"}});
}

History fixture_d() {
  std::vector<WallAction> actions = {
      post("w:x1", "X", "0", "x1", "t1", "X"),
      read("rY:x1", "Y", "2", "X"),
      comment("w:y1", "Y", "4", "y1", "t1", "X"),
      read("rC:y1", "C", "6", "X"),
      read("rC:x1", "C", "8", "X"),
  };
  std::vector<ProcessId> users = {"X", "Y", "C"};
  CompileOptions opts{users, all_pairs(users), Time(1)};
  return with_diffs(compile_script(actions, opts),
                    {{"rY:x1", {"w:x1"}}, {"rC:y1", {"w:y1"}}, {"rC:x1", {"w:x1"}}}, users, all_pairs(users));
}

InterDepGraph fixture_d_graph() {
  InterDepGraph g(true);
  for (const auto& p : {"X", "Y", "C"}) g.add_node(p);
  g.add_edge("X", "C");
  g.add_edge("Y", "C");
  return g;
}

IntraGraphs story_graphs(const History& h) {
  auto edge = [&](const char* a, const char* b) { return std::make_pair(h.index_of(a), h.index_of(b)); };
  IntraGraphs out;
  out["Alice"] = {"Alice", h.local("Alice"),
                  {edge("w:lost", "rA:No"), edge("w:lost", "w:found"), edge("w:found", "rA:glad")}};
  out["Bob"] = {"Bob", h.local("Bob"),
                {edge("rB:lost", "w:No"), edge("rB:lost", "rB:found"), edge("rB:found", "w:glad")}};
  out["Calvin"] = {"Calvin", h.local("Calvin"), {edge("rC:lost", "rC:found"), edge("rC:lost", "rC:No")}};
  return out;
}

Scenario slow_comment_scenario(Protocol p) {
  Scenario sc = story_scenario(p);
  sc.script.push_back(read("rC:1", "Calvin", "2", "Alice"));
  sc.script.push_back(read("rC:2", "Calvin", "12", "Alice"));
  sc.script.push_back(read("rC:3", "Calvin", "13.5", "Alice"));
  sc.delays.overrides[{"w:No", "RC"}] = Time(10);
  return sc;
}

Scenario slow_post_scenario(Protocol p) {
  Scenario sc = story_scenario(p);
  sc.script.push_back(read("rC:1", "Calvin", "2", "Alice"));
  sc.script.push_back(read("rC:2", "Calvin", "15", "Alice"));
  sc.script.push_back(read("rC:3", "Calvin", "22", "Alice"));
  sc.delays.overrides[{"w:found", "RC"}] = Time(10);
  return sc;
}

std::vector<WallAction> remove_friend_script() {
  WallAction remove{ActionKind::RemoveFriend, "Alice", Time(2), {}, {}, {}, "Bob", "rm:Bob"};
  return {
      post("w:vacation", "Alice", "0", "vacation", "vacation", "Alice"),
      read("rB:1", "Bob", "1", "Alice"),
      remove,
      read("rB:2", "Bob", "3", "Alice"),
      post("w:job", "Alice", "4", "job", "job", "Alice"),
      read("rB:3", "Bob", "5", "Alice"),
      comment("w:job2", "Alice", "6", "job2", "job", "Alice"),
      read("rC:1", "Calvin", "8", "Alice"),
  };
}

Scenario remove_friend_scenario(Protocol p, std::uint64_t seed) {
  Scenario sc;
  sc.replicas = {"RA", "RB", "RC"};
  sc.processes = kStoryUsers;
  sc.home = {{"Alice", "RA"}, {"Bob", "RB"}, {"Calvin", "RC"}};
  sc.initial_friends = all_pairs(kStoryUsers);
  sc.script = remove_friend_script();
  sc.delays.base = Time(1);
  sc.delays.jitter = Time(6);
  sc.protocol = p;
  sc.seed = seed;
  if (p == Protocol::InterCausalP) sc.inter_graph = InterDepGraph::complete(kStoryUsers);
  return sc;
}

const std::vector<std::string>& fixture_names() {
  static const std::vector<std::string> names = {"fix-a", "fix-b", "fix-c", "fix-d", "remove-friend"};
  return names;
}

FixtureBundle fixture(const std::string& name) {
  FixtureBundle b;
  b.name = name;
  if (name == "fix-a") {
    b.history = fixture_a();
    b.graphs = story_graphs(b.history);
    b.scenario = slow_comment_scenario(Protocol::IntraCausalP);
  } else if (name == "fix-b") {
    b.history = fixture_b();
    b.graphs = build_intra_graphs(b.history);
  } else if (name == "fix-c") {
    b.history = fixture_c();
    b.scenario = slow_post_scenario(Protocol::EventualP);
  } else if (name == "fix-d") {
    b.history = fixture_d();
    b.inter = fixture_d_graph();
    b.inter_opts.d = 1;
  } else if (name == "remove-friend") {
    std::vector<ProcessId> users = kStoryUsers;
    CompileOptions opts{users, all_pairs(users), Time(1, 10)};
    b.history = compile_script(remove_friend_script(), opts).history;
    b.scenario = remove_friend_scenario(Protocol::IntraCausalP, 0);
  } else {
    throw std::invalid_argument("unknown fixture: " + name);
  }
  return b;
}

}  // namespace cclab
