#pragma once

// Hand-encoded reference executions: the lost/found wedding-ring story in
// its three variants, the relayed-read history used for the inter-process
// relaxation, and simulator scenarios that reproduce them.

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "cclab/dep_graphs.hpp"
#include "cclab/history.hpp"
#include "cclab/orders.hpp"
#include "cclab/sim.hpp"
#include "cclab/social.hpp"

namespace cclab {

// Alice loses then finds her ring, Bob comments on both posts, Calvin
// sees "found" before "No".
History fixture_a();
// Darren sees "glad" before "found".
History fixture_b();
// Calvin sees "glad" before "found".
History fixture_c();
// X posts, Y relays a comment after reading it, C sees the comment first.
History fixture_d();
InterDepGraph fixture_d_graph();

// The per-user dependency graphs of the story, written out edge by edge.
IntraGraphs story_graphs(const History& fixture_a_history);

// "No" is slow to reach Calvin's replica.
Scenario slow_comment_scenario(Protocol p);
// "found" is slow to reach Calvin's replica.
Scenario slow_post_scenario(Protocol p);
// Alice posts, removes Bob, then posts and comments on a job hunt.
std::vector<WallAction> remove_friend_script();
Scenario remove_friend_scenario(Protocol p, std::uint64_t seed);

// Fills in the diffs of a compiled script's reads, keyed by read id.
History with_diffs(const CompiledScript& cs, const std::map<OpId, std::vector<OpId>>& diffs,
                   const std::vector<ProcessId>& processes, const std::vector<FriendPair>& friends);

struct FixtureBundle {
  std::string name;
  History history;
  std::optional<IntraGraphs> graphs;
  std::optional<InterDepGraph> inter;
  InterOrderOptions inter_opts;
  std::optional<Scenario> scenario;
};

const std::vector<std::string>& fixture_names();
// Throws std::invalid_argument for unknown names.
FixtureBundle fixture(const std::string& name);

}  // namespace cclab
