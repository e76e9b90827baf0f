#pragma once

// Discrete-event simulation of clients attached to replicas of a wall
// store. Writes propagate with per-link delays, and each protocol decides
// when a received write may be exposed to readers.

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

#include "cclab/dep_graphs.hpp"
#include "cclab/history.hpp"
#include "cclab/orders.hpp"
#include "cclab/social.hpp"

namespace cclab {

using ReplicaId = std::string;

enum class Protocol { EventualP, CausalP, IntraCausalP, InterCausalP };

const char* to_string(Protocol p);
// "eventual", "causal", "intra-causal", "inter-causal"; "CausalP" etc. also.
Protocol parse_protocol(const std::string& text);

struct DelayModel {
  Time base{1};
  std::map<std::pair<ReplicaId, ReplicaId>, Time> links;          // directed
  std::map<std::pair<OpId, ReplicaId>, Time> overrides;           // multiplier
  Time jitter{0};  // extra delay drawn uniformly from [0, jitter]

  Time link(const ReplicaId& from, const ReplicaId& to) const;
};

struct Scenario {
  std::vector<ReplicaId> replicas;
  std::vector<ProcessId> processes;
  std::map<ProcessId, ReplicaId> home;
  std::vector<FriendPair> initial_friends;
  std::vector<WallAction> script;
  DelayModel delays;
  Protocol protocol = Protocol::CausalP;
  std::optional<InterDepGraph> inter_graph;
  InterOrderOptions inter_opts;
  std::uint64_t seed = 0;
  Time op_duration{1, 10};
};

class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Throws ScenarioError describing the first problem.
void validate_scenario(const Scenario& sc);

using DependencySets = std::map<OpId, std::set<OpId>>;

struct Visibility {
  OpId write;
  ReplicaId replica;
  Time issued{0};
  Time arrival{0};
  Time visible{0};
  Time latency() const { return visible - issued; }
};

struct Metrics {
  Protocol protocol = Protocol::CausalP;
  std::vector<Visibility> visibility;  // remote replicas only
  std::map<OpId, std::size_t> dependency_count;
  double mean_latency = 0;
  double max_latency = 0;
  double mean_dependencies = 0;
  bool converged = false;
  std::vector<std::string> skipped;  // actions the client could not issue

  std::optional<Time> latency(const OpId& write, const ReplicaId& replica) const;
};

struct SimResult {
  History history;
  Metrics metrics;
  DependencySets dependencies;
};

// Writes a replica must expose before `write` under the protocol, from
// the full set of writes preceding it in the protocol's order: the maximal
// ones, so the rest follows by recursive visibility.
std::set<OpIndex> nearest_dependencies(const std::set<OpIndex>& predecessors,
                                       const std::vector<std::set<OpIndex>>& predecessors_of);

// Whether a replica that has the write may expose it now.
bool visibility_check(Protocol p, bool arrived, const std::set<OpIndex>& deps,
                      const std::vector<bool>& visible_at_replica);

SimResult run(const Scenario& sc);

// Recomputes aggregates and the convergence flag from the raw records.
void measure(Metrics& m, const std::map<ReplicaId, std::set<OpId>>& final_visible);

nlohmann::json scenario_to_json(const Scenario& sc);
Scenario scenario_from_json(const nlohmann::json& j);
nlohmann::json metrics_to_json(const Metrics& m);
nlohmann::json dependencies_to_json(const DependencySets& d);

}  // namespace cclab
