#include "cclab/sim.hpp"

#include <algorithm>
#include <queue>
#include <tuple>

#include "cclab/history_json.hpp"

namespace cclab {

namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Keyed by the action rather than the protocol's state, so every protocol
// sees the same network.
Time jitter_for(const Scenario& sc, const ProcessId& client, std::size_t action, const ReplicaId& to) {
  if (sc.delays.jitter == Time(0)) return Time(0);
  std::uint64_t h = splitmix(sc.seed);
  h = splitmix(h ^ fnv1a(client));
  h = splitmix(h ^ action);
  h = splitmix(h ^ fnv1a(to));
  constexpr std::int64_t kSteps = 1000;
  auto step = static_cast<std::int64_t>(h % (kSteps + 1));
  return sc.delays.jitter * Time(step, kSteps);
}

enum class EventKind { Issue, Arrive };

struct Event {
  Time t;
  ReplicaId replica;
  std::uint64_t seq;
  EventKind kind;
  std::size_t index;  // action for Issue, write for Arrive

  bool operator>(const Event& o) const {
    return std::tie(t, replica, seq) > std::tie(o.t, o.replica, o.seq);
  }
};

struct ReplicaState {
  std::vector<bool> arrived;
  std::vector<bool> visible;
  std::vector<std::size_t> order;    // visibility order
  std::vector<std::size_t> pending;  // arrived, not yet visible
  Friendship friends;
};

struct ClientState {
  std::vector<std::size_t> local;
  std::vector<NodeRoles> roles;
  std::map<std::string, std::set<std::size_t>> returned;  // per namespace
  std::size_t actions = 0;
};

}  // namespace

const char* to_string(Protocol p) {
  switch (p) {
    case Protocol::EventualP: return "EventualP";
    case Protocol::CausalP: return "CausalP";
    case Protocol::IntraCausalP: return "IntraCausalP";
    case Protocol::InterCausalP: return "InterCausalP";
  }
  return "?";
}

Protocol parse_protocol(const std::string& text) {
  std::string key;
  for (char c : text) {
    if (c != '-' && c != '_') key.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  if (!key.empty() && key.back() == 'p') key.pop_back();
  if (key == "eventual") return Protocol::EventualP;
  if (key == "causal") return Protocol::CausalP;
  if (key == "intracausal") return Protocol::IntraCausalP;
  if (key == "intercausal") return Protocol::InterCausalP;
  throw ScenarioError("unknown protocol: " + text);
}

Time DelayModel::link(const ReplicaId& from, const ReplicaId& to) const {
  auto it = links.find({from, to});
  return it == links.end() ? base : it->second;
}

std::optional<Time> Metrics::latency(const OpId& write, const ReplicaId& replica) const {
  for (const auto& v : visibility) {
    if (v.write == write && v.replica == replica) return v.latency();
  }
  return std::nullopt;
}

void validate_scenario(const Scenario& sc) {
  if (sc.replicas.empty()) throw ScenarioError("scenario has no replicas");
  std::set<ReplicaId> replicas(sc.replicas.begin(), sc.replicas.end());
  if (replicas.size() != sc.replicas.size()) throw ScenarioError("duplicate replica id");
  std::set<ProcessId> procs(sc.processes.begin(), sc.processes.end());
  if (procs.size() != sc.processes.size()) throw ScenarioError("duplicate client id");
  for (const auto& p : sc.processes) {
    auto it = sc.home.find(p);
    if (it == sc.home.end()) throw ScenarioError("client " + p + " has no home replica");
    if (!replicas.count(it->second)) throw ScenarioError("client " + p + " maps to unknown replica " + it->second);
  }
  for (const auto& [p, r] : sc.home) {
    if (!procs.count(p)) throw ScenarioError("home replica given for unknown client " + p);
  }
  for (const auto& [a, b] : sc.initial_friends) {
    if (!procs.count(a) || !procs.count(b)) throw ScenarioError("initial friendship with unknown client");
  }
  if (!(sc.delays.base > Time(0))) throw ScenarioError("base delay must be positive");
  for (const auto& [link, d] : sc.delays.links) {
    if (!(d > Time(0))) throw ScenarioError("link delay must be positive");
    if (!replicas.count(link.first) || !replicas.count(link.second)) throw ScenarioError("delay for unknown replica");
  }
  for (const auto& [key, mult] : sc.delays.overrides) {
    if (!(mult > Time(0))) throw ScenarioError("delay multiplier must be positive");
    if (!replicas.count(key.second)) throw ScenarioError("override for unknown replica " + key.second);
  }
  if (sc.delays.jitter < Time(0)) throw ScenarioError("jitter must not be negative");
  if (!(sc.op_duration > Time(0))) throw ScenarioError("operation duration must be positive");

  std::map<ProcessId, Time> last;
  for (const auto& a : sc.script) {
    if (!procs.count(a.actor)) throw ScenarioError("action by unknown client " + a.actor);
    if (!a.owner.empty() && !procs.count(a.owner)) throw ScenarioError("wall of unknown user " + a.owner);
    if ((a.kind == ActionKind::AddFriend || a.kind == ActionKind::RemoveFriend) && !procs.count(a.subject)) {
      throw ScenarioError("friend change with unknown user " + a.subject);
    }
    if (auto it = last.find(a.actor); it != last.end() && !(it->second + sc.op_duration < a.issue_time)) {
      throw ScenarioError("actions of " + a.actor + " are not spaced by more than the operation duration");
    }
    last[a.actor] = a.issue_time;
  }
  if (sc.protocol == Protocol::InterCausalP) {
    if (!sc.inter_graph) throw ScenarioError("InterCausalP needs an inter-process graph");
    for (const auto& p : sc.processes) {
      if (!sc.inter_graph->has_node(p)) throw ScenarioError("client " + p + " is not in the inter-process graph");
    }
  }
}

std::set<OpIndex> nearest_dependencies(const std::set<OpIndex>& predecessors,
                                       const std::vector<std::set<OpIndex>>& predecessors_of) {
  std::set<OpIndex> out;
  for (OpIndex w : predecessors) {
    bool covered = false;
    for (OpIndex other : predecessors) {
      if (other != w && predecessors_of.at(other).count(w)) {
        covered = true;
        break;
      }
    }
    if (!covered) out.insert(w);
  }
  return out;
}

bool visibility_check(Protocol p, bool arrived, const std::set<OpIndex>& deps,
                      const std::vector<bool>& visible_at_replica) {
  if (!arrived) return false;
  if (p == Protocol::EventualP) return true;
  return std::all_of(deps.begin(), deps.end(), [&](OpIndex d) { return visible_at_replica.at(d); });
}

SimResult run(const Scenario& sc) {
  validate_scenario(sc);

  struct Issued {
    Operation op;
    ReplicaId home;
    Time issued;
  };
  std::vector<Issued> ops;
  std::vector<std::set<OpIndex>> pred;  // writes preceding each op in the protocol's order
  std::vector<std::set<OpIndex>> deps;
  std::map<ReplicaId, ReplicaState> replicas;
  std::set<FriendPair> initial;
  for (const auto& [a, b] : sc.initial_friends) initial.insert(make_friend_pair(a, b));
  for (const auto& r : sc.replicas) replicas[r].friends = Friendship(initial);
  std::map<ProcessId, ClientState> clients;
  Metrics metrics;
  metrics.protocol = sc.protocol;

  std::priority_queue<Event, std::vector<Event>, std::greater<>> queue;
  std::uint64_t seq = 0;
  for (std::size_t k = 0; k < sc.script.size(); ++k) {
    const auto& a = sc.script[k];
    queue.push({a.issue_time, sc.home.at(a.actor), seq++, EventKind::Issue, k});
  }

  // Action index per write, for jitter keys.
  std::vector<std::size_t> action_of;

  auto expose = [&](ReplicaState& st, std::size_t w) {
    st.visible[w] = true;
    st.order.push_back(w);
    if (ops[w].op.is_friend_op()) st.friends.apply(ops[w].op);
  };

  std::map<std::pair<std::size_t, ReplicaId>, Time> visible_at;
  std::map<std::pair<std::size_t, ReplicaId>, Time> arrived_at;

  auto settle = [&](const ReplicaId& rid, const Time& now) {
    ReplicaState& st = replicas.at(rid);
    bool progress = true;
    while (progress) {
      progress = false;
      for (auto it = st.pending.begin(); it != st.pending.end(); ++it) {
        if (visibility_check(sc.protocol, true, deps[*it], st.visible)) {
          std::size_t w = *it;
          st.pending.erase(it);
          expose(st, w);
          visible_at[{w, rid}] = now;
          progress = true;
          break;
        }
      }
    }
  };

  std::vector<Operation> emitted;
  while (!queue.empty()) {
    Event ev = queue.top();
    queue.pop();
    ReplicaState& st = replicas.at(ev.replica);

    if (ev.kind == EventKind::Arrive) {
      st.arrived[ev.index] = true;
      arrived_at[{ev.index, ev.replica}] = ev.t;
      st.pending.push_back(ev.index);
      settle(ev.replica, ev.t);
      continue;
    }

    const WallAction& a = sc.script[ev.index];
    ClientState& cs = clients[a.actor];
    std::size_t n = ++cs.actions;
    OpId id = a.id.empty() ? default_op_id(a, n) : a.id;
    Operation op = compile_action(a, id, sc.op_duration);

    if (a.kind == ActionKind::Comment) {
      bool observed = std::any_of(cs.roles.begin(), cs.roles.end(),
                                  [&](const NodeRoles& r) { return r.in_topic(a.topic); });
      if (!observed) {
        metrics.skipped.push_back(id + ": " + a.actor + " has not seen topic " + a.topic);
        continue;
      }
    }

    const std::size_t self = ops.size();
    std::vector<std::size_t> sources;
    if (op.kind == OpKind::ReadWallDiff) {
      auto& seen = cs.returned[op.object.ns];
      for (std::size_t w : st.order) {
        const Operation& wo = ops[w].op;
        if (wo.object.ns != op.object.ns || wo.process == a.actor || seen.count(w)) continue;
        if (!access_permitted(a.actor, wo.process, st.friends)) continue;
        sources.push_back(w);
        op.returned.push_back(wo.id);
      }
      seen.insert(sources.begin(), sources.end());
    }

    NodeRoles roles;
    if (op.is_write()) {
      roles.add(op);
    } else {
      for (std::size_t w : sources) roles.add(ops[w].op);
    }
    cs.roles.push_back(roles);

    std::set<std::size_t> immediate;
    if (sc.protocol == Protocol::IntraCausalP) {
      for (std::size_t j : intra_parents(cs.roles, cs.roles.size() - 1).backward) immediate.insert(cs.local[j]);
    } else if (!cs.local.empty()) {
      immediate.insert(cs.local.back());
    }
    for (std::size_t w : sources) {
      if (sc.protocol == Protocol::InterCausalP &&
          !inter_reads_from_kept(*sc.inter_graph, sc.inter_opts, ops[w].op, a.actor)) {
        continue;
      }
      immediate.insert(w);
    }
    std::set<OpIndex> mine;
    for (std::size_t e : immediate) {
      if (ops[e].op.is_write()) mine.insert(e);
      mine.insert(pred[e].begin(), pred[e].end());
    }

    ops.push_back({op, ev.replica, ev.t});
    pred.push_back(mine);
    deps.emplace_back();
    action_of.push_back(ev.index);
    cs.local.push_back(self);
    emitted.push_back(op);
    for (auto& [rid, rs] : replicas) {
      rs.arrived.push_back(false);
      rs.visible.push_back(false);
    }

    if (op.is_write()) {
      if (sc.protocol != Protocol::EventualP) deps[self] = nearest_dependencies(mine, pred);
      for (std::size_t d : deps[self]) {
        if (!st.visible[d]) throw std::logic_error("dependency of " + id + " not visible at its home replica");
      }
      st.arrived[self] = true;
      arrived_at[{self, ev.replica}] = ev.t;
      expose(st, self);
      visible_at[{self, ev.replica}] = ev.t;
      for (const auto& rid : sc.replicas) {
        if (rid == ev.replica) continue;
        Time delay = sc.delays.link(ev.replica, rid);
        if (auto it = sc.delays.overrides.find({id, rid}); it != sc.delays.overrides.end()) delay *= it->second;
        delay += jitter_for(sc, a.actor, ev.index, rid);
        queue.push({ev.t + delay, rid, seq++, EventKind::Arrive, self});
      }
      // Writes already pending elsewhere cannot depend on this one, but
      // the home replica may hold some that waited for it.
      settle(ev.replica, ev.t);
    }
  }

  SimResult out;
  std::map<ReplicaId, std::set<OpId>> final_visible;
  for (const auto& rid : sc.replicas) final_visible[rid];
  for (std::size_t w = 0; w < ops.size(); ++w) {
    if (!ops[w].op.is_write()) continue;
    std::set<OpId> names;
    for (std::size_t d : deps[w]) names.insert(ops[d].op.id);
    out.dependencies[ops[w].op.id] = names;
    metrics.dependency_count[ops[w].op.id] = names.size();
    for (const auto& rid : sc.replicas) {
      auto vis = visible_at.find({w, rid});
      if (vis == visible_at.end()) {
        if (!replicas.at(rid).arrived[w]) throw std::logic_error(ops[w].op.id + " never arrived at " + rid);
        throw ScenarioError("undeliverable dependency: " + ops[w].op.id + " never becomes visible at " + rid);
      }
      final_visible[rid].insert(ops[w].op.id);
      if (rid == ops[w].home) continue;
      metrics.visibility.push_back({ops[w].op.id, rid, ops[w].issued, arrived_at.at({w, rid}), vis->second});
    }
  }
  measure(metrics, final_visible);
  out.metrics = std::move(metrics);
  out.history = History(sc.processes, emitted, sc.initial_friends);
  return out;
}

void measure(Metrics& m, const std::map<ReplicaId, std::set<OpId>>& final_visible) {
  Time total(0);
  Time worst(0);
  for (const auto& v : m.visibility) {
    total += v.latency();
    worst = std::max(worst, v.latency());
  }
  m.mean_latency = m.visibility.empty() ? 0.0 : to_double(total) / static_cast<double>(m.visibility.size());
  m.max_latency = to_double(worst);
  std::size_t deps = 0;
  for (const auto& [w, c] : m.dependency_count) deps += c;
  m.mean_dependencies =
      m.dependency_count.empty() ? 0.0 : static_cast<double>(deps) / static_cast<double>(m.dependency_count.size());
  m.converged = true;
  for (const auto& [r, s] : final_visible) {
    if (s != final_visible.begin()->second) m.converged = false;
  }
}

nlohmann::json scenario_to_json(const Scenario& sc) {
  nlohmann::json j;
  j["replicas"] = sc.replicas;
  nlohmann::json clients = nlohmann::json::array();
  for (const auto& p : sc.processes) clients.push_back({{"id", p}, {"replica", sc.home.at(p)}});
  j["clients"] = clients;
  nlohmann::json friends = nlohmann::json::array();
  for (const auto& [a, b] : sc.initial_friends) friends.push_back({a, b});
  j["initial_friends"] = friends;
  j["script"] = script_to_json(sc.script);
  nlohmann::json delays{{"base", time_to_json(sc.delays.base)}, {"jitter", time_to_json(sc.delays.jitter)}};
  delays["links"] = nlohmann::json::array();
  for (const auto& [l, d] : sc.delays.links) {
    delays["links"].push_back({{"from", l.first}, {"to", l.second}, {"delay", time_to_json(d)}});
  }
  delays["overrides"] = nlohmann::json::array();
  for (const auto& [k, mult] : sc.delays.overrides) {
    delays["overrides"].push_back({{"write", k.first}, {"replica", k.second}, {"multiplier", time_to_json(mult)}});
  }
  j["delays"] = delays;
  j["protocol"] = to_string(sc.protocol);
  if (sc.inter_graph) j["inter_graph"] = inter_graph_to_json(*sc.inter_graph);
  j["d"] = sc.inter_opts.d;
  if (sc.inter_opts.multiplicity_m) j["m"] = *sc.inter_opts.multiplicity_m;
  if (!sc.inter_opts.d_by_kind.empty()) {
    nlohmann::json by_kind = nlohmann::json::object();
    for (const auto& [k, d] : sc.inter_opts.d_by_kind) by_kind[to_string(k)] = d;
    j["d_by_kind"] = by_kind;
  }
  j["seed"] = sc.seed;
  j["op_duration"] = time_to_json(sc.op_duration);
  return j;
}

Scenario scenario_from_json(const nlohmann::json& j) {
  Scenario sc;
  try {
    sc.replicas = j.at("replicas").get<std::vector<ReplicaId>>();
    const auto& clients = j.at("clients");
    if (clients.is_object()) {
      for (const auto& [p, r] : clients.items()) {
        sc.processes.push_back(p);
        sc.home[p] = r.get<std::string>();
      }
    } else {
      for (const auto& c : clients) {
        auto p = c.at("id").get<std::string>();
        sc.processes.push_back(p);
        sc.home[p] = c.at("replica").get<std::string>();
      }
    }
    for (const auto& f : j.value("initial_friends", nlohmann::json::array())) {
      sc.initial_friends.emplace_back(f.at(0).get<std::string>(), f.at(1).get<std::string>());
    }
    sc.script = script_from_json(j.at("script"));
    if (auto it = j.find("delays"); it != j.end()) {
      const auto& d = *it;
      if (d.contains("base")) sc.delays.base = time_from_json(d.at("base"));
      if (d.contains("jitter")) sc.delays.jitter = time_from_json(d.at("jitter"));
      for (const auto& l : d.value("links", nlohmann::json::array())) {
        sc.delays.links[{l.at("from").get<std::string>(), l.at("to").get<std::string>()}] =
            time_from_json(l.at("delay"));
      }
      for (const auto& o : d.value("overrides", nlohmann::json::array())) {
        sc.delays.overrides[{o.at("write").get<std::string>(), o.at("replica").get<std::string>()}] =
            time_from_json(o.at("multiplier"));
      }
    }
    sc.protocol = parse_protocol(j.value("protocol", std::string("causal")));
    if (auto it = j.find("inter_graph"); it != j.end()) sc.inter_graph = inter_graph_from_json(*it);
    sc.inter_opts.d = j.value("d", 1u);
    if (auto it = j.find("m"); it != j.end() && !it->is_null()) sc.inter_opts.multiplicity_m = it->get<unsigned>();
    if (auto it = j.find("d_by_kind"); it != j.end()) {
      for (const auto& [k, d] : it->items()) sc.inter_opts.d_by_kind[parse_tag_kind(k)] = d.get<unsigned>();
    }
    sc.seed = j.value("seed", std::uint64_t{0});
    if (j.contains("op_duration")) sc.op_duration = time_from_json(j.at("op_duration"));
  } catch (const nlohmann::json::exception& e) {
    throw ScenarioError(std::string("malformed scenario: ") + e.what());
  }
  return sc;
}

nlohmann::json metrics_to_json(const Metrics& m) {
  nlohmann::json vis = nlohmann::json::array();
  for (const auto& v : m.visibility) {
    vis.push_back({{"write", v.write},
                   {"replica", v.replica},
                   {"issued", to_double(v.issued)},
                   {"arrival", to_double(v.arrival)},
                   {"visible", to_double(v.visible)},
                   {"latency", to_double(v.latency())}});
  }
  nlohmann::json deps = nlohmann::json::object();
  for (const auto& [w, c] : m.dependency_count) deps[w] = c;
  return {{"protocol", to_string(m.protocol)},
          {"visibility", vis},
          {"dependency_count", deps},
          {"mean_latency", m.mean_latency},
          {"max_latency", m.max_latency},
          {"mean_dependencies", m.mean_dependencies},
          {"converged", m.converged},
          {"skipped", m.skipped}};
}

nlohmann::json dependencies_to_json(const DependencySets& d) {
  nlohmann::json out = nlohmann::json::object();
  for (const auto& [w, s] : d) out[w] = s;
  return out;
}

}  // namespace cclab
