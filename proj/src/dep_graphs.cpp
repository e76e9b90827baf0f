#include "cclab/dep_graphs.hpp"

#include <algorithm>
#include <deque>

#include "cclab/partial_order.hpp"

namespace cclab {

void NodeRoles::add(const Operation& w) {
  if (!w.tag) throw DepGraphError("untagged operation " + w.id);
  switch (w.tag->kind) {
    case TagKind::Post:
      post_like = true;
      post_topics.insert(w.tag->topic);
      break;
    case TagKind::Comment:
      comment_topics.insert(w.tag->topic);
      break;
    case TagKind::AddFriend:
    case TagKind::RemoveFriend:
      post_like = true;
      break;
    case TagKind::WallRead:
      throw DepGraphError("write " + w.id + " tagged as a wall read");
  }
}

NodeRoles roles_of(const History& h, OpIndex i) {
  const Operation& o = h.op(i);
  NodeRoles roles;
  if (!o.tag) throw DepGraphError("untagged operation " + o.id);
  if (o.is_write()) {
    roles.add(o);
  } else {
    for (OpIndex w : h.sources(i)) roles.add(h.op(w));
  }
  return roles;
}

IntraParents intra_parents(const std::vector<NodeRoles>& roles, std::size_t k) {
  IntraParents out;
  const NodeRoles& cur = roles.at(k);
  for (const auto& topic : cur.comment_topics) {
    if (cur.post_topics.count(topic)) continue;  // the node opens the topic itself
    bool found = false;
    for (std::size_t j = k; j-- > 0;) {
      if (roles[j].in_topic(topic)) {
        out.backward.insert(j);
        found = true;
        break;
      }
    }
    if (!found) out.unanchored_topics.insert(topic);
  }
  if (cur.post_like) {
    for (std::size_t j = k; j-- > 0;) {
      if (roles[j].post_like) {
        out.backward.insert(j);
        break;
      }
    }
  }
  return out;
}

IntraDepGraph build_intra_graph(const History& h, const ProcessId& p) {
  const auto& local = h.local(p);
  IntraDepGraph d{p, local, {}};

  std::set<std::string> posted_anywhere;
  for (OpIndex w : h.writes()) {
    const auto& tag = h.op(w).tag;
    if (tag && tag->kind == TagKind::Post) posted_anywhere.insert(tag->topic);
  }

  std::vector<NodeRoles> roles;
  roles.reserve(local.size());
  for (OpIndex i : local) roles.push_back(roles_of(h, i));

  for (std::size_t k = 0; k < local.size(); ++k) {
    for (const auto& topic : roles[k].comment_topics) {
      if (posted_anywhere.count(topic) == 0) {
        throw DepGraphError("comment " + h.op(local[k]).id + " on topic '" + topic + "' that has no post");
      }
    }
    auto parents = intra_parents(roles, k);
    for (std::size_t j : parents.backward) d.edges.insert({local[j], local[k]});
    // Nothing of the topic precedes locally: anchor on its post node even
    // when that node comes later in the local history.
    for (const auto& topic : parents.unanchored_topics) {
      for (std::size_t j = k + 1; j < local.size(); ++j) {
        if (roles[j].post_topics.count(topic)) {
          d.edges.insert({local[j], local[k]});
          break;
        }
      }
    }
  }
  return d;
}

IntraGraphs build_intra_graphs(const History& h) {
  IntraGraphs out;
  for (const auto& p : h.processes()) out.emplace(p, build_intra_graph(h, p));
  return out;
}

IntraDepGraph chain_graph(const History& h, const ProcessId& p) {
  const auto& local = h.local(p);
  IntraDepGraph d{p, local, {}};
  for (std::size_t k = 1; k < local.size(); ++k) d.edges.insert({local[k - 1], local[k]});
  return d;
}

IntraGraphs chain_graphs(const History& h) {
  IntraGraphs out;
  for (const auto& p : h.processes()) out.emplace(p, chain_graph(h, p));
  return out;
}

std::vector<Violation> validate_intra_graph(const IntraDepGraph& d, const History& h) {
  std::vector<Violation> out;
  if (!h.has_process(d.process)) {
    out.push_back({"unknown_process", d.process});
    return out;
  }
  const auto& local = h.local(d.process);
  std::set<OpIndex> expected(local.begin(), local.end());
  std::set<OpIndex> nodes;
  for (OpIndex n : d.nodes) {
    if (n >= h.size()) {
      out.push_back({"foreign_node", "index " + std::to_string(n)});
      continue;
    }
    if (!nodes.insert(n).second) out.push_back({"duplicate_node", h.op(n).id});
    if (!expected.count(n)) out.push_back({"foreign_node", h.op(n).id + " is not an operation of " + d.process});
  }
  for (OpIndex n : expected) {
    if (!nodes.count(n)) out.push_back({"missing_node", h.op(n).id});
  }
  PartialOrder po(h.size());
  for (const auto& [a, b] : d.edges) {
    if (a >= h.size() || b >= h.size() || !nodes.count(a) || !nodes.count(b) || !expected.count(a) ||
        !expected.count(b)) {
      std::string ids = (a < h.size() ? h.op(a).id : "?") + "->" + (b < h.size() ? h.op(b).id : "?");
      out.push_back({"foreign_edge", ids});
      continue;
    }
    po.add_edge(a, b);
  }
  if (auto cycle = po.find_cycle()) {
    std::string path;
    for (OpIndex n : *cycle) path += h.op(n).id + " -> ";
    path += h.op(cycle->front()).id;
    out.push_back({"cycle", path});
  }
  return out;
}

InterDepGraph InterDepGraph::friends(const std::vector<ProcessId>& nodes,
                                     const std::vector<std::pair<ProcessId, ProcessId>>& pairs) {
  InterDepGraph g(false);
  for (const auto& n : nodes) g.add_node(n);
  for (const auto& [a, b] : pairs) g.add_edge(a, b);
  return g;
}

InterDepGraph InterDepGraph::complete(const std::vector<ProcessId>& nodes) {
  InterDepGraph g(false);
  for (const auto& a : nodes) {
    g.add_node(a);
    for (const auto& b : nodes) {
      if (a != b) g.add_edge(a, b);
    }
  }
  return g;
}

void InterDepGraph::add_node(const ProcessId& p) {
  nodes_.insert(p);
  succ_[p];
}

void InterDepGraph::add_edge(const ProcessId& from, const ProcessId& to) {
  add_node(from);
  add_node(to);
  succ_[from].insert(to);
  if (!directed_) succ_[to].insert(from);
}

bool InterDepGraph::has_edge(const ProcessId& from, const ProcessId& to) const {
  auto it = succ_.find(from);
  return it != succ_.end() && it->second.count(to) != 0;
}

const std::set<ProcessId>& InterDepGraph::successors(const ProcessId& p) const {
  auto it = succ_.find(p);
  if (it == succ_.end()) throw DepGraphError("unknown graph node " + p);
  return it->second;
}

std::vector<std::pair<ProcessId, ProcessId>> InterDepGraph::edges() const {
  std::vector<std::pair<ProcessId, ProcessId>> out;
  for (const auto& [from, tos] : succ_) {
    for (const auto& to : tos) {
      if (!directed_ && to < from) continue;
      out.emplace_back(from, to);
    }
  }
  return out;
}

bool d_reachable(const InterDepGraph& g, const ProcessId& u, const ProcessId& v, unsigned d) {
  if (!g.has_node(u)) throw DepGraphError("unknown graph node " + u);
  if (!g.has_node(v)) throw DepGraphError("unknown graph node " + v);
  if (u == v) return true;
  std::map<ProcessId, unsigned> depth{{u, 0}};
  std::deque<ProcessId> frontier{u};
  while (!frontier.empty()) {
    ProcessId n = frontier.front();
    frontier.pop_front();
    unsigned dn = depth[n];
    if (dn == d) continue;
    for (const auto& s : g.successors(n)) {
      if (depth.count(s)) continue;
      if (s == v) return true;
      depth[s] = dn + 1;
      frontier.push_back(s);
    }
  }
  return false;
}

bool common_friends_related(const InterDepGraph& g, const ProcessId& u, const ProcessId& v,
                            unsigned m) {
  if (g.directed()) throw DepGraphError("common-friend rule needs an undirected friends graph");
  if (m == 0) throw DepGraphError("multiplicity must be positive");
  const auto& nu = g.successors(u);
  const auto& nv = g.successors(v);
  if (nu.count(v)) return true;
  unsigned shared = 0;
  for (const auto& n : nu) {
    if (n != u && n != v && nv.count(n)) ++shared;
  }
  return shared >= m;
}

nlohmann::json intra_graph_to_json(const IntraDepGraph& d, const History& h) {
  nlohmann::json edges = nlohmann::json::array();
  for (const auto& [a, b] : d.edges) edges.push_back({h.op(a).id, h.op(b).id});
  return {{"process", d.process}, {"edges", edges}};
}

IntraDepGraph intra_graph_from_json(const nlohmann::json& j, const History& h) {
  IntraDepGraph d;
  d.process = j.at("process").get<std::string>();
  if (auto it = j.find("nodes"); it != j.end()) {
    for (const auto& id : *it) d.nodes.push_back(h.index_of(id.get<std::string>()));
  } else {
    d.nodes = h.local(d.process);
  }
  for (const auto& e : j.at("edges")) {
    d.edges.insert({h.index_of(e.at(0).get<std::string>()), h.index_of(e.at(1).get<std::string>())});
  }
  return d;
}

nlohmann::json intra_graphs_to_json(const IntraGraphs& graphs, const History& h) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& [p, d] : graphs) out.push_back(intra_graph_to_json(d, h));
  return out;
}

IntraGraphs intra_graphs_from_json(const nlohmann::json& j, const History& h) {
  IntraGraphs out;
  const nlohmann::json* list = &j;
  if (j.is_object() && j.contains("graphs")) list = &j.at("graphs");
  if (list->is_object()) {
    auto d = intra_graph_from_json(*list, h);
    out.emplace(d.process, std::move(d));
    return out;
  }
  for (const auto& g : *list) {
    auto d = intra_graph_from_json(g, h);
    auto process = d.process;
    if (!out.emplace(process, std::move(d)).second) {
      throw DepGraphError("two intra graphs for process " + process);
    }
  }
  return out;
}

nlohmann::json inter_graph_to_json(const InterDepGraph& g) {
  nlohmann::json edges = nlohmann::json::array();
  for (const auto& [a, b] : g.edges()) edges.push_back({a, b});
  return {{"directed", g.directed()}, {"nodes", g.nodes()}, {"edges", edges}};
}

InterDepGraph inter_graph_from_json(const nlohmann::json& j) {
  InterDepGraph g(j.value("directed", true));
  if (auto it = j.find("nodes"); it != j.end()) {
    for (const auto& n : *it) g.add_node(n.get<std::string>());
  }
  for (const auto& e : j.at("edges")) g.add_edge(e.at(0).get<std::string>(), e.at(1).get<std::string>());
  return g;
}

}  // namespace cclab
