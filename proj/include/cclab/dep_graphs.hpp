#pragma once

// Intra-process dependency graphs (one DAG per process over its own
// operations) and inter-process dependency graphs (a graph over processes,
// e.g. a friends or subscription graph).

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "cclab/history.hpp"

namespace cclab {

class DepGraphError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct IntraDepGraph {
  ProcessId process;
  std::vector<OpIndex> nodes;
  std::set<std::pair<OpIndex, OpIndex>> edges;
};

using IntraGraphs = std::map<ProcessId, IntraDepGraph>;

// What a node stands for as far as the wall rules are concerned. A write
// has the roles of its own tag, a read the union over the writes it
// returns.
struct NodeRoles {
  bool post_like = false;
  std::set<std::string> post_topics;
  std::set<std::string> comment_topics;

  void add(const Operation& write);
  bool in_topic(const std::string& t) const {
    return post_topics.count(t) != 0 || comment_topics.count(t) != 0;
  }
};

NodeRoles roles_of(const History& h, OpIndex i);

struct IntraParents {
  std::set<std::size_t> backward;             // positions before k
  std::set<std::string> unanchored_topics;    // comment topics with no earlier node
};

// Parents of local position k that lie before it. Shared by the graph
// builder and the simulator, which only ever knows a prefix.
IntraParents intra_parents(const std::vector<NodeRoles>& roles, std::size_t k);

// Application rules for a wall application:
//  - a comment (or a read returning one) depends on the most recent
//    earlier operation of the same topic, or on the topic's post node if
//    nothing of the topic precedes it locally;
//  - a post, add-friend or remove-friend (or a read returning a post)
//    depends on the most recent earlier post-like operation.
// Reads take their roles from the writes they return.
// Throws DepGraphError for untagged operations and for comments whose topic
// has no post anywhere in the history.
IntraDepGraph build_intra_graph(const History& h, const ProcessId& p);
IntraGraphs build_intra_graphs(const History& h);

// The covering chain of p's program order.
IntraDepGraph chain_graph(const History& h, const ProcessId& p);
IntraGraphs chain_graphs(const History& h);

std::vector<Violation> validate_intra_graph(const IntraDepGraph& d, const History& h);

class InterDepGraph {
 public:
  explicit InterDepGraph(bool directed = true) : directed_(directed) {}

  // Undirected friends graph; both directions are stored.
  static InterDepGraph friends(const std::vector<ProcessId>& nodes,
                               const std::vector<std::pair<ProcessId, ProcessId>>& pairs);
  static InterDepGraph complete(const std::vector<ProcessId>& nodes);

  bool directed() const { return directed_; }
  void add_node(const ProcessId& p);
  void add_edge(const ProcessId& from, const ProcessId& to);

  bool has_node(const ProcessId& p) const { return nodes_.count(p) != 0; }
  bool has_edge(const ProcessId& from, const ProcessId& to) const;
  const std::set<ProcessId>& nodes() const { return nodes_; }
  const std::set<ProcessId>& successors(const ProcessId& p) const;
  std::vector<std::pair<ProcessId, ProcessId>> edges() const;

 private:
  bool directed_;
  std::set<ProcessId> nodes_;
  std::map<ProcessId, std::set<ProcessId>> succ_;
};

// A directed path of at most `d` hops from u to v (0 hops iff u == v).
// Throws DepGraphError when u or v is not a node.
bool d_reachable(const InterDepGraph& g, const ProcessId& u, const ProcessId& v, unsigned d);

// Friends graphs only: u and v are adjacent or share at least m neighbours.
bool common_friends_related(const InterDepGraph& g, const ProcessId& u, const ProcessId& v,
                            unsigned m);

nlohmann::json intra_graph_to_json(const IntraDepGraph& d, const History& h);
IntraDepGraph intra_graph_from_json(const nlohmann::json& j, const History& h);
// Array of graphs; a single graph object or {"graphs":[...]} is also read.
nlohmann::json intra_graphs_to_json(const IntraGraphs& graphs, const History& h);
IntraGraphs intra_graphs_from_json(const nlohmann::json& j, const History& h);

// {"directed":true,"nodes":[...],"edges":[["X","C"],...]}; undirected
// graphs list each pair once.
nlohmann::json inter_graph_to_json(const InterDepGraph& g);
InterDepGraph inter_graph_from_json(const nlohmann::json& j);

}  // namespace cclab
