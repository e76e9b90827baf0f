#include "cclab/orders.hpp"

namespace cclab {

unsigned effective_d(const InterOrderOptions& opts, const Operation& write) {
  if (write.tag) {
    auto it = opts.d_by_kind.find(write.tag->kind);
    if (it != opts.d_by_kind.end()) return it->second;
  }
  return opts.d;
}

bool inter_reads_from_kept(const InterDepGraph& g, const InterOrderOptions& opts,
                           const Operation& write, const ProcessId& reader) {
  if (d_reachable(g, write.process, reader, effective_d(opts, write))) return true;
  return opts.multiplicity_m && common_friends_related(g, write.process, reader, *opts.multiplicity_m);
}

PartialOrder program_order(const History& h) {
  PartialOrder po(h.size());
  for (const auto& p : h.processes()) {
    const auto& local = h.local(p);
    for (std::size_t k = 1; k < local.size(); ++k) po.add_edge(local[k - 1], local[k]);
  }
  return po;
}

PartialOrder self_order(const History& h, const ProcessId& p) {
  PartialOrder po(h.size());
  const auto& local = h.local(p);
  for (std::size_t k = 1; k < local.size(); ++k) po.add_edge(local[k - 1], local[k]);
  return po;
}

PartialOrder intra_program_order(const History& h, const IntraGraphs& graphs) {
  PartialOrder po(h.size());
  for (const auto& p : h.processes()) {
    auto it = graphs.find(p);
    if (it == graphs.end()) {
      if (h.local(p).empty()) continue;
      throw DepGraphError("no intra dependency graph for process " + p);
    }
    // A cyclic graph is kept: the checker reports it as a cycle, which is
    // how a topic anchor pointing against observed order surfaces.
    auto problems = validate_intra_graph(it->second, h);
    std::erase_if(problems, [](const Violation& v) { return v.code == "cycle"; });
    if (!problems.empty()) {
      throw DepGraphError("intra graph of " + p + " does not match its history: " + problems.front().code +
                          " " + problems.front().detail);
    }
    for (const auto& [a, b] : it->second.edges) po.add_edge(a, b);
  }
  for (const auto& [p, d] : graphs) {
    if (!h.has_process(p)) throw DepGraphError("intra graph for unknown process " + p);
  }
  return po;
}

PartialOrder real_time_order(const History& h) {
  PartialOrder po(h.size());
  for (OpIndex a = 0; a < h.size(); ++a) {
    for (OpIndex b = 0; b < h.size(); ++b) {
      if (a != b && h.op(a).resp < h.op(b).inv) po.add_edge(a, b);
    }
  }
  return po;
}

PartialOrder intra_real_time_order(const History& h) {
  PartialOrder po(h.size());
  for (OpIndex a = 0; a < h.size(); ++a) {
    for (OpIndex b = 0; b < h.size(); ++b) {
      if (h.op(a).process != h.op(b).process && h.op(a).resp < h.op(b).inv) po.add_edge(a, b);
    }
  }
  return po;
}

PartialOrder causal_order(const History& h) {
  PartialOrder po = program_order(h);
  po.merge(derive_reads_from(h));
  return po;
}

PartialOrder intra_causal_order(const History& h, const IntraGraphs& graphs) {
  PartialOrder po = intra_program_order(h, graphs);
  po.merge(derive_reads_from(h));
  return po;
}

PartialOrder inter_causal_order(const History& h, const InterDepGraph& g,
                                const InterOrderOptions& opts) {
  for (const auto& p : h.processes()) {
    if (!g.has_node(p)) throw DepGraphError("process " + p + " is not a node of the inter graph");
  }
  PartialOrder po = program_order(h);
  for (OpIndex r = 0; r < h.size(); ++r) {
    const Operation& read = h.op(r);
    if (!read.is_read()) continue;
    for (OpIndex w : h.sources(r)) {
      if (inter_reads_from_kept(g, opts, h.op(w), read.process)) po.add_edge(w, r);
    }
  }
  return po;
}

}  // namespace cclab
