#pragma once

// Every order the consistency models are stated in. Each function returns
// the generating edges; PartialOrder::reaches answers for the transitive
// closure, which is the order the models mean.

#include <map>
#include <optional>

#include "cclab/dep_graphs.hpp"
#include "cclab/history.hpp"
#include "cclab/partial_order.hpp"

namespace cclab {

struct InterOrderOptions {
  unsigned d = 1;
  // Hop bound override keyed by the tag kind of the write being read.
  std::map<TagKind, unsigned> d_by_kind;
  std::optional<unsigned> multiplicity_m;
};

unsigned effective_d(const InterOrderOptions& opts, const Operation& write);

// Whether the reads-from edge write -> (read by reader) survives the
// inter-process filter.
bool inter_reads_from_kept(const InterDepGraph& g, const InterOrderOptions& opts,
                           const Operation& write, const ProcessId& reader);

// Covering edges of every process's local order.
PartialOrder program_order(const History& h);
// Program order of p alone.
PartialOrder self_order(const History& h, const ProcessId& p);
// Union of the graphs' edges. Every graph must validate against its local
// history (DepGraphError otherwise); processes without a graph contribute
// nothing only when they have no operations.
PartialOrder intra_program_order(const History& h, const IntraGraphs& graphs);

PartialOrder real_time_order(const History& h);
PartialOrder intra_real_time_order(const History& h);

PartialOrder causal_order(const History& h);
PartialOrder intra_causal_order(const History& h, const IntraGraphs& graphs);
// Program order plus the reads-from edges the graph keeps. Closure is taken
// under this relation itself.
PartialOrder inter_causal_order(const History& h, const InterDepGraph& g,
                                const InterOrderOptions& opts);

}  // namespace cclab
