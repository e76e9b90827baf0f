#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include <boost/dynamic_bitset.hpp>

#include "cclab/history.hpp"

namespace cclab {

namespace detail {
struct ClosureCache;
}

// A relation over the operations of one history (indices 0..universe-1)
// with reachability queries. Edges are kept as given; reaches() answers
// for the transitive closure.
class PartialOrder {
 public:
  // Universes up to this size are closed eagerly on first query; larger
  // ones close one row at a time on demand.
  static constexpr std::size_t kEagerLimit = 256;

  explicit PartialOrder(std::size_t universe = 0);
  PartialOrder(const PartialOrder& other);
  PartialOrder& operator=(const PartialOrder& other);
  PartialOrder(PartialOrder&&) noexcept;
  PartialOrder& operator=(PartialOrder&&) noexcept;
  ~PartialOrder();

  std::size_t universe() const { return universe_; }
  const std::set<std::pair<OpIndex, OpIndex>>& edges() const { return edges_; }
  bool empty() const { return edges_.empty(); }

  void add_edge(OpIndex from, OpIndex to);
  void merge(const PartialOrder& other);

  bool has_edge(OpIndex from, OpIndex to) const { return edges_.count({from, to}) != 0; }
  // True iff a directed path of length >= 1 leads from `from` to `to`.
  bool reaches(OpIndex from, OpIndex to) const;
  // All nodes reachable from `from` by a path of length >= 1.
  const boost::dynamic_bitset<>& reachable_from(OpIndex from) const;

  bool acyclic() const;
  // Some directed cycle over the stored edges, as the sequence of its
  // nodes (first node not repeated).
  std::optional<std::vector<OpIndex>> find_cycle() const;

  std::set<std::pair<OpIndex, OpIndex>> closure_pairs() const;
  // Same closure, i.e. relation equality up to transitivity.
  bool equivalent(const PartialOrder& other) const;

 private:
  void invalidate();
  const boost::dynamic_bitset<>& row(OpIndex from) const;

  std::size_t universe_ = 0;
  std::set<std::pair<OpIndex, OpIndex>> edges_;
  std::vector<std::vector<OpIndex>> succ_;
  // Mutation is single-threaded; concurrent const queries share the cache.
  std::unique_ptr<detail::ClosureCache> cache_;
};

PartialOrder transitive_closure(const PartialOrder& po);
bool is_acyclic(const PartialOrder& po);

}  // namespace cclab
