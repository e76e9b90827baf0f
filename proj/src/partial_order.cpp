#include "cclab/partial_order.hpp"

#include <algorithm>
#include <mutex>
#include <stdexcept>

namespace cclab {

namespace detail {

struct ClosureCache {
  std::mutex mu;
  bool stale = true;
  std::vector<boost::dynamic_bitset<>> rows;
  std::vector<char> ready;
};

}  // namespace detail

PartialOrder::PartialOrder(std::size_t universe)
    : universe_(universe), succ_(universe), cache_(std::make_unique<detail::ClosureCache>()) {}

PartialOrder::PartialOrder(const PartialOrder& other)
    : universe_(other.universe_),
      edges_(other.edges_),
      succ_(other.succ_),
      cache_(std::make_unique<detail::ClosureCache>()) {}

PartialOrder& PartialOrder::operator=(const PartialOrder& other) {
  if (this != &other) {
    universe_ = other.universe_;
    edges_ = other.edges_;
    succ_ = other.succ_;
    cache_ = std::make_unique<detail::ClosureCache>();
  }
  return *this;
}

PartialOrder::PartialOrder(PartialOrder&&) noexcept = default;
PartialOrder& PartialOrder::operator=(PartialOrder&&) noexcept = default;
PartialOrder::~PartialOrder() = default;

void PartialOrder::invalidate() { cache_->stale = true; }

void PartialOrder::add_edge(OpIndex from, OpIndex to) {
  if (from >= universe_ || to >= universe_) {
    throw std::out_of_range("partial order edge outside its universe");
  }
  if (edges_.insert({from, to}).second) {
    succ_[from].push_back(to);
    invalidate();
  }
}

void PartialOrder::merge(const PartialOrder& other) {
  if (other.universe_ != universe_) {
    throw std::invalid_argument("merging partial orders over different universes");
  }
  for (const auto& [a, b] : other.edges_) add_edge(a, b);
}

const boost::dynamic_bitset<>& PartialOrder::row(OpIndex from) const {
  detail::ClosureCache& cache = *cache_;
  std::lock_guard<std::mutex> lock(cache.mu);
  if (cache.stale) {
    cache.rows.assign(universe_, boost::dynamic_bitset<>(universe_));
    cache.ready.assign(universe_, 0);
    cache.stale = false;
  }

  auto fill = [&](OpIndex start) {
    if (cache.ready[start]) return;
    auto& bits = cache.rows[start];
    std::vector<OpIndex> stack(succ_[start].begin(), succ_[start].end());
    while (!stack.empty()) {
      OpIndex n = stack.back();
      stack.pop_back();
      if (bits.test(n)) continue;
      bits.set(n);
      if (cache.ready[n]) {
        bits |= cache.rows[n];
        continue;
      }
      for (OpIndex s : succ_[n]) {
        if (!bits.test(s)) stack.push_back(s);
      }
    }
    cache.ready[start] = 1;
  };

  if (universe_ <= kEagerLimit) {
    for (OpIndex i = 0; i < universe_; ++i) fill(i);
  } else {
    fill(from);
  }
  return cache.rows[from];
}

bool PartialOrder::reaches(OpIndex from, OpIndex to) const {
  if (from >= universe_ || to >= universe_) return false;
  return row(from).test(to);
}

const boost::dynamic_bitset<>& PartialOrder::reachable_from(OpIndex from) const {
  if (from >= universe_) throw std::out_of_range("reachable_from outside universe");
  return row(from);
}

bool PartialOrder::acyclic() const {
  std::vector<std::size_t> indegree(universe_, 0);
  for (const auto& [a, b] : edges_) ++indegree[b];
  std::vector<OpIndex> ready;
  for (OpIndex i = 0; i < universe_; ++i) {
    if (indegree[i] == 0) ready.push_back(i);
  }
  std::size_t seen = 0;
  while (!ready.empty()) {
    OpIndex n = ready.back();
    ready.pop_back();
    ++seen;
    for (OpIndex s : succ_[n]) {
      if (--indegree[s] == 0) ready.push_back(s);
    }
  }
  return seen == universe_;
}

std::optional<std::vector<OpIndex>> PartialOrder::find_cycle() const {
  // Colour-marking DFS; the grey stack holds the current path.
  enum : char { kWhite, kGrey, kBlack };
  std::vector<char> colour(universe_, kWhite);
  std::vector<OpIndex> path;
  std::vector<std::size_t> next_child;
  for (OpIndex root = 0; root < universe_; ++root) {
    if (colour[root] != kWhite) continue;
    path.assign(1, root);
    next_child.assign(1, 0);
    colour[root] = kGrey;
    while (!path.empty()) {
      OpIndex n = path.back();
      std::size_t& k = next_child.back();
      if (k < succ_[n].size()) {
        OpIndex s = succ_[n][k++];
        if (colour[s] == kGrey) {
          auto it = std::find(path.begin(), path.end(), s);
          return std::vector<OpIndex>(it, path.end());
        }
        if (colour[s] == kWhite) {
          colour[s] = kGrey;
          path.push_back(s);
          next_child.push_back(0);
        }
      } else {
        colour[n] = kBlack;
        path.pop_back();
        next_child.pop_back();
      }
    }
  }
  return std::nullopt;
}

std::set<std::pair<OpIndex, OpIndex>> PartialOrder::closure_pairs() const {
  std::set<std::pair<OpIndex, OpIndex>> out;
  for (OpIndex a = 0; a < universe_; ++a) {
    const auto& bits = row(a);
    for (auto b = bits.find_first(); b != boost::dynamic_bitset<>::npos; b = bits.find_next(b)) {
      out.insert({a, b});
    }
  }
  return out;
}

bool PartialOrder::equivalent(const PartialOrder& other) const {
  if (other.universe_ != universe_) return false;
  for (OpIndex a = 0; a < universe_; ++a) {
    if (row(a) != other.row(a)) return false;
  }
  return true;
}

PartialOrder transitive_closure(const PartialOrder& po) {
  PartialOrder out(po.universe());
  for (const auto& [a, b] : po.closure_pairs()) out.add_edge(a, b);
  return out;
}

bool is_acyclic(const PartialOrder& po) { return po.acyclic(); }

}  // namespace cclab
