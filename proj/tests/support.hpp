#pragma once

// Test-only oracles and generators. Nothing here calls into the order or
// checker code it is used to judge: orders are rebuilt from the history,
// closed by Floyd-Warshall, and serializations are found by enumerating
// permutations and replaying them.

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "cclab/checkers.hpp"
#include "cclab/dep_graphs.hpp"
#include "cclab/history.hpp"
#include "cclab/sim.hpp"

namespace cclab::testing {

using Matrix = std::vector<std::vector<bool>>;

Matrix floyd_closure(std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& edges);

// Generating edges of each model's relation, from first principles.
std::vector<std::pair<OpIndex, OpIndex>> oracle_edges(const History& h, ModelId m, const IntraGraphs* graphs,
                                                      const InterDepGraph* inter, const InterOrderOptions& opts);

// Direct replay of the read rules.
bool oracle_legal(const std::vector<OpIndex>& seq, const History& h, const std::optional<ProcessId>& subject);

// Permutation search; returns the id-lexicographically first legal
// extension. Meant for ground sets of at most ~9 operations.
std::optional<std::vector<OpIndex>> oracle_search(const History& h, std::vector<OpIndex> ground, const Matrix& closure,
                                                  const std::optional<ProcessId>& subject);

bool oracle_consistent(const History& h, ModelId m, const IntraGraphs* graphs = nullptr,
                       const InterDepGraph* inter = nullptr, const InterOrderOptions& opts = {});

struct GenOptions {
  std::size_t max_ops = 8;
  std::size_t min_ops = 1;
  bool friend_ops = false;
  bool registers = false;      // ReadObject/WriteValue on one shared register
  bool overlapping = true;     // random intervals across processes
  bool partial_friends = false;
};

History random_history(std::mt19937_64& rng, const GenOptions& opts);

// Every history of the degeneracy family (see the enumeration notes):
// 2-3 processes, 1..max_ops operations, one wall, disjoint diffs per reader.
void for_each_small_history(std::size_t max_ops, const std::function<void(const History&)>& fn);

// Random subgraph of each process's program order closure.
IntraGraphs random_sub_po_graphs(std::mt19937_64& rng, const History& h);
InterDepGraph random_inter_graph(std::mt19937_64& rng, const std::vector<ProcessId>& nodes, bool directed);

struct ScenarioGen {
  std::size_t max_ops = 14;
  bool remove_friends = true;
};

Scenario random_scenario(std::uint64_t seed, Protocol p, const ScenarioGen& g = {});

ModelId model_for(Protocol p);

}  // namespace cclab::testing
