#pragma once

// Decision procedures for the consistency models, with witness
// serializations for consistent histories and certificates for the rest.

#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "cclab/dep_graphs.hpp"
#include "cclab/history.hpp"
#include "cclab/orders.hpp"
#include "cclab/partial_order.hpp"

namespace cclab {

enum class ModelId {
  Eventual,
  Causal,
  IntraCausal,
  InterCausal,
  PRAM,
  IntraPRAM,
  Sequential,
  IntraSequential,
  Linearizable,
  IntraLinearizable,
};

const char* to_string(ModelId m);
// Accepts "IntraCausal", "intra-causal" and "intra_causal" spellings.
ModelId parse_model(const std::string& text);
const std::vector<ModelId>& all_models();

enum class Scope { PerProcess, Global };

struct CheckContext {
  const IntraGraphs* graphs = nullptr;
  const InterDepGraph* inter = nullptr;
  InterOrderOptions inter_opts;
  std::size_t max_search = 16;
};

struct RequiredOrder {
  PartialOrder order;
  Scope scope = Scope::PerProcess;
};

// The model's relation, without the per-subject self-order. Throws
// std::invalid_argument when the model needs graphs the context lacks.
RequiredOrder required_order(const History& h, ModelId model, const CheckContext& ctx);

// What one serialization has to respect: the required order, plus the
// subject's own program order for per-process models.
PartialOrder subject_order(const History& h, const RequiredOrder& required,
                           const std::optional<ProcessId>& subject);

class SearchLimitExceeded : public std::runtime_error {
 public:
  SearchLimitExceeded(std::size_t ground, std::size_t limit, std::optional<ProcessId> process);
  const std::optional<ProcessId>& process() const { return process_; }

 private:
  std::optional<ProcessId> process_;
};

// Lexicographically smallest (by op id) linear extension of `order` over
// `ground` that is a legal serialization, or nullopt if there is none.
// Throws SearchLimitExceeded when the ground set is larger than max_ground.
std::optional<Serialization> brute_force_search(std::span<const OpIndex> ground, const PartialOrder& order,
                                                const History& h, const std::optional<ProcessId>& subject,
                                                std::size_t max_ground = 16);

struct Certificate {
  enum class Kind { Cycle, MissingVisibility, Unserializable };
  Kind kind = Kind::Unserializable;
  std::optional<ProcessId> process;
  std::vector<OpIndex> ops;
  std::string detail;
};

const char* to_string(Certificate::Kind k);

// Cheap sound pre-filter. A certificate means no legal serialization of
// `ground` respects `order`; nullopt says nothing.
std::optional<Certificate> fast_necessary_check(std::span<const OpIndex> ground, const PartialOrder& order,
                                                const History& h, const std::optional<ProcessId>& subject);

bool respects(const Serialization& s, const PartialOrder& order);

struct Verdict {
  ModelId model = ModelId::Causal;
  Scope scope = Scope::PerProcess;
  bool consistent = false;
  std::map<ProcessId, Serialization> witnesses;  // per-process models
  std::optional<Serialization> witness;          // total-order models
  std::optional<Certificate> violation;
};

Verdict check(const History& h, ModelId model, const CheckContext& ctx);

nlohmann::json certificate_to_json(const Certificate& c, const History& h);
nlohmann::json verdict_to_json(const Verdict& v, const History& h);

}  // namespace cclab
