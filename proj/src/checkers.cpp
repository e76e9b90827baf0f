#include "cclab/checkers.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <deque>
#include <unordered_set>

namespace cclab {

namespace {

struct ModelName {
  ModelId id;
  const char* canonical;
  const char* cli;
};

constexpr ModelName kModelNames[] = {
    {ModelId::Eventual, "Eventual", "eventual"},
    {ModelId::Causal, "Causal", "causal"},
    {ModelId::IntraCausal, "IntraCausal", "intra-causal"},
    {ModelId::InterCausal, "InterCausal", "inter-causal"},
    {ModelId::PRAM, "PRAM", "pram"},
    {ModelId::IntraPRAM, "IntraPRAM", "intra-pram"},
    {ModelId::Sequential, "Sequential", "sequential"},
    {ModelId::IntraSequential, "IntraSequential", "intra-sequential"},
    {ModelId::Linearizable, "Linearizable", "linearizable"},
    {ModelId::IntraLinearizable, "IntraLinearizable", "intra-linearizable"},
};

std::string normalise(std::string s) {
  std::string out;
  for (char c : s) {
    if (c == '-' || c == '_') continue;
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

const IntraGraphs& need_graphs(const CheckContext& ctx, ModelId m) {
  if (!ctx.graphs) throw std::invalid_argument(std::string(to_string(m)) + " needs intra dependency graphs");
  return *ctx.graphs;
}

// BFS over generating edges. Both endpoints are included; from == to
// yields a cycle written a, ..., a.
std::vector<OpIndex> shortest_path(const PartialOrder& po, OpIndex from, OpIndex to) {
  std::map<OpIndex, std::vector<OpIndex>> succ;
  for (const auto& [a, b] : po.edges()) succ[a].push_back(b);
  std::map<OpIndex, OpIndex> parent;
  std::deque<OpIndex> frontier{from};
  bool found = false;
  while (!frontier.empty() && !found) {
    OpIndex n = frontier.front();
    frontier.pop_front();
    for (OpIndex s : succ[n]) {
      if (parent.count(s)) continue;
      parent[s] = n;
      if (s == to) {
        found = true;
        break;
      }
      frontier.push_back(s);
    }
  }
  if (!found) return {};
  std::vector<OpIndex> path{to};
  OpIndex cur = to;
  do {
    cur = parent.at(cur);
    path.push_back(cur);
  } while (cur != from);
  std::reverse(path.begin(), path.end());
  return path;
}

// Friend ops between a pair make access control depend on placement.
bool permission_fixed_true(const History& h, const ProcessId& reader, const ProcessId& author) {
  auto pair = make_friend_pair(reader, author);
  for (OpIndex w : h.writes()) {
    const auto& o = h.op(w);
    if (o.is_friend_op() && make_friend_pair(o.process, o.tag->subject) == pair) return false;
  }
  return h.initial_friends().count(pair) != 0;
}

// Incremental legality state for the extension search. Everything that can
// influence a later read is either a function of the placed set or part of
// the memo key (last write per object, friend state per pair).
class SearchState {
 public:
  SearchState(std::vector<OpIndex> ground, const PartialOrder& order, const History& h)
      : ground_(std::move(ground)), h_(h) {
    const std::size_t n = ground_.size();
    std::map<OpIndex, std::size_t> slot;
    for (std::size_t k = 0; k < n; ++k) slot[ground_[k]] = k;

    preds_.assign(n, 0);
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = 0; b < n; ++b) {
        if (order.reaches(ground_[a], ground_[b])) preds_[b] |= bit(a);
      }
      if (order.reaches(ground_[a], ground_[a])) self_cycle_ = true;
    }

    std::map<ObjectId, std::size_t> objects;
    std::map<FriendPair, std::size_t> pairs;
    std::map<std::pair<ProcessId, std::string>, std::size_t> diff_keys;
    info_.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
      const Operation& o = h.op(ground_[k]);
      Info& inf = info_[k];
      if (o.kind == OpKind::ReadObject) {
        inf.object = objects.emplace(o.object, objects.size()).first->second;
      } else if (o.kind == OpKind::ReadWallDiff) {
        inf.diff_key = diff_keys.emplace(std::make_pair(o.process, o.object.ns), diff_keys.size()).first->second;
        for (OpIndex w : h.sources(ground_[k])) {
          auto it = slot.find(w);
          if (it == slot.end()) {
            inf.unsatisfiable = true;
          } else {
            inf.returned |= bit(it->second);
          }
        }
        if (h.sources(ground_[k]).size() != o.returned.size()) inf.unsatisfiable = true;
      } else if (o.is_friend_op()) {
        inf.pair = pairs.emplace(make_friend_pair(o.process, o.tag->subject), pairs.size()).first->second;
        inf.adds = o.tag->kind == TagKind::AddFriend;
      }
    }
    for (std::size_t k = 0; k < n; ++k) {
      const Operation& o = h.op(ground_[k]);
      if (!o.is_write()) continue;
      auto it = objects.find(o.object);
      if (it != objects.end()) info_[k].writes_object = it->second;
    }
    pair_list_.resize(pairs.size());
    for (const auto& [p, idx] : pairs) pair_list_[idx] = p;
    last_write_.assign(objects.size(), -1);
    friend_state_.assign(pairs.size(), -1);
    returned_so_far_.assign(diff_keys.size(), 0);
  }

  bool hopeless() const { return self_cycle_; }

  std::optional<std::vector<OpIndex>> run() {
    if (self_cycle_) return std::nullopt;
    if (dfs()) {
      std::vector<OpIndex> out;
      for (std::size_t k : sequence_) out.push_back(ground_[k]);
      return out;
    }
    return std::nullopt;
  }

 private:
  struct Info {
    std::optional<std::size_t> object;         // ReadObject: tracked object
    std::optional<std::size_t> writes_object;  // write to a tracked object
    std::optional<std::size_t> diff_key;       // ReadWallDiff: (reader, namespace)
    std::optional<std::size_t> pair;           // friend op
    bool adds = false;
    bool unsatisfiable = false;
    std::uint64_t returned = 0;
  };

  static std::uint64_t bit(std::size_t k) { return std::uint64_t{1} << k; }

  bool permitted(const ProcessId& reader, const ProcessId& author) const {
    if (reader == author) return true;
    auto pair = make_friend_pair(reader, author);
    for (std::size_t i = 0; i < pair_list_.size(); ++i) {
      if (pair_list_[i] == pair && friend_state_[i] >= 0) return friend_state_[i] == 1;
    }
    return h_.initial_friends().count(pair) != 0;
  }

  bool legal_now(std::size_t k) const {
    const Info& inf = info_[k];
    const Operation& o = h_.op(ground_[k]);
    if (o.kind == OpKind::ReadObject) {
      int w = last_write_[*inf.object];
      std::optional<std::string> expected;
      if (w >= 0) expected = h_.op(ground_[static_cast<std::size_t>(w)]).value;
      return expected == o.read_value;
    }
    if (o.kind == OpKind::ReadWallDiff) {
      if (inf.unsatisfiable) return false;
      std::uint64_t expected = 0;
      std::uint64_t seen = returned_so_far_[*inf.diff_key];
      for (std::uint64_t rest = placed_; rest; rest &= rest - 1) {
        std::size_t j = static_cast<std::size_t>(std::countr_zero(rest));
        const Operation& w = h_.op(ground_[j]);
        if (!w.is_write() || w.object.ns != o.object.ns || w.process == o.process) continue;
        if (seen & bit(j)) continue;
        if (!permitted(o.process, w.process)) continue;
        expected |= bit(j);
      }
      return expected == inf.returned;
    }
    return true;
  }

  std::string memo_key() const {
    std::string key(reinterpret_cast<const char*>(&placed_), sizeof placed_);
    for (int w : last_write_) key.push_back(static_cast<char>(w + 1));
    for (int f : friend_state_) key.push_back(static_cast<char>(f + 1));
    return key;
  }

  bool dfs() {
    const std::size_t n = ground_.size();
    if (sequence_.size() == n) return true;
    std::string key = memo_key();
    if (dead_.count(key)) return false;
    for (std::size_t k = 0; k < n; ++k) {
      if (placed_ & bit(k)) continue;
      if ((preds_[k] & ~placed_) != 0) continue;
      if (!legal_now(k)) continue;

      const Info& inf = info_[k];
      int saved_write = 0;
      int saved_friend = 0;
      std::uint64_t saved_returned = 0;
      if (inf.writes_object) {
        saved_write = last_write_[*inf.writes_object];
        last_write_[*inf.writes_object] = static_cast<int>(k);
      }
      if (inf.pair) {
        saved_friend = friend_state_[*inf.pair];
        friend_state_[*inf.pair] = inf.adds ? 1 : 0;
      }
      if (inf.diff_key) {
        saved_returned = returned_so_far_[*inf.diff_key];
        returned_so_far_[*inf.diff_key] |= inf.returned;
      }
      placed_ |= bit(k);
      sequence_.push_back(k);

      if (dfs()) return true;

      sequence_.pop_back();
      placed_ &= ~bit(k);
      if (inf.writes_object) last_write_[*inf.writes_object] = saved_write;
      if (inf.pair) friend_state_[*inf.pair] = saved_friend;
      if (inf.diff_key) returned_so_far_[*inf.diff_key] = saved_returned;
    }
    dead_.insert(std::move(key));
    return false;
  }

  std::vector<OpIndex> ground_;
  const History& h_;
  std::vector<std::uint64_t> preds_;
  bool self_cycle_ = false;
  std::vector<Info> info_;
  std::vector<FriendPair> pair_list_;

  std::uint64_t placed_ = 0;
  std::vector<std::size_t> sequence_;
  std::vector<int> last_write_;
  std::vector<int> friend_state_;
  std::vector<std::uint64_t> returned_so_far_;
  std::unordered_set<std::string> dead_;
};

}  // namespace

const char* to_string(ModelId m) {
  for (const auto& n : kModelNames) {
    if (n.id == m) return n.canonical;
  }
  return "?";
}

ModelId parse_model(const std::string& text) {
  std::string key = normalise(text);
  for (const auto& n : kModelNames) {
    if (normalise(n.canonical) == key) return n.id;
  }
  throw std::invalid_argument("unknown consistency model: " + text);
}

const std::vector<ModelId>& all_models() {
  static const std::vector<ModelId> models = [] {
    std::vector<ModelId> out;
    for (const auto& n : kModelNames) out.push_back(n.id);
    return out;
  }();
  return models;
}

const char* to_string(Certificate::Kind k) {
  switch (k) {
    case Certificate::Kind::Cycle: return "cycle";
    case Certificate::Kind::MissingVisibility: return "missing_visibility";
    case Certificate::Kind::Unserializable: return "unserializable";
  }
  return "?";
}

SearchLimitExceeded::SearchLimitExceeded(std::size_t ground, std::size_t limit,
                                         std::optional<ProcessId> process)
    : std::runtime_error("serialization search over " + std::to_string(ground) +
                         " operations exceeds the limit of " + std::to_string(limit) +
                         (process ? " (process " + *process + ")" : std::string())),
      process_(std::move(process)) {}

RequiredOrder required_order(const History& h, ModelId model, const CheckContext& ctx) {
  switch (model) {
    case ModelId::Eventual:
      return {PartialOrder(h.size()), Scope::PerProcess};
    case ModelId::Causal:
      return {causal_order(h), Scope::PerProcess};
    case ModelId::IntraCausal:
      return {intra_causal_order(h, need_graphs(ctx, model)), Scope::PerProcess};
    case ModelId::InterCausal:
      if (!ctx.inter) throw std::invalid_argument("InterCausal needs an inter-process dependency graph");
      return {inter_causal_order(h, *ctx.inter, ctx.inter_opts), Scope::PerProcess};
    case ModelId::PRAM:
      return {program_order(h), Scope::PerProcess};
    case ModelId::IntraPRAM:
      return {intra_program_order(h, need_graphs(ctx, model)), Scope::PerProcess};
    case ModelId::Sequential:
      return {program_order(h), Scope::Global};
    case ModelId::IntraSequential:
      return {intra_program_order(h, need_graphs(ctx, model)), Scope::Global};
    case ModelId::Linearizable: {
      PartialOrder po = program_order(h);
      po.merge(real_time_order(h));
      return {po, Scope::Global};
    }
    case ModelId::IntraLinearizable: {
      PartialOrder po = intra_program_order(h, need_graphs(ctx, model));
      po.merge(intra_real_time_order(h));
      return {po, Scope::Global};
    }
  }
  throw std::invalid_argument("unknown model");
}

PartialOrder subject_order(const History& h, const RequiredOrder& required,
                           const std::optional<ProcessId>& subject) {
  PartialOrder po = required.order;
  if (required.scope == Scope::PerProcess && subject) po.merge(self_order(h, *subject));
  return po;
}

std::optional<Serialization> brute_force_search(std::span<const OpIndex> ground, const PartialOrder& order,
                                                const History& h, const std::optional<ProcessId>& subject,
                                                std::size_t max_ground) {
  std::size_t limit = std::min<std::size_t>(max_ground, 64);
  if (ground.size() > limit) throw SearchLimitExceeded(ground.size(), limit, subject);
  std::vector<OpIndex> sorted(ground.begin(), ground.end());
  std::sort(sorted.begin(), sorted.end(),
            [&](OpIndex a, OpIndex b) { return h.op(a).id < h.op(b).id; });
  SearchState state(std::move(sorted), order, h);
  auto found = state.run();
  if (!found) return std::nullopt;
  return Serialization{std::move(*found), subject};
}

std::optional<Certificate> fast_necessary_check(std::span<const OpIndex> ground, const PartialOrder& order,
                                                const History& h, const std::optional<ProcessId>& subject) {

  for (OpIndex a : ground) {
    if (!order.reaches(a, a)) continue;
    Certificate c{Certificate::Kind::Cycle, subject, shortest_path(order, a, a), ""};
    if (c.ops.size() > 1) c.ops.pop_back();
    c.detail = "ordering constraints form a cycle";
    return c;
  }

  // A write that must precede a read of the same wall has to show up in that
  // read's diff or in a diff the reader may have taken earlier.
  for (OpIndex r : ground) {
    const Operation& read = h.op(r);
    if (read.kind != OpKind::ReadWallDiff) continue;
    const auto& got = h.sources(r);
    for (OpIndex w : ground) {
      const Operation& wo = h.op(w);
      if (!wo.is_write() || wo.object.ns != read.object.ns || wo.process == read.process) continue;
      if (std::binary_search(got.begin(), got.end(), w)) continue;
      if (!order.reaches(w, r)) continue;
      if (!permission_fixed_true(h, read.process, wo.process)) continue;
      bool explained = false;
      for (OpIndex other : ground) {
        const Operation& oo = h.op(other);
        if (other == r || oo.kind != OpKind::ReadWallDiff || oo.process != read.process ||
            oo.object.ns != read.object.ns) {
          continue;
        }
        const auto& theirs = h.sources(other);
        if (std::binary_search(theirs.begin(), theirs.end(), w) && !order.reaches(r, other)) {
          explained = true;
          break;
        }
      }
      if (!explained) {
        return Certificate{Certificate::Kind::MissingVisibility, subject, {w, r},
                           wo.id + " must precede " + read.id + " but is never returned by it or an earlier read"};
      }
    }
  }

  for (OpIndex r : ground) {
    const Operation& read = h.op(r);
    if (read.kind != OpKind::ReadObject) continue;
    std::optional<OpIndex> source;
    if (!h.sources(r).empty()) source = h.sources(r).front();
    for (OpIndex w : ground) {
      const Operation& wo = h.op(w);
      if (!wo.is_write() || wo.object != read.object || (source && *source == w)) continue;
      if (!order.reaches(w, r)) continue;
      if (!source || order.reaches(*source, w)) {
        return Certificate{Certificate::Kind::MissingVisibility, subject, {w, r},
                           wo.id + " overwrites the value " + read.id + " must return"};
      }
    }
  }
  return std::nullopt;
}

bool respects(const Serialization& s, const PartialOrder& order) {
  for (std::size_t i = 0; i < s.ops.size(); ++i) {
    for (std::size_t j = i; j < s.ops.size(); ++j) {
      if (order.reaches(s.ops[j], s.ops[i])) return false;
    }
  }
  return true;
}

Verdict check(const History& h, ModelId model, const CheckContext& ctx) {
  Verdict v;
  v.model = model;
  RequiredOrder required = required_order(h, model, ctx);
  v.scope = required.scope;

  auto decide = [&](const std::vector<OpIndex>& ground, const std::optional<ProcessId>& subject)
      -> std::pair<std::optional<Serialization>, std::optional<Certificate>> {
    PartialOrder order = subject_order(h, required, subject);
    if (auto cert = fast_necessary_check(ground, order, h, subject)) return {std::nullopt, cert};
    auto found = brute_force_search(ground, order, h, subject, ctx.max_search);
    if (!found) {
      return {std::nullopt, Certificate{Certificate::Kind::Unserializable, subject, {},
                                        "no legal serialization respects the required order"}};
    }
    if (!is_legal_serialization(*found, h, subject) || !respects(*found, order)) {
      throw std::logic_error("search produced an invalid witness");
    }
    return {found, std::nullopt};
  };

  if (required.scope == Scope::Global) {
    std::vector<OpIndex> ground(h.size());
    for (OpIndex i = 0; i < h.size(); ++i) ground[i] = i;
    auto [witness, cert] = decide(ground, std::nullopt);
    v.consistent = witness.has_value();
    v.witness = witness;
    v.violation = cert;
    return v;
  }

  v.consistent = true;
  for (const auto& p : h.processes()) {
    auto ground = project_pi_plus_w(h, p);
    auto [witness, cert] = decide(ground, p);
    if (witness) {
      v.witnesses.emplace(p, std::move(*witness));
    } else {
      if (v.consistent) v.violation = cert;
      v.consistent = false;
    }
  }
  return v;
}

nlohmann::json certificate_to_json(const Certificate& c, const History& h) {
  nlohmann::json ops = nlohmann::json::array();
  for (OpIndex i : c.ops) ops.push_back(h.op(i).id);
  nlohmann::json out{{"kind", to_string(c.kind)}, {"ops", ops}, {"detail", c.detail}};
  if (c.process) out["process"] = *c.process;
  return out;
}

nlohmann::json verdict_to_json(const Verdict& v, const History& h) {
  nlohmann::json out;
  out["model"] = to_string(v.model);
  out["consistent"] = v.consistent;
  if (v.violation) out["violation"] = certificate_to_json(*v.violation, h);
  if (v.scope == Scope::Global) {
    out["witnesses"] = v.witness ? nlohmann::json::array() : nlohmann::json(nullptr);
    if (v.witness) {
      for (OpIndex i : v.witness->ops) out["witnesses"].push_back(h.op(i).id);
    }
  } else {
    out["witnesses"] = nlohmann::json::object();
    for (const auto& [p, s] : v.witnesses) {
      nlohmann::json seq = nlohmann::json::array();
      for (OpIndex i : s.ops) seq.push_back(h.op(i).id);
      out["witnesses"][p] = seq;
    }
  }
  return out;
}

}  // namespace cclab
