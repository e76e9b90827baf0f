#include "support.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <set>

namespace cclab::testing {

namespace {

bool per_process(ModelId m) {
  switch (m) {
    case ModelId::Eventual:
    case ModelId::Causal:
    case ModelId::IntraCausal:
    case ModelId::InterCausal:
    case ModelId::PRAM:
    case ModelId::IntraPRAM:
      return true;
    default:
      return false;
  }
}

std::map<ProcessId, std::vector<OpIndex>> locals_by_time(const History& h) {
  std::map<ProcessId, std::vector<OpIndex>> out;
  for (OpIndex i = 0; i < h.size(); ++i) out[h.op(i).process].push_back(i);
  for (auto& [p, v] : out) {
    std::sort(v.begin(), v.end(), [&](OpIndex a, OpIndex b) { return h.op(a).inv < h.op(b).inv; });
  }
  return out;
}

std::vector<std::pair<OpIndex, OpIndex>> reads_from(const History& h) {
  std::vector<std::pair<OpIndex, OpIndex>> out;
  for (OpIndex r = 0; r < h.size(); ++r) {
    const auto& o = h.op(r);
    for (OpIndex w = 0; w < h.size(); ++w) {
      const auto& wo = h.op(w);
      if (!wo.is_write()) continue;
      if (o.kind == OpKind::ReadWallDiff &&
          std::find(o.returned.begin(), o.returned.end(), wo.id) != o.returned.end()) {
        out.emplace_back(w, r);
      }
      if (o.kind == OpKind::ReadObject && o.read_value && wo.object == o.object && wo.value == *o.read_value) {
        out.emplace_back(w, r);
      }
    }
  }
  return out;
}

unsigned hops(const InterDepGraph& g, const ProcessId& u, const ProcessId& v) {
  if (u == v) return 0;
  std::map<ProcessId, unsigned> dist{{u, 0}};
  std::deque<ProcessId> q{u};
  while (!q.empty()) {
    auto n = q.front();
    q.pop_front();
    for (const auto& s : g.successors(n)) {
      if (dist.count(s)) continue;
      dist[s] = dist[n] + 1;
      if (s == v) return dist[s];
      q.push_back(s);
    }
  }
  return ~0u;
}

}  // namespace

ModelId model_for(Protocol p) {
  switch (p) {
    case Protocol::EventualP: return ModelId::Eventual;
    case Protocol::CausalP: return ModelId::Causal;
    case Protocol::IntraCausalP: return ModelId::IntraCausal;
    case Protocol::InterCausalP: return ModelId::InterCausal;
  }
  return ModelId::Causal;
}

Matrix floyd_closure(std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& edges) {
  Matrix m(n, std::vector<bool>(n, false));
  for (const auto& [a, b] : edges) m[a][b] = true;
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      if (!m[i][k]) continue;
      for (std::size_t j = 0; j < n; ++j) {
        if (m[k][j]) m[i][j] = true;
      }
    }
  }
  return m;
}

std::vector<std::pair<OpIndex, OpIndex>> oracle_edges(const History& h, ModelId m, const IntraGraphs* graphs,
                                                      const InterDepGraph* inter, const InterOrderOptions& opts) {
  std::vector<std::pair<OpIndex, OpIndex>> po;
  for (const auto& [p, v] : locals_by_time(h)) {
    for (std::size_t k = 1; k < v.size(); ++k) po.emplace_back(v[k - 1], v[k]);
  }
  std::vector<std::pair<OpIndex, OpIndex>> dpo;
  if (graphs) {
    for (const auto& [p, g] : *graphs) dpo.insert(dpo.end(), g.edges.begin(), g.edges.end());
  }
  auto rt = [&](bool cross_only) {
    std::vector<std::pair<OpIndex, OpIndex>> out;
    for (OpIndex a = 0; a < h.size(); ++a) {
      for (OpIndex b = 0; b < h.size(); ++b) {
        if (a == b || (cross_only && h.op(a).process == h.op(b).process)) continue;
        if (h.op(a).resp < h.op(b).inv) out.emplace_back(a, b);
      }
    }
    return out;
  };
  auto cat = [](auto x, const auto& y) {
    x.insert(x.end(), y.begin(), y.end());
    return x;
  };

  switch (m) {
    case ModelId::Eventual: return {};
    case ModelId::Causal: return cat(po, reads_from(h));
    case ModelId::IntraCausal: return cat(dpo, reads_from(h));
    case ModelId::InterCausal: {
      auto out = po;
      for (const auto& [w, r] : reads_from(h)) {
        const auto& wo = h.op(w);
        unsigned d = opts.d;
        if (wo.tag && opts.d_by_kind.count(wo.tag->kind)) d = opts.d_by_kind.at(wo.tag->kind);
        bool keep = hops(*inter, wo.process, h.op(r).process) <= d;
        if (!keep && opts.multiplicity_m) {
          const auto& a = inter->successors(wo.process);
          const auto& b = inter->successors(h.op(r).process);
          unsigned shared = 0;
          for (const auto& x : a) shared += b.count(x) && x != wo.process && x != h.op(r).process;
          keep = a.count(h.op(r).process) || shared >= *opts.multiplicity_m;
        }
        if (keep) out.emplace_back(w, r);
      }
      return out;
    }
    case ModelId::PRAM:
    case ModelId::Sequential: return po;
    case ModelId::IntraPRAM:
    case ModelId::IntraSequential: return dpo;
    case ModelId::Linearizable: return cat(po, rt(false));
    case ModelId::IntraLinearizable: return cat(dpo, rt(true));
  }
  return {};
}

bool oracle_legal(const std::vector<OpIndex>& seq, const History& h, const std::optional<ProcessId>& subject) {
  std::map<ObjectId, std::string> value;
  std::map<FriendPair, bool> latest;
  std::map<std::pair<ProcessId, std::string>, std::set<OpId>> returned_before;
  std::vector<OpIndex> placed;
  for (OpIndex i : seq) {
    const Operation& o = h.op(i);
    if (subject && !o.is_write() && o.process != *subject) return false;
    if (o.is_write()) {
      value[o.object] = o.value;
      if (o.tag && (o.tag->kind == TagKind::AddFriend || o.tag->kind == TagKind::RemoveFriend)) {
        latest[make_friend_pair(o.process, o.tag->subject)] = o.tag->kind == TagKind::AddFriend;
      }
      placed.push_back(i);
      continue;
    }
    if (o.kind == OpKind::ReadObject) {
      auto it = value.find(o.object);
      std::optional<std::string> now;
      if (it != value.end()) now = it->second;
      if (now != o.read_value) return false;
      continue;
    }
    auto& before = returned_before[{o.process, o.object.ns}];
    std::set<OpId> expected;
    for (OpIndex w : placed) {
      const Operation& wo = h.op(w);
      if (wo.object.ns != o.object.ns || wo.process == o.process || before.count(wo.id)) continue;
      auto pair = make_friend_pair(o.process, wo.process);
      bool allowed = latest.count(pair) ? latest.at(pair) : h.initial_friends().count(pair) != 0;
      if (allowed) expected.insert(wo.id);
    }
    std::set<OpId> got(o.returned.begin(), o.returned.end());
    if (got.size() != o.returned.size() || got != expected) return false;
    before.insert(got.begin(), got.end());
  }
  return true;
}

std::optional<std::vector<OpIndex>> oracle_search(const History& h, std::vector<OpIndex> ground, const Matrix& closure,
                                                  const std::optional<ProcessId>& subject) {
  for (OpIndex a : ground) {
    if (closure[a][a]) return std::nullopt;
  }
  std::sort(ground.begin(), ground.end(), [&](OpIndex a, OpIndex b) { return h.op(a).id < h.op(b).id; });
  std::vector<OpIndex> seq;
  std::vector<bool> used(ground.size(), false);
  std::optional<std::vector<OpIndex>> found;
  std::function<void()> rec = [&] {
    if (found) return;
    if (seq.size() == ground.size()) {
      if (oracle_legal(seq, h, subject)) found = seq;
      return;
    }
    for (std::size_t k = 0; k < ground.size() && !found; ++k) {
      if (used[k]) continue;
      bool ready = true;
      for (std::size_t j = 0; j < ground.size(); ++j) {
        if (!used[j] && j != k && closure[ground[j]][ground[k]]) ready = false;
      }
      if (!ready) continue;
      used[k] = true;
      seq.push_back(ground[k]);
      rec();
      seq.pop_back();
      used[k] = false;
    }
  };
  rec();
  return found;
}

bool oracle_consistent(const History& h, ModelId m, const IntraGraphs* graphs, const InterDepGraph* inter,
                       const InterOrderOptions& opts) {
  auto edges = oracle_edges(h, m, graphs, inter, opts);
  if (!per_process(m)) {
    std::vector<OpIndex> all(h.size());
    for (OpIndex i = 0; i < h.size(); ++i) all[i] = i;
    return oracle_search(h, all, floyd_closure(h.size(), edges), std::nullopt).has_value();
  }
  auto locals = locals_by_time(h);
  for (const auto& p : h.processes()) {
    auto with_self = edges;
    const auto& mine = locals[p];
    for (std::size_t k = 1; k < mine.size(); ++k) with_self.emplace_back(mine[k - 1], mine[k]);
    std::vector<OpIndex> ground;
    for (OpIndex i = 0; i < h.size(); ++i) {
      if (h.op(i).is_write() || h.op(i).process == p) ground.push_back(i);
    }
    if (!oracle_search(h, ground, floyd_closure(h.size(), with_self), p)) return false;
  }
  return true;
}

History random_history(std::mt19937_64& rng, const GenOptions& opts) {
  auto pick = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };
  auto chance = [&](double p) { return std::uniform_real_distribution<double>(0, 1)(rng) < p; };

  std::size_t nproc = 2 + pick(2);
  std::vector<ProcessId> procs;
  for (std::size_t i = 0; i < nproc; ++i) procs.push_back("p" + std::to_string(i));
  std::vector<FriendPair> friends;
  for (std::size_t i = 0; i < nproc; ++i) {
    for (std::size_t j = i + 1; j < nproc; ++j) {
      if (!opts.partial_friends || chance(0.6)) friends.emplace_back(procs[i], procs[j]);
    }
  }

  std::size_t n = opts.min_ops + pick(opts.max_ops - opts.min_ops + 1);
  std::vector<Operation> ops;
  std::vector<std::string> topics;
  std::map<ProcessId, std::int64_t> cursor;
  std::int64_t global = 0;
  for (std::size_t i = 0; i < n; ++i) {
    Operation o;
    o.process = procs[pick(nproc)];
    std::string suffix = std::to_string(i);
    double roll = std::uniform_real_distribution<double>(0, 1)(rng);
    if (opts.registers && roll < 0.25) {
      bool write = chance(0.5);
      o.kind = write ? OpKind::WriteValue : OpKind::ReadObject;
      o.object = {"reg", "x"};
      o.id = (write ? "w" : "r") + suffix;
      if (write) {
        o.value = "v" + suffix;
        o.tag = AppTag{TagKind::Post, "reg" + suffix, {}};
      } else {
        o.tag = AppTag{TagKind::WallRead, {}, {}};
      }
    } else if (opts.friend_ops && roll < 0.4) {
      ProcessId other;
      do { other = procs[pick(nproc)]; } while (other == o.process);
      auto pair = make_friend_pair(o.process, other);
      o.id = "f" + suffix;
      o.kind = OpKind::WriteValue;
      o.object = {kFriendsNamespace, pair.first + "|" + pair.second};
      o.value = o.id;
      o.tag = AppTag{chance(0.5) ? TagKind::AddFriend : TagKind::RemoveFriend, {}, other};
    } else if (chance(0.5)) {
      o.id = "w" + suffix;
      o.kind = OpKind::WriteValue;
      o.object = {wall_namespace(procs[pick(2)]), "k" + suffix};
      o.value = "v" + suffix;
      if (!topics.empty() && chance(0.4)) {
        o.tag = AppTag{TagKind::Comment, topics[pick(topics.size())], {}};
      } else {
        topics.push_back("t" + suffix);
        o.tag = AppTag{TagKind::Post, topics.back(), {}};
      }
    } else {
      o.id = "r" + suffix;
      o.kind = OpKind::ReadWallDiff;
      o.object = {wall_namespace(procs[pick(2)]), {}};
      o.tag = AppTag{TagKind::WallRead, {}, {}};
    }
    std::int64_t& c = opts.overlapping ? cursor[o.process] : global;
    std::int64_t inv = c + 1 + static_cast<std::int64_t>(pick(3));
    std::int64_t resp = inv + 1 + static_cast<std::int64_t>(pick(opts.overlapping ? 4 : 1));
    c = resp;
    o.inv = Time(inv);
    o.resp = Time(resp);
    ops.push_back(std::move(o));
  }

  std::map<std::pair<ProcessId, std::string>, std::set<std::size_t>> taken;
  for (auto& o : ops) {
    if (o.kind == OpKind::ReadWallDiff) {
      auto& used = taken[{o.process, o.object.ns}];
      for (std::size_t j = 0; j < ops.size(); ++j) {
        const auto& w = ops[j];
        if (!w.is_write() || w.object.ns != o.object.ns || w.process == o.process || used.count(j)) continue;
        if (chance(0.35)) {
          o.returned.push_back(w.id);
          used.insert(j);
        }
      }
    } else if (o.kind == OpKind::ReadObject) {
      std::vector<std::string> values;
      for (const auto& w : ops) {
        if (w.is_write() && w.object == o.object) values.push_back(w.value);
      }
      if (!values.empty() && chance(0.7)) o.read_value = values[pick(values.size())];
    }
  }
  std::vector<ProcessId> present;
  for (const auto& p : procs) present.push_back(p);
  return History(present, ops, friends);
}

void for_each_small_history(std::size_t max_ops, const std::function<void(const History&)>& fn) {
  for (std::size_t nproc = 2; nproc <= 3; ++nproc) {
    std::vector<ProcessId> procs;
    for (std::size_t i = 0; i < nproc; ++i) procs.push_back("p" + std::to_string(i));
    std::vector<FriendPair> friends;
    for (std::size_t i = 0; i < nproc; ++i) {
      for (std::size_t j = i + 1; j < nproc; ++j) friends.emplace_back(procs[i], procs[j]);
    }
    for (std::size_t total = nproc; total <= max_ops; ++total) {
      // counts[p] ops per process, each >= 1
      std::vector<std::size_t> counts(nproc, 1);
      std::function<void(std::size_t, std::size_t)> split = [&](std::size_t p, std::size_t left) {
        if (p + 1 == nproc) {
          counts[p] = 1 + left;
          // shapes: bitmask per process, bit set = write
          std::vector<std::size_t> shape(nproc, 0);
          std::function<void(std::size_t)> shapes = [&](std::size_t q) {
            if (q == nproc) {
              std::vector<Operation> ops;
              std::vector<std::size_t> write_ops;
              std::map<ProcessId, std::vector<std::size_t>> reads_of;
              for (std::size_t a = 0; a < nproc; ++a) {
                for (std::size_t k = 0; k < counts[a]; ++k) {
                  Operation o;
                  o.process = procs[a];
                  o.inv = Time(static_cast<std::int64_t>(10 * k + a));
                  o.resp = o.inv + Time(1);
                  std::string tag = std::to_string(a) + "_" + std::to_string(k);
                  if (shape[a] >> k & 1) {
                    o.id = "w" + tag;
                    o.kind = OpKind::WriteValue;
                    o.object = {"wall:p0", "k" + tag};
                    o.value = "v" + tag;
                    o.tag = AppTag{TagKind::Post, "t" + tag, {}};
                    write_ops.push_back(ops.size());
                  } else {
                    o.id = "r" + tag;
                    o.kind = OpKind::ReadWallDiff;
                    o.object = {"wall:p0", {}};
                    o.tag = AppTag{TagKind::WallRead, {}, {}};
                    reads_of[o.process].push_back(ops.size());
                  }
                  ops.push_back(o);
                }
              }
              // choice[i] for each (reader, foreign write) slot: 0 = none, k = k-th read
              std::vector<std::pair<std::size_t, std::size_t>> slots;  // (write op, reader idx)
              for (std::size_t a = 0; a < nproc; ++a) {
                if (reads_of[procs[a]].empty()) continue;
                for (std::size_t w : write_ops) {
                  if (ops[w].process != procs[a]) slots.emplace_back(w, a);
                }
              }
              std::vector<std::size_t> choice(slots.size(), 0);
              while (true) {
                auto copy = ops;
                for (std::size_t s = 0; s < slots.size(); ++s) {
                  if (choice[s] == 0) continue;
                  auto r = reads_of[procs[slots[s].second]][choice[s] - 1];
                  copy[r].returned.push_back(ops[slots[s].first].id);
                }
                fn(History(procs, copy, friends));
                std::size_t s = 0;
                for (; s < slots.size(); ++s) {
                  std::size_t limit = reads_of[procs[slots[s].second]].size();
                  if (++choice[s] <= limit) break;
                  choice[s] = 0;
                }
                if (s == slots.size()) break;
              }
              return;
            }
            for (std::size_t mask = 0; mask < (std::size_t{1} << counts[q]); ++mask) {
              shape[q] = mask;
              shapes(q + 1);
            }
          };
          shapes(0);
          return;
        }
        for (std::size_t extra = 0; extra <= left; ++extra) {
          counts[p] = 1 + extra;
          split(p + 1, left - extra);
        }
      };
      split(0, total - nproc);
    }
  }
}

IntraGraphs random_sub_po_graphs(std::mt19937_64& rng, const History& h) {
  IntraGraphs out;
  std::bernoulli_distribution coin(0.4);
  for (const auto& p : h.processes()) {
    IntraDepGraph g{p, h.local(p), {}};
    const auto& v = h.local(p);
    for (std::size_t i = 0; i < v.size(); ++i) {
      for (std::size_t j = i + 1; j < v.size(); ++j) {
        if (coin(rng)) g.edges.insert({v[i], v[j]});
      }
    }
    out.emplace(p, std::move(g));
  }
  return out;
}

InterDepGraph random_inter_graph(std::mt19937_64& rng, const std::vector<ProcessId>& nodes, bool directed) {
  InterDepGraph g(directed);
  std::bernoulli_distribution coin(0.5);
  for (const auto& n : nodes) g.add_node(n);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    for (std::size_t j = 0; j < nodes.size(); ++j) {
      if (i == j || (!directed && j < i)) continue;
      if (coin(rng)) g.add_edge(nodes[i], nodes[j]);
    }
  }
  return g;
}

Scenario random_scenario(std::uint64_t seed, Protocol p, const ScenarioGen& gen) {
  std::mt19937_64 rng(seed);
  auto pick = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };
  Scenario sc;
  sc.protocol = p;
  sc.seed = seed;
  std::size_t nrep = 2 + pick(2);
  for (std::size_t r = 0; r < nrep; ++r) sc.replicas.push_back("R" + std::to_string(r));
  sc.processes = {"A", "B", "C"};
  for (const auto& c : sc.processes) sc.home[c] = sc.replicas[pick(nrep)];
  sc.initial_friends = {{"A", "B"}, {"A", "C"}, {"B", "C"}};
  sc.delays.base = Time(1 + static_cast<std::int64_t>(pick(3)));
  for (const auto& a : sc.replicas) {
    for (const auto& b : sc.replicas) {
      if (a != b && pick(2)) sc.delays.links[{a, b}] = Time(1 + static_cast<std::int64_t>(pick(5)), 2);
    }
  }
  sc.delays.jitter = Time(static_cast<std::int64_t>(pick(3)));

  std::size_t n = 4 + pick(gen.max_ops - 3);
  Time t(0);
  std::vector<std::pair<std::string, ProcessId>> topics;  // topic, wall
  std::set<FriendPair> removed;
  for (std::size_t k = 0; k < n; ++k) {
    t += Time(1 + static_cast<std::int64_t>(pick(3)), 2);
    WallAction a;
    a.actor = sc.processes[pick(3)];
    a.issue_time = t;
    std::size_t roll = pick(10);
    std::string s = std::to_string(k);
    if (roll < 3 || (roll < 5 && topics.empty())) {
      a.kind = ActionKind::Post;
      a.text = "p" + s;
      a.topic = a.text;
      a.owner = sc.processes[pick(3)];
      topics.emplace_back(a.topic, a.owner);
    } else if (roll < 5) {
      a.kind = ActionKind::Comment;
      a.text = "c" + s;
      auto [topic, wall] = topics[pick(topics.size())];
      a.topic = topic;
      a.owner = wall;
    } else if (roll < 9 || !gen.remove_friends) {
      a.kind = ActionKind::ReadWall;
      a.owner = sc.processes[pick(3)];
    } else {
      ProcessId other;
      do { other = sc.processes[pick(3)]; } while (other == a.actor);
      if (!removed.insert(make_friend_pair(a.actor, other)).second) {
        a.kind = ActionKind::ReadWall;
        a.owner = other;
      } else {
        a.kind = ActionKind::RemoveFriend;
        a.subject = other;
      }
    }
    sc.script.push_back(a);
  }
  for (const auto& a : sc.script) {
    if ((a.kind == ActionKind::Post || a.kind == ActionKind::Comment) && pick(4) == 0) {
      sc.delays.overrides[{"w:" + a.text, sc.replicas[pick(nrep)]}] = Time(2 + static_cast<std::int64_t>(pick(9)));
    }
  }
  sc.inter_graph = random_inter_graph(rng, sc.processes, true);
  sc.inter_opts.d = 1 + static_cast<unsigned>(pick(2));
  return sc;
}

}  // namespace cclab::testing
