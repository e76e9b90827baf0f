#include "cclab/history.hpp"

#include <algorithm>
#include <numeric>
#include <tuple>

#include "cclab/partial_order.hpp"

namespace cclab {

std::string wall_namespace(const ProcessId& owner) { return "wall:" + owner; }

const char* to_string(TagKind kind) {
  switch (kind) {
    case TagKind::Post: return "post";
    case TagKind::Comment: return "comment";
    case TagKind::AddFriend: return "add_friend";
    case TagKind::RemoveFriend: return "remove_friend";
    case TagKind::WallRead: return "wall_read";
  }
  return "?";
}

TagKind parse_tag_kind(const std::string& text) {
  if (text == "post") return TagKind::Post;
  if (text == "comment") return TagKind::Comment;
  if (text == "add_friend") return TagKind::AddFriend;
  if (text == "remove_friend") return TagKind::RemoveFriend;
  if (text == "wall_read") return TagKind::WallRead;
  throw HistoryError("unknown tag kind: " + text);
}

FriendPair make_friend_pair(const ProcessId& a, const ProcessId& b) {
  return a < b ? FriendPair{a, b} : FriendPair{b, a};
}

History::History(std::vector<ProcessId> processes, std::vector<Operation> ops,
                 std::vector<FriendPair> initial_friends) {
  for (auto& p : processes) {
    if (std::find(processes_.begin(), processes_.end(), p) == processes_.end()) {
      processes_.push_back(std::move(p));
    }
  }
  for (const auto& [a, b] : initial_friends) initial_friends_.insert(make_friend_pair(a, b));

  // Canonical order: (inv, process, position within the input), which is
  // also the tiebreak used for global listings.
  std::vector<std::size_t> order(ops.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::tie(ops[a].inv, ops[a].process) < std::tie(ops[b].inv, ops[b].process);
  });
  ops_.reserve(ops.size());
  for (std::size_t i : order) ops_.push_back(std::move(ops[i]));

  for (const auto& p : processes_) locals_[p];
  for (OpIndex i = 0; i < ops_.size(); ++i) {
    const Operation& o = ops_[i];
    if (!by_id_.emplace(o.id, i).second) notes_.push_back("duplicate op id " + o.id);
    locals_[o.process].push_back(i);
    if (o.is_write()) writes_.push_back(i);
  }

  sources_.resize(ops_.size());
  for (OpIndex i = 0; i < ops_.size(); ++i) {
    const Operation& o = ops_[i];
    if (o.kind == OpKind::ReadWallDiff) {
      for (const auto& id : o.returned) {
        auto it = by_id_.find(id);
        if (it != by_id_.end() && ops_[it->second].is_write()) sources_[i].push_back(it->second);
      }
      std::sort(sources_[i].begin(), sources_[i].end());
      sources_[i].erase(std::unique(sources_[i].begin(), sources_[i].end()), sources_[i].end());
    } else if (o.kind == OpKind::ReadObject && o.read_value) {
      for (OpIndex w : writes_) {
        if (ops_[w].object == o.object && ops_[w].value == *o.read_value) {
          sources_[i].push_back(w);
          break;
        }
      }
    }
  }
}

bool History::has_process(const ProcessId& p) const {
  return std::find(processes_.begin(), processes_.end(), p) != processes_.end();
}

std::optional<OpIndex> History::find(const OpId& id) const {
  auto it = by_id_.find(id);
  if (it == by_id_.end()) return std::nullopt;
  return it->second;
}

OpIndex History::index_of(const OpId& id) const {
  auto it = by_id_.find(id);
  if (it == by_id_.end()) throw HistoryError("unknown operation id: " + id);
  return it->second;
}

const std::vector<OpIndex>& History::local(const ProcessId& p) const {
  auto it = locals_.find(p);
  if (it == locals_.end() || !has_process(p)) throw HistoryError("unknown process: " + p);
  return it->second;
}

LocalHistory History::local_history(const ProcessId& p) const { return {p, local(p)}; }

std::vector<Violation> validate_history(const History& h) {
  std::vector<Violation> out;
  auto report = [&](std::string code, std::string detail) {
    out.push_back({std::move(code), std::move(detail)});
  };
  const auto& ops = h.ops();

  std::set<OpId> ids;
  for (const auto& o : ops) {
    if (!ids.insert(o.id).second) report("duplicate_op_id", o.id);
    if (!h.has_process(o.process)) report("unknown_process", o.id + " by " + o.process);
    if (!(o.inv < o.resp)) report("bad_interval", o.id + " has inv >= resp");
  }
  for (const auto& [a, b] : h.initial_friends()) {
    if (!h.has_process(a) || !h.has_process(b)) report("unknown_friend", a + "-" + b);
  }

  for (const auto& p : h.processes()) {
    const auto& local = h.local(p);
    for (std::size_t k = 1; k < local.size(); ++k) {
      const auto& prev = ops[local[k - 1]];
      const auto& cur = ops[local[k]];
      if (!(prev.resp < cur.inv)) report("overlapping_ops", prev.id + " overlaps " + cur.id);
    }
  }

  std::set<std::pair<ObjectId, std::string>> written;
  std::set<std::string> post_topics;
  for (OpIndex w : h.writes()) {
    const auto& o = ops[w];
    if (!written.insert({o.object, o.value}).second) {
      report("duplicate_write_value",
             o.id + " writes " + o.value + " to " + o.object.ns + "/" + o.object.key);
    }
    if (o.tag && o.tag->kind == TagKind::Post) post_topics.insert(o.tag->topic);
  }

  for (OpIndex i = 0; i < ops.size(); ++i) {
    const auto& o = ops[i];
    if (o.tag) {
      const auto& tag = *o.tag;
      if (o.is_write() && tag.kind == TagKind::WallRead) report("bad_tag", o.id + " is a write tagged wall_read");
      if (o.is_read() && tag.kind != TagKind::WallRead) report("bad_tag", o.id + " is a read with a write tag");
      if (tag.kind == TagKind::Comment && post_topics.count(tag.topic) == 0) {
        report("orphan_comment", o.id + " comments on unknown topic " + tag.topic);
      }
      if (tag.friend_op() && tag.subject.empty()) report("bad_tag", o.id + " friend op without subject");
    }
    if (o.kind == OpKind::ReadObject && o.read_value) {
      if (h.sources(i).empty()) report("read_of_nonexistent_value", o.id + " returns " + *o.read_value);
    }
    if (o.kind == OpKind::ReadWallDiff) {
      std::set<OpId> seen;
      for (const auto& id : o.returned) {
        if (!seen.insert(id).second) {
          report("malformed_diff", o.id + " lists " + id + " twice");
          continue;
        }
        auto w = h.find(id);
        if (!w || !ops[*w].is_write()) {
          report("read_of_nonexistent_value", o.id + " returns unknown write " + id);
        } else if (ops[*w].object.ns != o.object.ns) {
          report("malformed_diff", o.id + " returns " + id + " from namespace " + ops[*w].object.ns);
        }
      }
    }
  }
  return out;
}

std::vector<OpIndex> project_pi_plus_w(const History& h, const ProcessId& p) {
  const auto& local = h.local(p);
  std::vector<OpIndex> out(local.begin(), local.end());
  for (OpIndex w : h.writes()) {
    if (h.op(w).process != p) out.push_back(w);
  }
  std::sort(out.begin(), out.end());
  return out;
}

PartialOrder derive_reads_from(const History& h) {
  PartialOrder po(h.size());
  for (OpIndex r = 0; r < h.size(); ++r) {
    if (!h.op(r).is_read()) continue;
    for (OpIndex w : h.sources(r)) po.add_edge(w, r);
  }
  return po;
}

void Friendship::apply(const Operation& friend_op) {
  if (!friend_op.tag || !friend_op.tag->friend_op()) return;
  latest_[make_friend_pair(friend_op.process, friend_op.tag->subject)] =
      friend_op.tag->kind == TagKind::AddFriend;
}

bool Friendship::permitted(const ProcessId& reader, const ProcessId& author) const {
  if (reader == author) return true;
  auto pair = make_friend_pair(reader, author);
  auto it = latest_.find(pair);
  if (it != latest_.end()) return it->second;
  return initial_.count(pair) != 0;
}

std::optional<std::string> explain_illegal(const Serialization& s, const History& h,
                                           const std::optional<ProcessId>& subject) {
  std::vector<OpIndex> ground;
  if (subject) {
    ground = project_pi_plus_w(h, *subject);
  } else {
    ground.resize(h.size());
    std::iota(ground.begin(), ground.end(), 0);
  }
  std::vector<OpIndex> sorted = s.ops;
  std::sort(sorted.begin(), sorted.end());
  if (sorted != ground) throw HistoryError("serialization does not cover its ground set exactly once");

  // Straight replay of the sequence; the search in checkers keeps its own
  // incremental state, so this stays an independent referee.
  std::vector<OpIndex> placed_writes;
  std::map<ObjectId, OpIndex> last_write;
  std::map<std::pair<ProcessId, std::string>, std::set<OpIndex>> already_returned;
  Friendship friends(h.initial_friends());

  for (OpIndex i : s.ops) {
    const Operation& o = h.op(i);
    if (o.is_write()) {
      placed_writes.push_back(i);
      last_write[o.object] = i;
      if (o.is_friend_op()) friends.apply(o);
      continue;
    }
    if (o.kind == OpKind::ReadObject) {
      auto it = last_write.find(o.object);
      std::optional<std::string> expected;
      if (it != last_write.end()) expected = h.op(it->second).value;
      if (expected != o.read_value) {
        return o.id + " should return " + (expected ? *expected : std::string("bottom"));
      }
      continue;
    }
    auto& seen = already_returned[{o.process, o.object.ns}];
    std::vector<OpIndex> expected;
    for (OpIndex w : placed_writes) {
      const Operation& wo = h.op(w);
      if (wo.object.ns != o.object.ns || wo.process == o.process) continue;
      if (!friends.permitted(o.process, wo.process)) continue;
      if (seen.count(w)) continue;
      expected.push_back(w);
    }
    std::sort(expected.begin(), expected.end());
    std::vector<OpIndex> actual = h.sources(i);
    if (actual.size() != o.returned.size() || actual != expected) {
      std::string msg = o.id + " should return {";
      for (std::size_t k = 0; k < expected.size(); ++k) {
        msg += (k ? "," : "") + h.op(expected[k]).id;
      }
      return msg + "}";
    }
    seen.insert(actual.begin(), actual.end());
  }
  return std::nullopt;
}

bool is_legal_serialization(const Serialization& s, const History& h,
                            const std::optional<ProcessId>& subject) {
  return !explain_illegal(s, h, subject).has_value();
}

}  // namespace cclab
