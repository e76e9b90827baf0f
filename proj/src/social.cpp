#include "cclab/social.hpp"

#include <map>
#include <set>

#include "cclab/history_json.hpp"

namespace cclab {

const char* to_string(ActionKind k) {
  switch (k) {
    case ActionKind::Post: return "post";
    case ActionKind::Comment: return "comment";
    case ActionKind::ReadWall: return "read_wall";
    case ActionKind::AddFriend: return "add_friend";
    case ActionKind::RemoveFriend: return "remove_friend";
  }
  return "?";
}

ActionKind parse_action_kind(const std::string& text) {
  for (auto k : {ActionKind::Post, ActionKind::Comment, ActionKind::ReadWall, ActionKind::AddFriend,
                 ActionKind::RemoveFriend}) {
    if (text == to_string(k)) return k;
  }
  throw ScriptError("unknown action: " + text);
}

OpId default_op_id(const WallAction& a, std::size_t actor_index) {
  switch (a.kind) {
    case ActionKind::Post:
    case ActionKind::Comment:
      return "w:" + a.text;
    case ActionKind::ReadWall:
      return "r:" + a.actor + ":" + std::to_string(actor_index);
    default:
      return std::string(to_string(a.kind)) + ":" + a.actor + ":" + a.subject + ":" + std::to_string(actor_index);
  }
}

Operation compile_action(const WallAction& a, const OpId& id, const Time& duration) {
  Operation o;
  o.id = id;
  o.process = a.actor;
  o.inv = a.issue_time;
  o.resp = a.issue_time + duration;
  const ProcessId& owner = a.owner.empty() ? a.actor : a.owner;
  switch (a.kind) {
    case ActionKind::Post:
    case ActionKind::Comment:
      if (a.text.empty() || a.topic.empty()) throw ScriptError(id + ": posts and comments need text and a topic");
      o.kind = OpKind::WriteValue;
      o.object = {wall_namespace(owner), a.text};
      o.value = a.text;
      o.tag = AppTag{a.kind == ActionKind::Post ? TagKind::Post : TagKind::Comment, a.topic, {}};
      break;
    case ActionKind::ReadWall:
      o.kind = OpKind::ReadWallDiff;
      o.object = {wall_namespace(owner), {}};
      o.tag = AppTag{TagKind::WallRead, {}, {}};
      break;
    case ActionKind::AddFriend:
    case ActionKind::RemoveFriend: {
      if (a.subject.empty() || a.subject == a.actor) throw ScriptError(id + ": friend change needs another user");
      auto pair = make_friend_pair(a.actor, a.subject);
      o.kind = OpKind::WriteValue;
      o.object = {kFriendsNamespace, pair.first + "|" + pair.second};
      o.value = id;
      o.tag = AppTag{a.kind == ActionKind::AddFriend ? TagKind::AddFriend : TagKind::RemoveFriend, {}, a.subject};
      break;
    }
  }
  return o;
}

CompiledScript compile_script(const std::vector<WallAction>& actions, const CompileOptions& opts) {
  std::set<std::string> topics;
  for (const auto& a : actions) {
    if (a.kind == ActionKind::Post) topics.insert(a.topic);
  }

  CompiledScript out;
  std::vector<ProcessId> processes = opts.processes;
  std::map<ProcessId, std::size_t> count;
  std::map<ProcessId, Time> last;
  std::set<OpId> ids;
  std::set<ObjectId> objects;
  for (const auto& a : actions) {
    if (a.actor.empty()) throw ScriptError("action without an actor");
    if (opts.processes.empty() && !count.count(a.actor)) processes.push_back(a.actor);
    if (auto it = last.find(a.actor); it != last.end() && !(it->second < a.issue_time)) {
      throw ScriptError("actions of " + a.actor + " are not strictly time-ordered");
    }
    last[a.actor] = a.issue_time;
    std::size_t n = ++count[a.actor];
    OpId id = a.id.empty() ? default_op_id(a, n) : a.id;
    if (!ids.insert(id).second) throw ScriptError("duplicate operation id " + id);
    if (a.kind == ActionKind::Comment && !topics.count(a.topic)) {
      throw ScriptError(id + " comments on topic '" + a.topic + "' that no post opens");
    }
    Operation o = compile_action(a, id, opts.duration);
    if (o.kind == OpKind::WriteValue && o.object.ns != kFriendsNamespace && !objects.insert(o.object).second) {
      throw ScriptError("two writes to " + o.object.ns + "/" + o.object.key);
    }
    out.ops.push_back(std::move(o));
  }
  out.history = History(processes, out.ops, opts.initial_friends);
  return out;
}

bool access_permitted(const ProcessId& reader, const ProcessId& author, const History& h,
                      std::span<const OpIndex> prefix) {
  Friendship state(h.initial_friends());
  for (OpIndex i : prefix) {
    if (h.op(i).is_friend_op()) state.apply(h.op(i));
  }
  return state.permitted(reader, author);
}

bool access_permitted(const ProcessId& reader, const ProcessId& author, const Friendship& state) {
  return state.permitted(reader, author);
}

nlohmann::json action_to_json(const WallAction& a) {
  nlohmann::json act{{"kind", to_string(a.kind)}};
  switch (a.kind) {
    case ActionKind::Post:
    case ActionKind::Comment:
      act["text"] = a.text;
      act["topic"] = a.topic;
      if (!a.owner.empty()) act["wall"] = a.owner;
      break;
    case ActionKind::ReadWall:
      if (!a.owner.empty()) act["wall"] = a.owner;
      break;
    case ActionKind::AddFriend:
    case ActionKind::RemoveFriend:
      act["subject"] = a.subject;
      break;
  }
  nlohmann::json j{{"t", time_to_json(a.issue_time)}, {"client", a.actor}, {"action", act}};
  if (!a.id.empty()) j["id"] = a.id;
  return j;
}

WallAction action_from_json(const nlohmann::json& j) {
  WallAction a;
  a.issue_time = time_from_json(j.at("t"));
  a.actor = j.at("client").get<std::string>();
  a.id = j.value("id", std::string());
  const auto& act = j.at("action");
  a.kind = parse_action_kind(act.at("kind").get<std::string>());
  a.text = act.value("text", std::string());
  a.topic = act.value("topic", std::string());
  a.owner = act.value("wall", std::string());
  a.subject = act.value("subject", std::string());
  return a;
}

nlohmann::json script_to_json(const std::vector<WallAction>& actions) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& a : actions) out.push_back(action_to_json(a));
  return out;
}

std::vector<WallAction> script_from_json(const nlohmann::json& j) {
  std::vector<WallAction> out;
  for (const auto& e : j) out.push_back(action_from_json(e));
  return out;
}

}  // namespace cclab
