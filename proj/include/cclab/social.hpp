#pragma once

// Wall scripts: posts, comments, friend changes and wall reads, and the
// tagged operations they compile to.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "cclab/history.hpp"

namespace cclab {

enum class ActionKind { Post, Comment, ReadWall, AddFriend, RemoveFriend };

const char* to_string(ActionKind k);
ActionKind parse_action_kind(const std::string& text);

struct WallAction {
  ActionKind kind = ActionKind::Post;
  ProcessId actor;
  Time issue_time{0};
  std::string text;     // Post / Comment
  std::string topic;    // Post / Comment
  ProcessId owner;      // wall written to or read; defaults to the actor
  ProcessId subject;    // AddFriend / RemoveFriend
  OpId id;              // optional; generated when empty
};

class ScriptError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CompileOptions {
  std::vector<ProcessId> processes;  // defaults to actors in first-seen order
  std::vector<FriendPair> initial_friends;
  Time duration{1, 10};
};

struct CompiledScript {
  std::vector<Operation> ops;  // parallel to the actions
  History history;             // reads carry empty diffs
};

// Throws ScriptError for non-increasing issue times of an actor, duplicate
// (namespace, key), duplicate ids and comments on topics no post opens.
CompiledScript compile_script(const std::vector<WallAction>& actions, const CompileOptions& opts = {});

// The single operation an action compiles to, with `id` already chosen.
Operation compile_action(const WallAction& a, const OpId& id, const Time& duration);
OpId default_op_id(const WallAction& a, std::size_t actor_index);

// Access control as a fold over a serialization prefix.
bool access_permitted(const ProcessId& reader, const ProcessId& author, const History& h,
                      std::span<const OpIndex> prefix);
// Access control against a replica's friendship state.
bool access_permitted(const ProcessId& reader, const ProcessId& author, const Friendship& state);

// {"t":"3","client":"Bob","id":"w:No","action":{"kind":"comment","text":"No","topic":"lost","wall":"Alice"}}
nlohmann::json action_to_json(const WallAction& a);
WallAction action_from_json(const nlohmann::json& j);
nlohmann::json script_to_json(const std::vector<WallAction>& actions);
std::vector<WallAction> script_from_json(const nlohmann::json& j);

}  // namespace cclab
