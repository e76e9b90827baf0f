#pragma once

// Executions as the checkers see them: operations, per-process local
// histories, whole histories, serializations and read legality.

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cclab/time.hpp"

namespace cclab {

class PartialOrder;

using ProcessId = std::string;
using OpId = std::string;
// Position of an operation in History::ops(). All internal relations are
// expressed over indices; ids only appear at the I/O boundary.
using OpIndex = std::size_t;

inline constexpr const char* kFriendsNamespace = "friends";
std::string wall_namespace(const ProcessId& owner);

struct ObjectId {
  std::string ns;
  std::string key;

  auto operator<=>(const ObjectId&) const = default;
};

enum class OpKind { WriteValue, ReadObject, ReadWallDiff };

enum class TagKind { Post, Comment, AddFriend, RemoveFriend, WallRead };

const char* to_string(TagKind kind);
TagKind parse_tag_kind(const std::string& text);

struct AppTag {
  TagKind kind = TagKind::Post;
  std::string topic;   // Post: topic it opens. Comment: topic it joins.
  ProcessId subject;   // AddFriend / RemoveFriend only.

  bool post_like() const {
    return kind == TagKind::Post || kind == TagKind::AddFriend || kind == TagKind::RemoveFriend;
  }
  bool friend_op() const { return kind == TagKind::AddFriend || kind == TagKind::RemoveFriend; }
  bool operator==(const AppTag&) const = default;
};

struct Operation {
  OpId id;
  ProcessId process;
  OpKind kind = OpKind::WriteValue;
  // ReadWallDiff only uses object.ns.
  ObjectId object;
  std::string value;
  // ReadObject result; nullopt is the initial value (bottom).
  std::optional<std::string> read_value;
  // ReadWallDiff result: ids of the writes in the diff.
  std::vector<OpId> returned;
  Time inv{0};
  Time resp{1};
  std::optional<AppTag> tag;

  bool is_write() const { return kind == OpKind::WriteValue; }
  bool is_read() const { return kind != OpKind::WriteValue; }
  bool is_friend_op() const { return is_write() && tag && tag->friend_op(); }
};

using FriendPair = std::pair<ProcessId, ProcessId>;
FriendPair make_friend_pair(const ProcessId& a, const ProcessId& b);

struct LocalHistory {
  ProcessId process;
  std::vector<OpIndex> ops;
};

struct Serialization {
  std::vector<OpIndex> ops;
  std::optional<ProcessId> subject;
};

class HistoryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class History {
 public:
  History() = default;
  History(std::vector<ProcessId> processes, std::vector<Operation> ops,
          std::vector<FriendPair> initial_friends = {});

  const std::vector<ProcessId>& processes() const { return processes_; }
  const std::vector<Operation>& ops() const { return ops_; }
  std::size_t size() const { return ops_.size(); }
  const Operation& op(OpIndex i) const { return ops_.at(i); }
  const std::set<FriendPair>& initial_friends() const { return initial_friends_; }

  bool has_process(const ProcessId& p) const;
  std::optional<OpIndex> find(const OpId& id) const;
  // Throws HistoryError for unknown ids.
  OpIndex index_of(const OpId& id) const;
  // Operations of p in program order. Throws HistoryError for unknown p.
  const std::vector<OpIndex>& local(const ProcessId& p) const;
  LocalHistory local_history(const ProcessId& p) const;

  // Writes a read takes its result from: the diff members of a
  // ReadWallDiff, or the (at most one) matching write of a ReadObject.
  // Unresolvable references are dropped here and reported by
  // validate_history.
  const std::vector<OpIndex>& sources(OpIndex read) const { return sources_.at(read); }
  const std::vector<OpIndex>& writes() const { return writes_; }

  // Processes appearing only in ops or friend pairs are kept out of
  // processes(); validate_history reports them.
  const std::vector<std::string>& construction_notes() const { return notes_; }

 private:
  std::vector<ProcessId> processes_;
  std::vector<Operation> ops_;
  std::set<FriendPair> initial_friends_;
  std::map<OpId, OpIndex> by_id_;
  std::map<ProcessId, std::vector<OpIndex>> locals_;
  std::vector<std::vector<OpIndex>> sources_;
  std::vector<OpIndex> writes_;
  std::vector<std::string> notes_;
};

struct Violation {
  std::string code;
  std::string detail;
};

// Empty result means the history conforms to the model assumptions.
std::vector<Violation> validate_history(const History& h);

// The ground set H|(p+W): p's operations plus every write, ascending index.
std::vector<OpIndex> project_pi_plus_w(const History& h, const ProcessId& p);

// Reads-from edges (write -> read) only; no closure.
PartialOrder derive_reads_from(const History& h);

// Access-control state for wall reads: who may see whose writes.
class Friendship {
 public:
  Friendship() = default;
  explicit Friendship(std::set<FriendPair> initial) : initial_(std::move(initial)) {}

  // Records a friend operation; the latest one per pair wins.
  void apply(const Operation& friend_op);
  bool permitted(const ProcessId& reader, const ProcessId& author) const;

 private:
  std::set<FriendPair> initial_;
  std::map<FriendPair, bool> latest_;
};

// Legality of a serialization of the ground set (whole history when
// subject is empty, H|(subject+W) otherwise). Throws HistoryError when s is
// not exactly that ground set.
bool is_legal_serialization(const Serialization& s, const History& h,
                            const std::optional<ProcessId>& subject);

// Like is_legal_serialization but reports the first illegal read instead of
// a boolean. Returns nullopt for legal sequences.
std::optional<std::string> explain_illegal(const Serialization& s, const History& h,
                                           const std::optional<ProcessId>& subject);

}  // namespace cclab
