#include "cclab/history_json.hpp"

#include <fstream>

namespace cclab {

namespace {

const char* kind_name(OpKind k) {
  switch (k) {
    case OpKind::WriteValue: return "write";
    case OpKind::ReadObject: return "read";
    case OpKind::ReadWallDiff: return "read_wall";
  }
  return "?";
}

OpKind parse_kind(const std::string& s) {
  if (s == "write") return OpKind::WriteValue;
  if (s == "read") return OpKind::ReadObject;
  if (s == "read_wall") return OpKind::ReadWallDiff;
  throw HistoryError("unknown operation kind: " + s);
}

std::string required_string(const json& j, const char* field) {
  auto it = j.find(field);
  if (it == j.end() || !it->is_string()) {
    throw HistoryError(std::string("missing string field '") + field + "'");
  }
  return it->get<std::string>();
}

}  // namespace

json time_to_json(const Time& t) { return format_time(t); }

Time time_from_json(const json& j) {
  if (j.is_string()) return parse_time(j.get<std::string>());
  if (j.is_number_integer()) return Time(j.get<std::int64_t>());
  if (j.is_number()) return parse_time(j.dump());
  throw HistoryError("time must be a decimal string or number");
}

json op_to_json(const Operation& o) {
  json j;
  j["id"] = o.id;
  j["process"] = o.process;
  j["kind"] = kind_name(o.kind);
  j["namespace"] = o.object.ns;
  if (o.kind != OpKind::ReadWallDiff) j["key"] = o.object.key;
  if (o.is_write()) j["value"] = o.value;
  if (o.kind == OpKind::ReadObject) {
    j["returned"] = o.read_value ? json(*o.read_value) : json(nullptr);
  }
  if (o.kind == OpKind::ReadWallDiff) j["returned"] = o.returned;
  j["inv"] = time_to_json(o.inv);
  j["resp"] = time_to_json(o.resp);
  if (o.tag) {
    json t;
    t["kind"] = to_string(o.tag->kind);
    if (!o.tag->topic.empty()) t["topic"] = o.tag->topic;
    if (!o.tag->subject.empty()) t["subject"] = o.tag->subject;
    j["tag"] = t;
  }
  return j;
}

Operation op_from_json(const json& j) {
  Operation o;
  o.id = required_string(j, "id");
  o.process = required_string(j, "process");
  o.kind = parse_kind(required_string(j, "kind"));
  o.object.ns = required_string(j, "namespace");
  if (o.kind != OpKind::ReadWallDiff) o.object.key = j.value("key", std::string());
  if (o.is_write()) o.value = required_string(j, "value");
  if (o.kind == OpKind::ReadObject) {
    auto it = j.find("returned");
    if (it != j.end() && !it->is_null()) o.read_value = it->get<std::string>();
  }
  if (o.kind == OpKind::ReadWallDiff) {
    auto it = j.find("returned");
    if (it != j.end()) {
      if (!it->is_array()) throw HistoryError("read_wall 'returned' must be an array in " + o.id);
      o.returned = it->get<std::vector<OpId>>();
    }
  }
  if (!j.contains("inv") || !j.contains("resp")) throw HistoryError("missing inv/resp in " + o.id);
  o.inv = time_from_json(j.at("inv"));
  o.resp = time_from_json(j.at("resp"));
  if (auto it = j.find("tag"); it != j.end() && !it->is_null()) {
    AppTag tag;
    tag.kind = parse_tag_kind(required_string(*it, "kind"));
    tag.topic = it->value("topic", std::string());
    tag.subject = it->value("subject", std::string());
    o.tag = tag;
  }
  return o;
}

json history_to_json(const History& h) {
  json doc;
  doc["processes"] = h.processes();
  json friends = json::array();
  for (const auto& [a, b] : h.initial_friends()) friends.push_back({a, b});
  doc["initial_friends"] = friends;
  json ops = json::array();
  for (const auto& o : h.ops()) ops.push_back(op_to_json(o));
  doc["ops"] = ops;
  return doc;
}

History history_from_json(const json& doc) {
  if (!doc.is_object()) throw HistoryError("history document must be an object");
  std::vector<ProcessId> processes;
  if (auto it = doc.find("processes"); it != doc.end()) processes = it->get<std::vector<ProcessId>>();
  std::vector<FriendPair> friends;
  if (auto it = doc.find("initial_friends"); it != doc.end()) {
    for (const auto& pair : *it) {
      if (!pair.is_array() || pair.size() != 2) throw HistoryError("initial_friends entries are pairs");
      friends.emplace_back(pair[0].get<std::string>(), pair[1].get<std::string>());
    }
  }
  std::vector<Operation> ops;
  if (auto it = doc.find("ops"); it != doc.end()) {
    for (const auto& j : *it) ops.push_back(op_from_json(j));
  }
  return History(std::move(processes), std::move(ops), std::move(friends));
}

json order_to_json(const PartialOrder& po, const History& h) {
  json edges = json::array();
  for (const auto& [a, b] : po.edges()) edges.push_back({h.op(a).id, h.op(b).id});
  return json{{"edges", edges}};
}

PartialOrder order_from_json(const json& doc, const History& h) {
  PartialOrder po(h.size());
  for (const auto& e : doc.at("edges")) {
    po.add_edge(h.index_of(e.at(0).get<std::string>()), h.index_of(e.at(1).get<std::string>()));
  }
  return po;
}

json serialization_to_json(const Serialization& s, const History& h) {
  json out = json::array();
  for (OpIndex i : s.ops) out.push_back(h.op(i).id);
  return out;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

void write_json_file(const std::string& path, const json& doc) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << doc.dump(2) << "\n";
}

}  // namespace cclab
