#pragma once

#include <string>

#include "json.hpp"

#include "cclab/history.hpp"
#include "cclab/partial_order.hpp"

namespace cclab {

using nlohmann::json;

// {"processes":[...], "initial_friends":[["A","B"],...], "ops":[...]}.
// Times are written as exact decimal strings; numbers are accepted on input.
json history_to_json(const History& h);
History history_from_json(const json& doc);

json op_to_json(const Operation& o);
Operation op_from_json(const json& j);

json time_to_json(const Time& t);
Time time_from_json(const json& j);

// {"edges":[["id1","id2"],...]}
json order_to_json(const PartialOrder& po, const History& h);
PartialOrder order_from_json(const json& doc, const History& h);

json serialization_to_json(const Serialization& s, const History& h);

json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const json& doc);

}  // namespace cclab
