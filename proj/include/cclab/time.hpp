#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <boost/rational.hpp>

namespace cclab {

// Exact timestamps. Histories and the simulator only ever use decimal
// inputs, so an int64 rational never loses precision.
using Time = boost::rational<std::int64_t>;

// Parses "12", "-3", "9.05", "0.125" exactly. Throws std::invalid_argument
// on anything else.
Time parse_time(std::string_view text);

// Inverse of parse_time for terminating decimals; falls back to "num/den"
// when the denominator has prime factors other than 2 and 5.
std::string format_time(const Time& t);

double to_double(const Time& t);

}  // namespace cclab
