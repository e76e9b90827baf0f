#include "cclab/time.hpp"

#include <cctype>
#include <limits>
#include <stdexcept>

namespace cclab {

namespace {

std::int64_t checked_mul10_add(std::int64_t acc, int digit, std::string_view text) {
  constexpr auto kMax = std::numeric_limits<std::int64_t>::max();
  if (acc > (kMax - digit) / 10) {
    throw std::invalid_argument("time value out of range: " + std::string(text));
  }
  return acc * 10 + digit;
}

}  // namespace

Time parse_time(std::string_view text) {
  std::string_view s = text;
  if (s.empty()) throw std::invalid_argument("empty time value");
  bool negative = false;
  if (s.front() == '-' || s.front() == '+') {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    // The "num/den" form format_time falls back to.
    Time n = parse_time(s.substr(0, slash));
    Time d = parse_time(s.substr(slash + 1));
    if (n.denominator() != 1 || d.denominator() != 1 || !(d > Time(0)) || s.substr(0, slash).empty() ||
        s[0] == '-' || s[0] == '+' || s[slash + 1] == '-' || s[slash + 1] == '+') {
      throw std::invalid_argument("malformed time value: " + std::string(text));
    }
    return Time(negative ? -n.numerator() : n.numerator(), d.numerator());
  }
  std::int64_t num = 0;
  std::int64_t den = 1;
  bool seen_digit = false;
  bool seen_point = false;
  std::size_t frac_digits = 0;
  for (char c : s) {
    if (c == '.') {
      if (seen_point || !seen_digit) throw std::invalid_argument("malformed time value: " + std::string(text));
      seen_point = true;
      continue;
    }
    if (!std::isdigit(static_cast<unsigned char>(c))) {
      throw std::invalid_argument("malformed time value: " + std::string(text));
    }
    seen_digit = true;
    num = checked_mul10_add(num, c - '0', text);
    if (seen_point) {
      den = checked_mul10_add(den, 0, text);
      ++frac_digits;
    }
  }
  if (!seen_digit || (seen_point && frac_digits == 0)) {
    throw std::invalid_argument("malformed time value: " + std::string(text));
  }
  return Time(negative ? -num : num, den);
}

std::string format_time(const Time& t) {
  std::int64_t num = t.numerator();
  std::int64_t den = t.denominator();
  std::int64_t d = den;
  int twos = 0, fives = 0;
  while (d % 2 == 0) { d /= 2; ++twos; }
  while (d % 5 == 0) { d /= 5; ++fives; }
  if (d != 1) return std::to_string(num) + "/" + std::to_string(den);

  int digits = twos > fives ? twos : fives;
  std::int64_t scale = 1;
  for (int i = 0; i < digits; ++i) scale *= 10;
  // den divides scale, so this is exact.
  std::int64_t scaled = num * (scale / den);
  bool negative = scaled < 0;
  std::int64_t mag = negative ? -scaled : scaled;
  std::string whole = std::to_string(mag / scale);
  std::string out = negative ? "-" + whole : whole;
  if (digits > 0) {
    std::string frac = std::to_string(mag % scale);
    frac.insert(0, static_cast<std::size_t>(digits) - frac.size(), '0');
    out += "." + frac;
  }
  return out;
}

double to_double(const Time& t) {
  return boost::rational_cast<double>(t);
}

}  // namespace cclab
