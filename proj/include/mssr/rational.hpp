#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <string>

namespace mssr {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

inline Int rat_num(const Rat &r) { return boost::multiprecision::numerator(r); }
inline Int rat_den(const Rat &r) { return boost::multiprecision::denominator(r); }

// Largest integer <= r.
inline Int rat_floor(const Rat &r) {
  Int q = rat_num(r) / rat_den(r);
  if (rat_num(r) < 0 && q * rat_den(r) != rat_num(r)) --q;
  return q;
}

// Smallest integer >= r.
inline Int rat_ceil(const Rat &r) { return -rat_floor(-r); }

inline int64_t to_i64(const Int &v) { return v.convert_to<int64_t>(); }

inline std::string rat_str(const Rat &r) {
  if (rat_den(r) == 1) return rat_num(r).str();
  return rat_num(r).str() + "/" + rat_den(r).str();
}

} // namespace mssr
