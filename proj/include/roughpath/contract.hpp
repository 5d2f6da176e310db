#pragma once

#include <stdexcept>
#include <string>

namespace roughpath {

// Precondition failures (bad arguments, mismatched shapes) throw
// std::invalid_argument; numerical failures (singular factorizations,
// diverging solves) throw std::runtime_error.
inline void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

inline void require_numeric(bool cond, const std::string& msg) {
  if (!cond) throw std::runtime_error(msg);
}

}  // namespace roughpath
