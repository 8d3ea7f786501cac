#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace socsamp {

// A kernel produced a non-finite intermediate. Carries the offending option
// index when one is known (-1 otherwise).
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what, std::ptrdiff_t option_index = -1)
      : std::runtime_error(what), option_index_(option_index) {}
  std::ptrdiff_t option_index() const noexcept { return option_index_; }

 private:
  std::ptrdiff_t option_index_;
};

// A resource cap (e.g. the sweep cell cap) refused the request.
class CapExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Trade-log integrity violation: conflicting mirror pairs, misaligned
// calendars, and similar internally inconsistent inputs.
class IntegrityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace socsamp
