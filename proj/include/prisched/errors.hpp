#pragma once

#include <stdexcept>
#include <string>

namespace prisched {

/// Malformed input: bad index, invalid parameter, inconsistent dimensions.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An exhaustive routine was asked to run beyond its configured size cap.
class SizeLimitError : public std::length_error {
 public:
  SizeLimitError(const std::string& what_, int cap)
      : std::length_error(what_ + " (cap " + std::to_string(cap) + ")"), cap_(cap) {}
  int cap() const { return cap_; }

 private:
  int cap_;
};

}  // namespace prisched
