#pragma once

#include <stdexcept>
#include <string>

namespace anomq {

// Malformed or inconsistent user input (files, query specs, flags).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A request that exceeds a configured size or work budget.
class ResourceLimit : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace anomq
