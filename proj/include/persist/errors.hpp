#pragma once

#include <stdexcept>
#include <string>

namespace persist {

// Every failure the library reports is one of these three. The CLI maps them
// to exit codes 2, 3 and 4 respectively.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConsistencyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace persist
