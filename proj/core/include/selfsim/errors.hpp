#pragma once

#include <stdexcept>
#include <string>

namespace selfsim {

// Precondition violated by the caller (programming error, not bad data).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Malformed or inconsistent input data: files, ids, boxes outside images.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace selfsim
