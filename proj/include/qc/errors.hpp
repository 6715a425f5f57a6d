#pragma once

#include <stdexcept>
#include <string>

namespace qc {

// Malformed or inconsistent input data (bad file, unknown code, broken invariant).
// The CLI maps this to exit code 2.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace qc
