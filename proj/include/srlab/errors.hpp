#pragma once

#include <stdexcept>
#include <string>

namespace srlab {

/// Input or document failed validation against a documented contract.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace srlab
