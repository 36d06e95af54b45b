#pragma once

#include <stdexcept>
#include <string>

namespace radarclass {

enum class ErrorKind {
  Range,
  InvalidCode,
  InvalidMaterial,
  InvalidArgument,
  Geometry,
  EmptyDataset,
  Detection,
  VarianceUndefined,
  InsufficientData,
  NumericOverflow,
  DegenerateTraining,
  Internal,
  Input,
  EmptyEvaluation,
  Parse,
  Compatibility,
  Config,
  Io,
};

const char* to_string(ErrorKind kind) noexcept;

// Single exception type for the library; the kind drives CLI exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + " error: " + what), kind_(kind) {}

  [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace radarclass
