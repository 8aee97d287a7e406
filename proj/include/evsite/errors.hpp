#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace evsite {

// Malformed or out-of-range input. Carries the offending file, line and field
// when the error came from ingestion (line 0 means "not line-specific").
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
  ValidationError(std::string file, std::size_t line, std::string field, const std::string& what);

  const std::string& file() const { return file_; }
  std::size_t line() const { return line_; }
  const std::string& field() const { return field_; }

 private:
  std::string file_;
  std::size_t line_ = 0;
  std::string field_;
};

// An optimisation stage has no feasible answer (capacity caps, α targets).
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Numerical breakdown (non-finite loss, failed normalisation).
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace evsite
