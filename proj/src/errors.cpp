#include "evsite/errors.hpp"

#include <fmt/format.h>

namespace evsite {

ValidationError::ValidationError(std::string file, std::size_t line, std::string field,
                                 const std::string& what)
    : std::runtime_error(line > 0 ? fmt::format("{}:{}: field '{}': {}", file, line, field, what)
                                  : fmt::format("{}: field '{}': {}", file, field, what)),
      file_(std::move(file)),
      line_(line),
      field_(std::move(field)) {}

}  // namespace evsite
