#include "grouptrack/error.hpp"

namespace grouptrack {

ParseError::ParseError(const std::string& source, std::size_t line, const std::string& message)
    : Error(source + ":" + std::to_string(line) + ": " + message), line_(line) {}

}  // namespace grouptrack
