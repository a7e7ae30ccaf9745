#pragma once

#include <stdexcept>
#include <string>

namespace discrep {

// Library-wide error type. Messages are complete sentences with context
// (file/line for parse errors, the offending value for contract violations).
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace discrep
