#pragma once

#include <stdexcept>
#include <string>

namespace cvep {

// Violated precondition or malformed input/config. The CLI maps this to
// exit code 2; everything else derived from std::exception maps to 1.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace cvep
