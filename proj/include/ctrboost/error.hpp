#pragma once

#include <stdexcept>
#include <string>

namespace ctrboost {

// Numeric values are part of the C ABI (see c_api.h); do not renumber.
enum class ErrorCode : int {
    invalid_argument = 1,
    io = 2,
    parse = 3,
    schema = 4,
    version = 5,
    checksum = 6,
    truncated = 7,
    invalid_handle = 8,
    undefined_metric = 9,
    buffer_too_small = 10,
    internal = 99,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

inline void require(bool condition, const std::string& message) {
    if (!condition) fail(ErrorCode::invalid_argument, message);
}

} // namespace ctrboost
