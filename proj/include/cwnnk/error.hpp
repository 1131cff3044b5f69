#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cwnnk {

enum class ErrorCode {
    invalid_input,
    dimension_mismatch,
    non_finite,
    zero_bandwidth,
    solver_nonconvergence,
    bad_magic,
    bad_version,
    truncated,
    parse_error,
    io_failure,
    sampling_failure,
};

constexpr std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::invalid_input: return "invalid_input";
    case ErrorCode::dimension_mismatch: return "dimension_mismatch";
    case ErrorCode::non_finite: return "non_finite";
    case ErrorCode::zero_bandwidth: return "zero_bandwidth";
    case ErrorCode::solver_nonconvergence: return "solver_nonconvergence";
    case ErrorCode::bad_magic: return "bad_magic";
    case ErrorCode::bad_version: return "bad_version";
    case ErrorCode::truncated: return "truncated";
    case ErrorCode::parse_error: return "parse_error";
    case ErrorCode::io_failure: return "io_failure";
    case ErrorCode::sampling_failure: return "sampling_failure";
    }
    return "unknown";
}

/// Single exception type for the library; callers branch on code().
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

namespace detail {

inline void require(bool condition, ErrorCode code, const std::string& message) {
    if (!condition) throw Error(code, message);
}

} // namespace detail
} // namespace cwnnk
