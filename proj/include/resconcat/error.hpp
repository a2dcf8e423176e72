#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace resconcat {

enum class ErrorKind {
    invalid_argument,
    dimension,
    non_finite,
    degenerate_draw,
    insufficient_history,
    degenerate_target,
    divergence,
    io,
};

constexpr std::string_view to_string(ErrorKind kind)
{
    switch (kind) {
    case ErrorKind::invalid_argument: return "invalid_argument";
    case ErrorKind::dimension: return "dimension";
    case ErrorKind::non_finite: return "non_finite";
    case ErrorKind::degenerate_draw: return "degenerate_draw";
    case ErrorKind::insufficient_history: return "insufficient_history";
    case ErrorKind::degenerate_target: return "degenerate_target";
    case ErrorKind::divergence: return "divergence";
    case ErrorKind::io: return "io";
    }
    return "unknown";
}

/// Every failure raised by the library carries a machine-readable kind.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message)
      , kind_(kind)
    {
    }

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

inline void require(bool condition, ErrorKind kind, const std::string& message)
{
    if (!condition) throw Error(kind, message);
}

}  // namespace resconcat
