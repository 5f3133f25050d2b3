#pragma once

#include <stdexcept>
#include <string>

namespace bohm {

enum class ErrorCode {
    invalid_argument = 1,
    node_proximity,
    step_underflow,
    region_violation,
    rejection_stall,
    config,
    io,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool cond, const std::string& what)
{
    if (!cond) fail(ErrorCode::invalid_argument, what);
}

}  // namespace bohm
