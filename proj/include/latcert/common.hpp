#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <stdexcept>
#include <string>

namespace latcert {

using Int = boost::multiprecision::cpp_int;

/// Thrown on malformed user input (fixtures, CLI arguments, bad preconditions).
struct input_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Thrown when a constructed certificate fails its own re-verification.
/// Reaching this indicates a bug, not bad input.
struct internal_error : std::logic_error {
    using std::logic_error::logic_error;
};

inline void require(bool cond, const std::string& msg)
{
    if (!cond) throw input_error(msg);
}

inline void verify(bool cond, const std::string& msg)
{
    if (!cond) throw internal_error(msg);
}

} // namespace latcert
