#pragma once

#include <stdexcept>
#include <string>

namespace padl {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// bad arguments / violated preconditions
struct InvalidInput : Error {
    using Error::Error;
};

// value outside the provable range at prove time
struct RangeError : Error {
    using Error::Error;
};

// degenerate statement (identity base etc.)
struct DegenerateStatement : Error {
    using Error::Error;
};

// malformed wire bytes
struct DecodeError : Error {
    using Error::Error;
};

}  // namespace padl
