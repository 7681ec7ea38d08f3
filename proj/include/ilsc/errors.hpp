#pragma once

#include <stdexcept>

namespace ilsc {

// Bad arguments or malformed content. The CLI maps these to exit code 2.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Environment and I/O failures. The CLI maps these to exit code 1.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace ilsc
