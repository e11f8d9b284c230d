#pragma once

#include <stdexcept>
#include <string>

namespace dlfr {

struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Shape or precondition violation on tensor-like arguments.
struct shape_error : error {
    using error::error;
};

// Index or step outside its valid range.
struct bounds_error : error {
    using error::error;
};

// Malformed config file, preset name, or CLI argument.
struct config_error : error {
    using error::error;
};

// File read/write failure, bad magic, truncation, trailing bytes.
struct io_error : error {
    using error::error;
};

}  // namespace dlfr
