#ifndef GBX_ERROR_HPP
#define GBX_ERROR_HPP

#include <stdexcept>
#include <string>

namespace gbx {

// Base class for all errors raised by the library.
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Invalid arguments or data violating a documented invariant.
struct validation_error : error {
    using error::error;
};

// Malformed or truncated on-disk data.
struct format_error : error {
    using error::error;
};

// Filesystem-level failure (open/read/write).
struct io_error : error {
    using error::error;
};

// Numerically ill-posed request (e.g. rank estimation on a zero matrix).
struct numerical_error : error {
    using error::error;
};

}  // namespace gbx

#endif
