#pragma once

#include <stdexcept>

namespace chn {

// Raised when a computation produces non-finite values (diverged training,
// overflowing probes). Kept distinct from input/usage errors so callers can
// map it to a dedicated exit code.
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace chn
