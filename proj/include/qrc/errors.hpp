#pragma once

#include <stdexcept>
#include <string>

namespace qrc {

// Bad user input: out-of-range parameters, malformed files, dimension
// mismatches. The CLI maps this to exit code 1.
struct input_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A numerical guard tripped: divergent orbit, trace drift, failed
// eigendecomposition. The CLI maps this to exit code 2.
struct numeric_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace qrc
