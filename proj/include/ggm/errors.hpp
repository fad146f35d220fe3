#pragma once

#include <stdexcept>

namespace ggm {

// Bad user input: wrong graph kind, out-of-range vertex, inconsistent prior, ...
struct ValidationError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Numeric failure: singular matrix, non-repairable covariance, ...
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace ggm
