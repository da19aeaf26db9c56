#pragma once

#include <stdexcept>
#include <string>

namespace critgraph {

/// Invalid distribution or sampler parameter (non-positive shape, empty alphas, ...).
class parameter_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Input outside the domain an operation is defined on (non-3-regular kernel, k = 0 core, ...).
class domain_error : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A point location that does not lie on the structure it is used with.
class location_error : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

/// Request outside what an exact routine supports (e.g. kernel enumeration for k > 4).
class unsupported_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed text input for one of the line-based formats.
class format_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace critgraph
