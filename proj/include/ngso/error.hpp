// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace ngso {

// Argument outside the mathematical domain of a closed-form expression.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Inconsistent constellation or experiment configuration.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Unknown identifier (satellite, site, preset, experiment).
class LookupError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

// Numerical breakdown (e.g. an arccos argument far outside [-1, 1]).
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline void require(bool condition, const std::string& message) {
    if (!condition) {
        throw DomainError(message);
    }
}

}  // namespace detail
}  // namespace ngso
