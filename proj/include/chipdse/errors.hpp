// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace chipdse {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed shorthand, JSON or CSV input.
class ParseError : public Error {
public:
    using Error::Error;
};

/// Configuration rejected by the feasibility rules.
class InfeasibleError : public Error {
public:
    using Error::Error;
};

/// Over-constrained space (sampler rejection budget) or empty input.
class SpaceError : public Error {
public:
    using Error::Error;
};

/// Physically impossible model input, e.g. a die larger than the wafer.
class ModelError : public Error {
public:
    using Error::Error;
};

class CapExceededError : public Error {
public:
    using Error::Error;
};

class BackendError : public Error {
public:
    using Error::Error;
};

/// Context-store write or merge failure.
class ContextError : public Error {
public:
    using Error::Error;
};

}  // namespace chipdse
