#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace rstorm {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A topology, cluster or fixture failed its structural checks.
class ValidationError : public Error {
public:
    ValidationError(const std::string& what, std::vector<std::string> violations = {})
        : Error(what), violations_(std::move(violations)) {}

    const std::vector<std::string>& violations() const noexcept { return violations_; }

private:
    std::vector<std::string> violations_;
};

/// Committing a task would push a node's residual memory below zero.
class HardConstraintViolation : public Error {
public:
    using Error::Error;
};

/// No node satisfies the memory constraint for a task.
class Unschedulable : public Error {
public:
    using Error::Error;
};

/// A referenced file, fixture or generator could not be found.
class MissingInput : public Error {
public:
    using Error::Error;
};

class UnknownId : public Error {
public:
    using Error::Error;
};

}  // namespace rstorm
