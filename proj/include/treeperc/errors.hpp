#pragma once

#include <stdexcept>
#include <string>

namespace treeperc {

/// Argument outside the domain of an operation (d < 2, negative level, empty grid, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A stated precondition of a numerical bound does not hold (e.g. a divergent series).
class PreconditionError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Iterative solver or root bracket failed.
class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A sampler would exceed its configured vertex budget.
class ResourceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace treeperc
