#pragma once

#include <stdexcept>
#include <string>

namespace dsice {

// Invalid input to a model function (non-positive capital, mu outside [0,1], ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Configuration or input-file problem. The CLI maps this to exit code 2.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Solver, fitting or optimizer failure. The CLI maps this to exit code 3.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A next-period state left the approximation box.
class DomainViolation : public NumericalError {
public:
    DomainViolation(const std::string& what, int dimension)
        : NumericalError(what), dimension_(dimension) {}
    int dimension() const noexcept { return dimension_; }

private:
    int dimension_;
};

}  // namespace dsice
