#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace reichlab {

using Complex = std::complex<double>;

// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Argument outside the domain of an operation (|z| >= 1 for a disk point, r0 <= 0, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

// A documented precondition of an audit does not hold for the given input.
class PreconditionError : public Error {
public:
    using Error::Error;
};

// An object invariant would be broken (quasilattice offset above 1/8, ...).
class InvariantViolation : public Error {
public:
    using Error::Error;
};

// Requested tolerance could not be reached; carries the best estimate found.
class ToleranceNotMet : public Error {
public:
    ToleranceNotMet(const std::string& what, double best_lhs, double best_rhs)
        : Error(what), best_lhs_(best_lhs), best_rhs_(best_rhs) {}
    double best_lhs() const noexcept { return best_lhs_; }
    double best_rhs() const noexcept { return best_rhs_; }

private:
    double best_lhs_;
    double best_rhs_;
};

// Truncated series did not reach the requested tail bound; carries the partial value.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, Complex partial, double tail)
        : Error(what), partial_(partial), tail_(tail) {}
    Complex partial_value() const noexcept { return partial_; }
    double tail_bound() const noexcept { return tail_; }

private:
    Complex partial_;
    double tail_;
};

// Integrand not integrable, or quadrature refinement failed to settle.
class IntegrabilityError : public Error {
public:
    using Error::Error;
};

class UnsupportedGroup : public Error {
public:
    using Error::Error;
};

// Error that names a lattice index pair.
class IndexedError : public Error {
public:
    IndexedError(const std::string& what, long k, long l) : Error(what), k_(k), l_(l) {}
    long k() const noexcept { return k_; }
    long l() const noexcept { return l_; }

private:
    long k_;
    long l_;
};

class NotWellDistributed : public IndexedError {
public:
    using IndexedError::IndexedError;
};

class EnvelopeViolation : public IndexedError {
public:
    using IndexedError::IndexedError;
};

class WindowTooSmall : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace reichlab
