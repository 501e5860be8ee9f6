#pragma once

#include <stdexcept>
#include <string>

namespace xiaudit {

/// Base class for every numerical failure raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the domain of the function (x <= 0 for K, bad tolerance, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Evaluation at a pole: Gamma at a non-positive integer, zeta at 1, the
/// closed form pi*nu/sin(pi*nu) at an integer order.
class PoleError : public Error {
 public:
  using Error::Error;
};

class OverflowError : public Error {
 public:
  using Error::Error;
};

/// An iterative or adaptive procedure ran out of budget before meeting its tolerance.
class NonConvergenceError : public Error {
 public:
  using Error::Error;
};

/// The quadrature error estimate exceeds the accuracy the caller asked for.
class AccuracyError : public Error {
 public:
  using Error::Error;
};

/// Tail sums of an improper integral grow instead of decaying.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

/// Xi(t) came back with an imaginary residue above the realness bound.
class RealnessError : public Error {
 public:
  using Error::Error;
};

class InvalidBracketError : public Error {
 public:
  using Error::Error;
};

/// Least-squares system is rank deficient (e.g. all abscissae coincide).
class SingularFitError : public Error {
 public:
  using Error::Error;
};

class CacheCorruptionError : public Error {
 public:
  using Error::Error;
};

}  // namespace xiaudit
