#pragma once

#include <stdexcept>
#include <string>

namespace perturbkit {

// Base class for all library errors.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class DimensionMismatchError : public Error {
public:
  using Error::Error;
};

// A scalar function was evaluated outside its domain; the message names the
// offending eigenvalue.
class DomainError : public Error {
public:
  using Error::Error;
};

class NotHermitianError : public Error {
public:
  using Error::Error;
};

class TraceError : public Error {
public:
  using Error::Error;
};

class NotPsdError : public Error {
public:
  using Error::Error;
};

// A support-preserving operation received a support-extending perturbation or
// vice versa.
class ClassificationError : public Error {
public:
  using Error::Error;
};

class EigensolverError : public Error {
public:
  EigensolverError(const std::string& msg, int dim, double condition_estimate)
      : Error(msg), dim(dim), condition_estimate(condition_estimate) {}
  int dim;
  double condition_estimate;
};

// Requested random object cannot be built (e.g. epsilon too large for PSD).
class InfeasibleError : public Error {
public:
  using Error::Error;
};

// An internal invariant failed (e.g. a rotation produced a visibly
// non-Hermitian matrix); indicates a bug, not bad input.
class InternalConsistencyError : public Error {
public:
  using Error::Error;
};

class DegenerateDataError : public Error {
public:
  using Error::Error;
};

}  // namespace perturbkit
