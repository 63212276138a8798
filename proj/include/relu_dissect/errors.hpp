#pragma once

#include <stdexcept>
#include <string>

namespace relu_dissect {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Problem construction
class MalformedProblem : public Error { using Error::Error; };
class DimensionMismatch : public Error { using Error::Error; };
class EmptyInput : public Error { using Error::Error; };
class IndexOutOfRange : public Error { using Error::Error; };
class OutOfRange : public Error { using Error::Error; };

// LP / geometry
class Unbounded : public Error { using Error::Error; };
class NumericalFailure : public Error { using Error::Error; };
class EmptyRoot : public Error { using Error::Error; };

// Network documents
class SchemaError : public Error { using Error::Error; };
class DimensionChainError : public Error { using Error::Error; };
class NonFiniteWeight : public Error { using Error::Error; };
class NonFiniteInput : public Error { using Error::Error; };

// Conversion and queries
class UnboundedDomain : public Error { using Error::Error; };
class EmptyDomain : public Error { using Error::Error; };
class OutsideDomain : public Error { using Error::Error; };
class DomainMismatch : public Error { using Error::Error; };

}  // namespace relu_dissect
