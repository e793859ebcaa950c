#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace klucas {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the documented domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A certified enclosure could not be tightened enough within the precision cap.
class RefinementError : public Error {
 public:
  using Error::Error;
};

/// An internal estimate contradicted a proven bound; signals a precision bug.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

/// A quantity (floor, partial quotient, sign) could not be certified.
class CertificationError : public Error {
 public:
  CertificationError(const std::string& what, std::size_t certified = 0)
      : Error(what), certified_(certified) {}

  /// Number of items certified before giving up (e.g. partial quotients).
  std::size_t certified() const noexcept { return certified_; }

 private:
  std::size_t certified_;
};

/// Lattice columns are linearly dependent.
class RankError : public Error {
 public:
  using Error::Error;
};

/// A documented precondition of a lemma does not hold (unreduced basis, ...).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Lemma hypotheses fail for the supplied constants (caller must enlarge C).
class InapplicableError : public Error {
 public:
  using Error::Error;
};

/// The continued fraction expansion does not reach far enough.
class InsufficientExpansionError : public Error {
 public:
  using Error::Error;
};

/// Bad command-line or format request.
class UsageError : public Error {
 public:
  using Error::Error;
};

}  // namespace klucas
