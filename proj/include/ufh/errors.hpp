#pragma once

#include <stdexcept>
#include <string>

namespace ufh {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Elements or specs from different group models were combined.
class ModelMismatch : public Error {
 public:
  using Error::Error;
};

/// A computation needed points outside the enumerated window or past the
/// enumeration cap.  Raised instead of returning a possibly wrong value.
class BeyondWindow : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A checked property failed.  `witness` is a machine-readable description
/// (usually JSON) of the offending data.
class VerificationFailure : public Error {
 public:
  VerificationFailure(const std::string& what, std::string witness)
      : Error(what), witness_(std::move(witness)) {}
  const std::string& witness() const noexcept { return witness_; }

 private:
  std::string witness_;
};

}  // namespace ufh
