#ifndef AXYB_ERROR_HPP
#define AXYB_ERROR_HPP

#include <stdexcept>
#include <string>

namespace axyb {

enum class ErrorKind {
  InvalidArgument,
  DegenerateRotation,
  InsufficientData,
  FormatError,
  ValidationError,
  NearSingularCovariance,
  RankDeficientMotion,
  EmptyAfterFilter,
  OutOfDomain,
  InvalidWorkspace,
  InvalidRange,
  NoConvergence,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

  /// true for errors caused by bad input data (CLI exit code 2),
  /// false for numerical failures (CLI exit code 3).
  bool is_data_error() const {
    switch (kind_) {
      case ErrorKind::InvalidArgument:
      case ErrorKind::InsufficientData:
      case ErrorKind::FormatError:
      case ErrorKind::ValidationError:
      case ErrorKind::InvalidWorkspace:
      case ErrorKind::InvalidRange:
        return true;
      default:
        return false;
    }
  }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void throw_error(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

}  // namespace axyb

#endif  // AXYB_ERROR_HPP
