#ifndef BREAKSCOPE_ERROR_HPP
#define BREAKSCOPE_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace breakscope {

enum class ErrorKind {
  InvalidArgument,
  InvalidPanel,
  ZeroVarianceColumn,
  RankRequestTooLarge,
  EigenFailure,
  EmptySegment,
  SegmentTooShort,
  InfeasibleSpacing,
  InvalidConfiguration,
  TooFewObservations,
  RegimeTooShort,
  SchemeArityMismatch,
  ParseError,
  MissingData,
  RaggedRows,
  IoError,
};

// Coarse classes used for process exit codes.
enum class ErrorClass { Usage, Data, Numerical };

std::string_view to_string(ErrorKind kind) noexcept;
ErrorClass classify(ErrorKind kind) noexcept;

// Exit codes: success 0, usage 2, data 3, numerical 4.
int exit_code(ErrorClass cls) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace breakscope

#endif  // BREAKSCOPE_ERROR_HPP
