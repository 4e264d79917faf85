#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace clutter {

/// Failure categories raised by the library. The CLI maps these onto exit
/// codes and the machine-readable error record.
enum class ErrorKind {
  InvalidArgument,
  DomainError,
  RangeError,
  InsufficientOrders,
  NearSingularFilterPowerSum,
  SingularHankel,
  UnsupportedOrder,
  RepeatedRoots,
  DegreeMismatch,
  AllPolesDiscarded,
  ComplexPoleStructure,
  PoleHit,
  WrongPath,
  WrongForm,
  NonDecayingLT,
  NotPositiveDefinite,
  UnstableModel,
  TruncationCapExceeded,
  SingularCumulantSystem,
  LengthMismatch,
  InsufficientGrid,
  ConfigError,
  PipelineError,
};

std::string_view to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Error raised inside the simulation pipeline, tagged with the stage that
/// failed. `cause()` keeps the kind of the original error.
class PipelineError : public Error {
 public:
  PipelineError(std::string stage, const Error& inner)
      : Error(ErrorKind::PipelineError, stage + ": " + inner.what()),
        stage_(std::move(stage)),
        cause_(inner.kind()) {}

  const std::string& stage() const noexcept { return stage_; }
  ErrorKind cause() const noexcept { return cause_; }

 private:
  std::string stage_;
  ErrorKind cause_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

}  // namespace clutter
