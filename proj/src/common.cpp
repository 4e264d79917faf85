#include "clutter/error.hpp"
#include "clutter/parallel.hpp"
#include "clutter/warnings.hpp"

#include <cstdlib>
#include <iostream>
#include <mutex>
#include <utility>

namespace clutter {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::RangeError: return "RangeError";
    case ErrorKind::InsufficientOrders: return "InsufficientOrders";
    case ErrorKind::NearSingularFilterPowerSum: return "NearSingularFilterPowerSum";
    case ErrorKind::SingularHankel: return "SingularHankel";
    case ErrorKind::UnsupportedOrder: return "UnsupportedOrder";
    case ErrorKind::RepeatedRoots: return "RepeatedRoots";
    case ErrorKind::DegreeMismatch: return "DegreeMismatch";
    case ErrorKind::AllPolesDiscarded: return "AllPolesDiscarded";
    case ErrorKind::ComplexPoleStructure: return "ComplexPoleStructure";
    case ErrorKind::PoleHit: return "PoleHit";
    case ErrorKind::WrongPath: return "WrongPath";
    case ErrorKind::WrongForm: return "WrongForm";
    case ErrorKind::NonDecayingLT: return "NonDecayingLT";
    case ErrorKind::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorKind::UnstableModel: return "UnstableModel";
    case ErrorKind::TruncationCapExceeded: return "TruncationCapExceeded";
    case ErrorKind::SingularCumulantSystem: return "SingularCumulantSystem";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::InsufficientGrid: return "InsufficientGrid";
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::PipelineError: return "PipelineError";
  }
  return "Unknown";
}

namespace {

std::mutex& sink_mutex() {
  static std::mutex m;
  return m;
}

WarningSink& current_sink() {
  static WarningSink sink;
  return sink;
}

}  // namespace

WarningSink set_warning_sink(WarningSink sink) {
  std::lock_guard lock(sink_mutex());
  return std::exchange(current_sink(), std::move(sink));
}

void warn(std::string_view message) {
  std::lock_guard lock(sink_mutex());
  if (current_sink()) {
    current_sink()(message);
  } else {
    std::cerr << "warning: " << message << '\n';
  }
}

WarningCapture::WarningCapture() {
  previous_ = set_warning_sink(
      [this](std::string_view m) { messages_.emplace_back(m); });
}

WarningCapture::~WarningCapture() { set_warning_sink(std::move(previous_)); }

}  // namespace clutter

namespace clutter {

int thread_cap_from_env() {
  const char* value = std::getenv("CLUTTER_FORGE_THREADS");
  if (value == nullptr) return 0;
  char* end = nullptr;
  const long n = std::strtol(value, &end, 10);
  if (end == value || *end != '\0' || n < 1 || n > 4096) return 0;
  return static_cast<int>(n);
}

void configure_threads() {
#ifdef CLUTTER_FORGE_HAVE_OPENMP
  if (const int cap = thread_cap_from_env(); cap > 0) omp_set_num_threads(cap);
#endif
}

}  // namespace clutter
