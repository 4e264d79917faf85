#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace clutter {

using WarningSink = std::function<void(std::string_view)>;

/// Installs a process-wide sink for library warnings and returns the previous
/// one. Passing an empty function restores the default (stderr).
WarningSink set_warning_sink(WarningSink sink);

void warn(std::string_view message);

/// RAII capture of warnings, mostly for tests and the CLI sidecar.
class WarningCapture {
 public:
  WarningCapture();
  ~WarningCapture();
  WarningCapture(const WarningCapture&) = delete;
  WarningCapture& operator=(const WarningCapture&) = delete;

  const std::vector<std::string>& messages() const { return messages_; }

 private:
  std::vector<std::string> messages_;
  WarningSink previous_;
};

}  // namespace clutter
