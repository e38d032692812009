#pragma once

#include <functional>
#include <string>

namespace scm {

using WarningHandler = std::function<void(const std::string&)>;

/// Installs a process-wide handler for warn-level diagnostics and returns the
/// previous one. Passing an empty handler restores the default (stderr).
WarningHandler set_warning_handler(WarningHandler handler);

void warn(const std::string& message);

}  // namespace scm
