#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace lanewatch {

enum class ErrorKind {
  kInvalidInput,
  kInvalidConfig,
  kGeometry,
  kParse,
  kFormat,
  kSchema,
  kIo,
};

std::string_view to_string(ErrorKind kind);

// All library failures surface as this exception. what() is prefixed with the
// originating module, e.g. "imaging: kernel_size must be odd".
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string module, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& module() const noexcept { return module_; }
  // Message without the module/kind prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorKind kind_;
  std::string module_;
  std::string detail_;
};

}  // namespace lanewatch
