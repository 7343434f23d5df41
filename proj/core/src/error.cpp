#include "lanewatch/error.hpp"

namespace lanewatch {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidInput:
      return "invalid input";
    case ErrorKind::kInvalidConfig:
      return "invalid config";
    case ErrorKind::kGeometry:
      return "geometry error";
    case ErrorKind::kParse:
      return "parse error";
    case ErrorKind::kFormat:
      return "format error";
    case ErrorKind::kSchema:
      return "schema error";
    case ErrorKind::kIo:
      return "I/O error";
  }
  return "error";
}

Error::Error(ErrorKind kind, std::string module, const std::string& message)
    : std::runtime_error(module + ": " + std::string(to_string(kind)) + ": " +
                         message),
      kind_(kind),
      module_(std::move(module)),
      detail_(message) {}

}  // namespace lanewatch
