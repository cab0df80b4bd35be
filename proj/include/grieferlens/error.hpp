#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace grieferlens {

enum class ErrorCode {
  malformed_input,
  schema_violation,
  invariant_violation,
  unknown_player,
  no_samples,
  bad_window,
  bad_time,
  out_of_bounds,
  missing_evidence_key,
  invalid_scenario,
  invalid_config,
  io_failure,
  not_found,
  conflict,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::malformed_input: return "MalformedInput";
    case ErrorCode::schema_violation: return "SchemaViolation";
    case ErrorCode::invariant_violation: return "InvariantViolation";
    case ErrorCode::unknown_player: return "UnknownPlayer";
    case ErrorCode::no_samples: return "NoSamples";
    case ErrorCode::bad_window: return "BadWindow";
    case ErrorCode::bad_time: return "BadTime";
    case ErrorCode::out_of_bounds: return "OutOfBounds";
    case ErrorCode::missing_evidence_key: return "MissingEvidenceKey";
    case ErrorCode::invalid_scenario: return "InvalidScenario";
    case ErrorCode::invalid_config: return "InvalidConfig";
    case ErrorCode::io_failure: return "IoFailure";
    case ErrorCode::not_found: return "NotFound";
    case ErrorCode::conflict: return "Conflict";
  }
  return "Unknown";
}

/// Every failure in the library surfaces as this exception. `path()` names the
/// offending document location or record (e.g. "position_samples[12].x") when
/// one exists.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string message, std::string path = {})
      : std::runtime_error(std::move(message)), code_(code), path_(std::move(path)) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& path() const noexcept { return path_; }

 private:
  ErrorCode code_;
  std::string path_;
};

}  // namespace grieferlens
