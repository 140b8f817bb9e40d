#pragma once

#include <exception>

namespace cijump {

enum class ExitCode : int {
  kOk = 0,
  kVerificationFailure = 1,
  kInputError = 2,
  kExhausted = 3,
};

/// Exit code for an exception escaping a command. Search exhaustion maps to
/// kExhausted, unmet preconditions to kVerificationFailure, and every input
/// or format problem (including unknown exceptions) to kInputError.
ExitCode exit_code_for(std::exception_ptr error);

}  // namespace cijump
