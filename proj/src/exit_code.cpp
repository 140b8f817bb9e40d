#include "cijump/exit_code.hpp"

#include "cijump/jump.hpp"

namespace cijump {

ExitCode exit_code_for(std::exception_ptr error) {
  try {
    std::rethrow_exception(error);
  } catch (const JumpError& e) {
    switch (e.code()) {
      case JumpErrc::kExhausted:
        return ExitCode::kExhausted;
      case JumpErrc::kPrecondition:
        return ExitCode::kVerificationFailure;
      case JumpErrc::kInvalidInput:
        return ExitCode::kInputError;
    }
    return ExitCode::kInputError;
  } catch (...) {
    return ExitCode::kInputError;
  }
}

}  // namespace cijump
