#pragma once

// Process exit codes and the exception-to-code mapping used by the CLI.

#include <exception>
#include <ostream>

#include "chainsmith/error.hpp"

namespace chainsmith {

enum ExitCode : int {
  kExitOk = 0,
  kExitDomain = 1,        // bad input, parse or validation failure
  kExitBudget = 2,        // node/time budget or length cap exhausted
  kExitVerification = 3,  // internal self-check failed
};

/// Runs `body` (which returns an exit code) and maps escaping exceptions.
template <typename F>
int run_guarded(F&& body, std::ostream& err) {
  try {
    return body();
  } catch (const VerificationError& e) {
    err << "verification failure: " << e.what() << '\n';
    return kExitVerification;
  } catch (const BudgetExhausted& e) {
    err << "budget exhausted: " << e.what() << '\n';
    return kExitBudget;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kExitDomain;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitVerification;
  }
}

}  // namespace chainsmith
