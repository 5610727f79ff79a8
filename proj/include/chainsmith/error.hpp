#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace chainsmith {

// Exit-code classes used by the command line tool:
//   DomainError        -> 1 (bad input, parse/validation failure)
//   BudgetExhausted    -> 2
//   VerificationError  -> 3 (an internal cross-check failed)

class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public DomainError {
 public:
  ParseError(std::size_t line, const std::string& what)
      : DomainError("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class BudgetExhausted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class VerificationError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace chainsmith
