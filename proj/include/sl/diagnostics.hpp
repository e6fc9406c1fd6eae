#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace sl {

enum class ErrorCode {
  Lex,
  Syntax,
  ActiveBranch,
  ActiveToPassive,
  ActiveIndex,
  ActiveLoopVariable,
  Semantic,
};

/// Short stable code printed inside `error[...]`.
std::string_view code_name(ErrorCode code);

/// Compile-time rejection. `what()` is formatted as
/// `error[<code>]: <message> at line <n>`.
class CompileError : public std::runtime_error {
 public:
  CompileError(ErrorCode code, std::string message, int line);

  ErrorCode code() const { return code_; }
  const std::string& message() const { return message_; }
  int line() const { return line_; }

 private:
  ErrorCode code_;
  std::string message_;
  int line_;
};

/// Failure while executing a target program (tape underflow, unbound name,
/// index out of range, ...).
class RuntimeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Warning {
  std::string message;
  int line = 0;
};

std::string format_warning(const Warning& w);

}  // namespace sl
