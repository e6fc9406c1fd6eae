#include "sl/diagnostics.hpp"

namespace sl {

std::string_view code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::Lex: return "E001";
    case ErrorCode::Syntax: return "E002";
    case ErrorCode::ActiveBranch: return "E101";
    case ErrorCode::ActiveToPassive: return "E102";
    case ErrorCode::ActiveIndex: return "E103";
    case ErrorCode::ActiveLoopVariable: return "E104";
    case ErrorCode::Semantic: return "E201";
  }
  return "E000";
}

namespace {
std::string format_error(ErrorCode code, const std::string& message, int line) {
  std::string out = "error[";
  out += code_name(code);
  out += "]: ";
  out += message;
  out += " at line ";
  out += std::to_string(line);
  return out;
}
}  // namespace

CompileError::CompileError(ErrorCode code, std::string message, int line)
    : std::runtime_error(format_error(code, message, line)),
      code_(code),
      message_(std::move(message)),
      line_(line) {}

std::string format_warning(const Warning& w) {
  return "warning: " + w.message + " at line " + std::to_string(w.line);
}

}  // namespace sl
