#pragma once

#include <string>

#include "sl/target.hpp"

namespace sl {

enum class EmitMode {
  Primal,   // indentation-delimited primal subprograms
  Adjoint,  // indentation-delimited adjoint subprograms with section banners
  Source,   // primal subprograms in brace-delimited SL syntax
};

std::string expr_text(const target::Expr& expr);
inline std::string expr_text(const target::ExprPtr& expr) { return expr_text(*expr); }

/// Formats a statement at the given nesting depth (2 spaces per level).
/// Compound statements span several lines joined by '\n'; no trailing newline.
std::string format_stmt(const target::Stmt& stmt, int depth, EmitMode mode = EmitMode::Adjoint);

/// Single-line text of a simple statement without indentation.
std::string stmt_text(const target::Stmt& stmt);

std::string emit(const target::Program& program, EmitMode mode);

inline constexpr const char* kForwardBanner = "# forward section";
inline constexpr const char* kReverseBanner = "# reverse section";

}  // namespace sl
