#pragma once

#include <string_view>

#include "sl/target.hpp"

namespace sl {

/// Parses emitted indentation-delimited text back into a Program. Adjoint
/// text (with section banners) yields adjoint subprograms, anything else
/// primal ones. Throws CompileError(Syntax) on malformed input.
target::Program read_target(std::string_view text);

}  // namespace sl
