#pragma once

#include <string_view>
#include <vector>

#include "sl/diagnostics.hpp"
#include "sl/externals.hpp"
#include "sl/target.hpp"

namespace sl {

struct CompileOptions {
  /// false ignores every `#pragma` (differential testing).
  bool honor_pragmas = true;
  const ExternalRegistry* externals = &ExternalRegistry::builtin();
};

struct CompileResult {
  /// Primal and adjoint subprograms, interleaved in source order.
  target::Program program;
  std::vector<Warning> warnings;
};

/// Tokenize, parse and synthesize in one pass. Throws CompileError.
CompileResult compile(std::string_view source, const CompileOptions& options = {});

}  // namespace sl
