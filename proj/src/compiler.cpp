#include "sl/compiler.hpp"

#include "sl/adjointgen.hpp"
#include "sl/lexer.hpp"
#include "sl/parser.hpp"

namespace sl {

CompileResult compile(std::string_view source, const CompileOptions& options) {
  const auto tokens = tokenize(source, options.externals->names());
  AdjointSynthesizer sink(options.externals->signatures(), options.honor_pragmas);
  auto script = parse(tokens, sink);
  CompileResult out;
  out.program = sink.take_program(std::move(script.preamble));
  out.warnings = sink.warnings();
  return out;
}

}  // namespace sl
