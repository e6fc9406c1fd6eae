#pragma once

// Single-pass adjoint synthesis. Each construct synthesizes its primal (p),
// forward-section (f), SAC (s) and adjoint (a) statements plus variedness (v)
// and SAC index (j) from its children's attributes.
//
// Naming: SAC slot k is `v[k]` with adjoint `a_v[k]`; variable `x` has
// adjoint `a_x`; subprogram or external `f` has adjoint `a_f`.

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sl/diagnostics.hpp"
#include "sl/lexer.hpp"
#include "sl/parser.hpp"
#include "sl/target.hpp"

namespace sl {

struct SynthAttr {
  target::ExprPtr expr;  // expression, lvalue or condition
  target::Block p, f, s, a;
  bool v = false;
  int j = -1;
};

struct PragmaFlags {
  bool noprimal = false;
  bool notbr = false;
};

struct SubprogramCtx {
  std::string name;
  std::vector<std::string> params;
  int sac_counter = 0;
  int max_sac = 0;
  std::vector<std::string> active_scalar_locals;
  std::vector<std::string> passive_scalar_locals;
  std::set<std::string> vector_locals;
  std::set<std::string> loop_vars;
  PragmaFlags pragma_flags;
  int control_counter_seq = 0;
  int block_depth = 0;
  bool honor_pragmas = true;
  std::vector<Warning>* warnings = nullptr;

  bool is_param(std::string_view id) const;
  bool is_scalar_local(std::string_view id) const;
  bool is_vector_local(std::string_view id) const { return vector_locals.contains(std::string(id)); }
  bool is_loop_var(std::string_view id) const { return loop_vars.contains(std::string(id)); }
  bool is_defined(std::string_view id) const;
  int next_sac() { return sac_counter++; }
};

/// Parameter names (their case gives the activity pattern) and the position
/// of the parameter the callee returns.
struct CalleeSignature {
  std::vector<std::string> params;
  std::size_t result_index = 0;
};

using SignatureTable = std::map<std::string, CalleeSignature, std::less<>>;

enum class LeafKind { Variable, Indexed, Literal };

SynthAttr synth_leaf(LeafKind kind, target::ExprPtr primal, bool varied, SubprogramCtx& ctx);
SynthAttr synth_binary(char op, SynthAttr lhs, SynthAttr rhs, SubprogramCtx& ctx);
/// `-e` is decomposed as `0.0 - e`.
SynthAttr synth_negate(SynthAttr operand, SubprogramCtx& ctx);
SynthAttr synth_intrinsic(std::string_view name, SynthAttr arg, SubprogramCtx& ctx, int line);
SynthAttr synth_assignment(SynthAttr lhs, SynthAttr rhs, SubprogramCtx& ctx, int line);
SynthAttr synth_alloc(const std::string& name, target::ExprPtr fill, const SynthAttr& length, SubprogramCtx& ctx,
                      int line);
SynthAttr synth_if(SynthAttr cond, SynthAttr then_stmts, SynthAttr else_stmts, int line);
SynthAttr synth_while(SynthAttr cond, SynthAttr body, SubprogramCtx& ctx, int line);
SynthAttr synth_for(const std::string& var, const SynthAttr& bound, SynthAttr body, int line);
SynthAttr synth_call(const std::string& result, const std::string& callee, const CalleeSignature& signature,
                     const std::vector<std::string>& args, SubprogramCtx& ctx, int line);
/// Statement list `list; stmt`: forward in order, adjoint reversed.
SynthAttr synth_sequence(SynthAttr list, SynthAttr stmt);

struct SubprogramPair {
  target::Subprogram primal;
  target::Subprogram adjoint;
};
SubprogramPair synth_subprogram(const SubprogramCtx& ctx, const SynthAttr& body, const std::string& result, int line);

void consume_pragma(PragmaKind kind, SubprogramCtx& ctx, int line);

/// Parser sink that runs the synthesis rules above and collects the primal
/// and adjoint subprograms of a script.
class AdjointSynthesizer {
 public:
  using Attr = SynthAttr;

  explicit AdjointSynthesizer(SignatureTable externals = {}, bool honor_pragmas = true);

  void begin_subprogram(const Token& name, const std::vector<Token>& params);
  Attr subprogram(const Token& name, const std::vector<Token>& params, Attr body, const Token& result);
  Attr statements_empty();
  Attr statements_append(Attr list, Attr stmt);
  Attr pragma(const Token& pragma);
  Attr lvalue_name(const Token& name);
  Attr lvalue_indexed(const Token& name, Attr index);
  void begin_rhs();
  Attr assignment(Attr lhs, Attr rhs, int line);
  Attr allocation(const Token& name, const Token& fill, Attr length, int line);
  Attr call(const Token& result, const Token& callee, const std::vector<Token>& args, int line);
  void enter_block();
  void leave_block();
  void begin_loop_body(const Token& var);
  Attr if_statement(Attr cond, Attr then_body, Attr else_body, int line);
  Attr while_statement(Attr cond, Attr body, int line);
  Attr for_statement(const Token& var, Attr bound, Attr body, int line);
  Attr condition(Attr lhs, target::CmpOp op, Attr rhs, int line);
  Attr literal(const Token& number, ExprContext ctx);
  Attr variable(const Token& name, ExprContext ctx);
  Attr indexed(const Token& name, Attr index, ExprContext ctx);
  Attr negate(Attr operand, ExprContext ctx, int line);
  Attr binary(char op, Attr lhs, Attr rhs, ExprContext ctx, int line);
  Attr intrinsic(const Token& fn, Attr arg, ExprContext ctx, int line);
  Attr parenthesized(Attr inner, ExprContext ctx);

  target::Program take_program(std::vector<std::string> preamble);
  const std::vector<Warning>& warnings() const { return warnings_; }

 private:
  SubprogramCtx& ctx();
  void require_defined(const Token& name);

  SignatureTable externals_;
  SignatureTable internals_;
  bool honor_pragmas_;
  std::optional<SubprogramCtx> ctx_;
  std::vector<target::Subprogram> subprograms_;
  std::vector<Warning> warnings_;
};

/// Identifiers the generator reserves for itself: `v`, `a_*`, `C<digits>`.
bool is_reserved_name(std::string_view id);

}  // namespace sl
