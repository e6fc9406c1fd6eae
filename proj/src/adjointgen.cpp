#include "sl/adjointgen.hpp"

#include <algorithm>
#include <cctype>

#include "sl/activity.hpp"
#include "sl/emitter.hpp"

namespace sl {

using namespace target;

namespace {

constexpr const char* kZero = "0.0";

Stmt reset(ExprPtr adjoint) { return assign(std::move(adjoint), number(kZero)); }

/// `a = a + rhs`
Stmt increment(const ExprPtr& adjoint, ExprPtr rhs) { return assign(adjoint, binary('+', adjoint, std::move(rhs))); }
/// `a = a - rhs`
Stmt decrement(const ExprPtr& adjoint, ExprPtr rhs) { return assign(adjoint, binary('-', adjoint, std::move(rhs))); }

bool contains(const std::vector<std::string>& v, std::string_view id) {
  return std::find(v.begin(), v.end(), id) != v.end();
}

std::string omitted(const std::string& what, PragmaKind kind) {
  return what + " omitted due to #pragma " + std::string(pragma_name(kind));
}

void clear_pragmas(SubprogramCtx& ctx) { ctx.pragma_flags = {}; }

CompileError semantic(std::string msg, int line) { return CompileError(ErrorCode::Semantic, std::move(msg), line); }

}  // namespace

bool is_reserved_name(std::string_view id) {
  if (id == "v" || id.starts_with("a_")) return true;
  if (id.size() > 1 && id[0] == 'C' &&
      std::all_of(id.begin() + 1, id.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
    return true;
  return false;
}

bool SubprogramCtx::is_param(std::string_view id) const { return contains(params, id); }

bool SubprogramCtx::is_scalar_local(std::string_view id) const {
  return contains(active_scalar_locals, id) || contains(passive_scalar_locals, id);
}

bool SubprogramCtx::is_defined(std::string_view id) const {
  return is_param(id) || is_scalar_local(id) || is_vector_local(id) || is_loop_var(id);
}

SynthAttr synth_leaf(LeafKind kind, ExprPtr primal, bool varied, SubprogramCtx& ctx) {
  SynthAttr out;
  out.j = ctx.next_sac();
  out.v = kind != LeafKind::Literal && varied;
  out.s.push_back(assign(sac(out.j), primal));
  if (out.v) {
    out.a.push_back(increment(adjoint_of(primal), sac_adjoint(out.j)));
    out.a.push_back(reset(sac_adjoint(out.j)));
  }
  out.expr = std::move(primal);
  return out;
}

SynthAttr synth_binary(char op, SynthAttr lhs, SynthAttr rhs, SubprogramCtx& ctx) {
  SynthAttr out;
  out.j = ctx.next_sac();
  out.v = propagate_variedness({lhs.v, rhs.v});
  out.expr = binary(op, lhs.expr, rhs.expr);
  out.s = concat({&lhs.s, &rhs.s});
  out.s.push_back(assign(sac(out.j), binary(op, sac(lhs.j), sac(rhs.j))));
  if (!out.v) return out;

  const auto self = sac_adjoint(out.j);
  const auto l = sac_adjoint(lhs.j);
  const auto r = sac_adjoint(rhs.j);
  switch (op) {
    case '+':
      if (lhs.v) out.a.push_back(increment(l, self));
      if (rhs.v) out.a.push_back(increment(r, self));
      break;
    case '-':
      if (lhs.v) out.a.push_back(increment(l, self));
      if (rhs.v) out.a.push_back(decrement(r, self));
      break;
    case '*':
      if (lhs.v) out.a.push_back(increment(l, binary('*', sac(rhs.j), self)));
      if (rhs.v) out.a.push_back(increment(r, binary('*', sac(lhs.j), self)));
      break;
    case '/':
      if (lhs.v) out.a.push_back(increment(l, binary('/', self, sac(rhs.j))));
      if (rhs.v)
        out.a.push_back(
            decrement(r, binary('*', binary('/', sac(lhs.j), binary('*', sac(rhs.j), sac(rhs.j))), self)));
      break;
    default: break;
  }
  out.a.push_back(reset(self));
  append(out.a, rhs.a);
  append(out.a, lhs.a);
  return out;
}

SynthAttr synth_negate(SynthAttr operand, SubprogramCtx& ctx) {
  auto primal = negate(operand.expr);
  SynthAttr zero = synth_leaf(LeafKind::Literal, number(kZero), false, ctx);
  SynthAttr out = synth_binary('-', std::move(zero), std::move(operand), ctx);
  out.expr = std::move(primal);
  return out;
}

SynthAttr synth_intrinsic(std::string_view name, SynthAttr arg, SubprogramCtx& ctx, int line) {
  if (name != "exp" && name != "gt0") throw semantic("unknown intrinsic '" + std::string(name) + "'", line);
  const std::string fn(name);
  SynthAttr out;
  out.j = ctx.next_sac();
  out.v = arg.v;
  out.expr = call(fn, {arg.expr});
  out.s = std::move(arg.s);
  out.s.push_back(assign(sac(out.j), call(fn, {sac(arg.j)})));
  if (!out.v) return out;
  out.a.push_back(increment(sac_adjoint(arg.j), binary('*', call("d_" + fn, {sac(arg.j)}), sac_adjoint(out.j))));
  out.a.push_back(reset(sac_adjoint(out.j)));
  append(out.a, arg.a);
  return out;
}

SynthAttr synth_assignment(SynthAttr lhs, SynthAttr rhs, SubprogramCtx& ctx, int line) {
  const std::string& base = base_name(*lhs.expr);
  const bool lhs_active = is_active(base);
  check_assignment_activity(lhs_active, rhs.v, line);

  const bool scalar = std::holds_alternative<Name>(lhs.expr->node);
  if (scalar && !ctx.is_param(base) && !ctx.is_scalar_local(base))
    (lhs_active ? ctx.active_scalar_locals : ctx.passive_scalar_locals).push_back(base);

  SynthAttr out;
  out.v = rhs.v;
  out.expr = lhs.expr;
  Stmt primal = assign(lhs.expr, rhs.expr);
  out.p.push_back(primal);

  const auto flags = ctx.pragma_flags;
  clear_pragmas(ctx);
  const auto push = call("push_s", {lhs.expr});
  if (flags.noprimal) {
    out.f.push_back(comment(omitted(stmt_text(primal), PragmaKind::NoPrimal)));
  } else {
    if (flags.notbr) {
      // indexed elements are reported with the vector-level shorthand
      std::string what = scalar ? expr_text(push) : "push_v(" + base + ")";
      out.f.push_back(comment(omitted(what, PragmaKind::NoTbr)));
      std::string back = scalar ? base + "=pop_s()" : base + "=pop_v()";
      out.a.push_back(comment(omitted(back, PragmaKind::NoTbr)));
    } else {
      out.f.push_back(eval(push));
      out.a.push_back(assign(lhs.expr, call("pop_s")));
    }
    out.f.push_back(primal);
  }

  if (!lhs_active) return out;
  const auto a_lhs = adjoint_of(lhs.expr);
  if (rhs.v) {
    ctx.max_sac = std::max(ctx.max_sac, ctx.sac_counter);
    append(out.a, rhs.s);
    out.a.push_back(increment(sac_adjoint(rhs.j), a_lhs));
    out.a.push_back(reset(a_lhs));
    append(out.a, rhs.a);
  } else {
    // overwritten by a passive value: its adjoint is killed
    out.a.push_back(reset(a_lhs));
  }
  return out;
}

SynthAttr synth_alloc(const std::string& name, ExprPtr fill, const SynthAttr& length, SubprogramCtx& ctx, int line) {
  check_index_passive(length.v, line);
  if (ctx.is_defined(name)) throw semantic("re-allocation of '" + name + "'", line);
  if (ctx.block_depth > 0) throw semantic("allocation of '" + name + "' inside a block", line);
  ctx.vector_locals.insert(name);

  SynthAttr out;
  out.expr = index(name, length.expr);
  Stmt primal = assign(target::name(name), alloc(std::move(fill), length.expr));
  out.p.push_back(primal);
  out.f.push_back(primal);
  if (is_active(name)) out.f.push_back(assign(target::name("a_" + name), alloc(number(kZero), length.expr)));
  return out;
}

SynthAttr synth_if(SynthAttr cond, SynthAttr then_stmts, SynthAttr else_stmts, int line) {
  check_condition_passive(cond.v, line);
  SynthAttr out;
  out.p.push_back(Stmt{If{cond.expr, std::move(then_stmts.p), std::move(else_stmts.p)}});

  Block then_f = std::move(then_stmts.f);
  then_f.push_back(eval(call("push_c", {integer(1)})));
  Block else_f = std::move(else_stmts.f);
  else_f.push_back(eval(call("push_c", {integer(0)})));
  out.f.push_back(Stmt{If{cond.expr, std::move(then_f), std::move(else_f)}});

  auto flag = compare(CmpOp::Equal, call("pop_c"), integer(1));
  out.a.push_back(Stmt{If{std::move(flag), std::move(then_stmts.a), std::move(else_stmts.a)}});
  return out;
}

SynthAttr synth_while(SynthAttr cond, SynthAttr body, SubprogramCtx& ctx, int line) {
  check_condition_passive(cond.v, line);
  const std::string counter = "C" + std::to_string(ctx.control_counter_seq++);
  const auto c = name(counter);

  SynthAttr out;
  out.p.push_back(Stmt{While{cond.expr, std::move(body.p)}});

  Block loop = std::move(body.f);
  loop.push_back(assign(c, binary('+', c, integer(1))));
  out.f.push_back(assign(c, integer(0)));
  out.f.push_back(Stmt{While{cond.expr, std::move(loop)}});
  out.f.push_back(eval(call("push_c", {c})));

  out.a.push_back(Stmt{For{counter, call("pop_c"), false, std::move(body.a)}});
  return out;
}

SynthAttr synth_for(const std::string& var, const SynthAttr& bound, SynthAttr body, int line) {
  if (is_active(var))
    throw CompileError(ErrorCode::ActiveLoopVariable, "active loop variable '" + var + "'", line);
  check_index_passive(bound.v, line);
  SynthAttr out;
  out.p.push_back(Stmt{For{var, bound.expr, false, std::move(body.p)}});
  out.f.push_back(Stmt{For{var, bound.expr, false, std::move(body.f)}});
  out.a.push_back(Stmt{For{var, bound.expr, true, std::move(body.a)}});
  return out;
}

SynthAttr synth_call(const std::string& result, const std::string& callee, const CalleeSignature& signature,
                     const std::vector<std::string>& args, SubprogramCtx& ctx, int line) {
  if (args.size() != signature.params.size())
    throw semantic("'" + callee + "' expects " + std::to_string(signature.params.size()) + " arguments, got " +
                       std::to_string(args.size()),
                   line);
  bool any_active = false;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (is_active(args[i]) != is_active(signature.params[i]))
      throw semantic("activity of argument '" + args[i] + "' does not match parameter '" + signature.params[i] +
                         "' of '" + callee + "'",
                     line);
    any_active = any_active || is_active(args[i]);
  }
  if (!any_active) throw semantic("call to '" + callee + "' has no active argument", line);
  if (signature.result_index >= args.size() || args[signature.result_index] != result)
    throw semantic("result of '" + callee + "' must be assigned to the argument it returns", line);
  check_assignment_activity(is_active(result), any_active, line);

  std::vector<ExprPtr> primal_args;
  std::vector<ExprPtr> adjoint_args;
  std::string first_active;
  for (const auto& a : args) {
    primal_args.push_back(name(a));
    adjoint_args.push_back(name(a));
    if (is_active(a)) {
      adjoint_args.push_back(name("a_" + a));
      if (first_active.empty()) first_active = a;
    }
  }

  SynthAttr out;
  out.v = true;
  out.expr = name(result);
  Stmt primal = assign(name(result), call(callee, std::move(primal_args)));
  out.p.push_back(primal);

  const auto flags = ctx.pragma_flags;
  clear_pragmas(ctx);
  if (flags.noprimal) {
    out.f.push_back(comment(omitted(stmt_text(primal), PragmaKind::NoPrimal)));
  } else {
    const auto push = call("push_v", {name(result)});
    if (flags.notbr) {
      out.f.push_back(comment(omitted(expr_text(push), PragmaKind::NoTbr)));
      out.a.push_back(comment(omitted(result + "=pop_v()", PragmaKind::NoTbr)));
    } else {
      out.f.push_back(eval(push));
      out.a.push_back(assign(name(result), call("pop_v")));
    }
    out.f.push_back(primal);
  }
  out.a.push_back(assign(name("a_" + first_active), call("a_" + callee, std::move(adjoint_args))));
  return out;
}

SynthAttr synth_sequence(SynthAttr list, SynthAttr stmt) {
  append(list.p, stmt.p);
  append(list.f, stmt.f);
  append(stmt.a, list.a);
  list.a = std::move(stmt.a);
  return list;
}

SubprogramPair synth_subprogram(const SubprogramCtx& ctx, const SynthAttr& body, const std::string& result, int line) {
  if (!ctx.is_param(result) && !ctx.is_scalar_local(result) && !ctx.is_vector_local(result))
    throw semantic("'" + result + "' returned by '" + ctx.name + "' is not defined", line);

  SubprogramPair out;
  out.primal.name = ctx.name;
  out.primal.params = ctx.params;
  out.primal.kind = SubprogramKind::Primal;
  out.primal.forward = body.p;
  out.primal.result = result;

  std::string first_active;
  auto& adj = out.adjoint;
  adj.name = "a_" + ctx.name;
  adj.kind = SubprogramKind::Adjoint;
  for (const auto& p : ctx.params) {
    adj.params.push_back(p);
    if (is_active(p)) {
      adj.params.push_back("a_" + p);
      if (first_active.empty()) first_active = p;
    }
  }
  if (first_active.empty()) throw semantic("subprogram '" + ctx.name + "' has no active parameter", line);

  if (ctx.max_sac > 0) {
    adj.header.push_back(assign(name("v"), alloc(number(kZero), integer(ctx.max_sac))));
    adj.header.push_back(assign(name("a_v"), alloc(number(kZero), integer(ctx.max_sac))));
  }
  for (const auto& local : ctx.active_scalar_locals) {
    adj.header.push_back(assign(name(local), number(kZero)));
    adj.header.push_back(assign(name("a_" + local), number(kZero)));
  }
  for (const auto& local : ctx.passive_scalar_locals) adj.header.push_back(assign(name(local), number(kZero)));
  adj.forward = body.f;
  adj.reverse = body.a;
  adj.result = "a_" + first_active;
  return out;
}

void consume_pragma(PragmaKind kind, SubprogramCtx& ctx, int line) {
  if (!ctx.honor_pragmas) return;
  bool& flag = kind == PragmaKind::NoPrimal ? ctx.pragma_flags.noprimal : ctx.pragma_flags.notbr;
  if (flag && ctx.warnings)
    ctx.warnings->push_back({"repeated #pragma " + std::string(pragma_name(kind)) + " before one statement", line});
  flag = true;
}

// ---------------------------------------------------------------------------
// AdjointSynthesizer

AdjointSynthesizer::AdjointSynthesizer(SignatureTable externals, bool honor_pragmas)
    : externals_(std::move(externals)), honor_pragmas_(honor_pragmas) {}

SubprogramCtx& AdjointSynthesizer::ctx() { return *ctx_; }

void AdjointSynthesizer::require_defined(const Token& name) {
  if (!ctx().is_defined(name.lexeme)) throw semantic("undefined name '" + name.lexeme + "'", name.line);
}

void AdjointSynthesizer::begin_subprogram(const Token& name, const std::vector<Token>& params) {
  if (is_reserved_name(name.lexeme)) throw semantic("reserved subprogram name '" + name.lexeme + "'", name.line);
  if (externals_.contains(name.lexeme))
    throw semantic("subprogram '" + name.lexeme + "' shadows an external", name.line);
  SubprogramCtx c;
  c.name = name.lexeme;
  for (const auto& p : params) {
    if (is_reserved_name(p.lexeme)) throw semantic("reserved parameter name '" + p.lexeme + "'", p.line);
    if (c.is_param(p.lexeme)) throw semantic("duplicate parameter '" + p.lexeme + "'", p.line);
    c.params.push_back(p.lexeme);
  }
  c.honor_pragmas = honor_pragmas_;
  c.warnings = &warnings_;
  ctx_ = std::move(c);
}

SynthAttr AdjointSynthesizer::subprogram(const Token& name, const std::vector<Token>&, Attr body,
                                         const Token& result) {
  auto& c = ctx();
  if (c.pragma_flags.noprimal || c.pragma_flags.notbr)
    warnings_.push_back({"pragma at end of '" + c.name + "' applies to no statement", result.line});
  auto pair = synth_subprogram(c, body, result.lexeme, name.line);
  auto pos = std::find(c.params.begin(), c.params.end(), result.lexeme);
  if (pos != c.params.end())
    internals_[c.name] = CalleeSignature{c.params, static_cast<std::size_t>(pos - c.params.begin())};
  subprograms_.push_back(std::move(pair.primal));
  subprograms_.push_back(std::move(pair.adjoint));
  ctx_.reset();
  return body;
}

SynthAttr AdjointSynthesizer::statements_empty() { return {}; }

SynthAttr AdjointSynthesizer::statements_append(Attr list, Attr stmt) {
  return synth_sequence(std::move(list), std::move(stmt));
}

SynthAttr AdjointSynthesizer::pragma(const Token& pragma) {
  auto kind = pragma_kind(pragma);
  consume_pragma(kind, ctx(), pragma.line);
  SynthAttr out;
  out.p.push_back(Stmt{Pragma{kind}});
  return out;
}

SynthAttr AdjointSynthesizer::lvalue_name(const Token& name) {
  auto& c = ctx();
  if (is_reserved_name(name.lexeme)) throw semantic("reserved name '" + name.lexeme + "'", name.line);
  if (c.is_vector_local(name.lexeme))
    throw semantic("vector '" + name.lexeme + "' assigned a scalar value", name.line);
  if (c.is_loop_var(name.lexeme)) throw semantic("assignment to loop variable '" + name.lexeme + "'", name.line);
  SynthAttr out;
  out.expr = target::name(name.lexeme);
  out.v = is_active(name.lexeme);
  return out;
}

SynthAttr AdjointSynthesizer::lvalue_indexed(const Token& name, Attr index) {
  auto& c = ctx();
  check_index_passive(index.v, name.line);
  require_defined(name);
  if (c.is_scalar_local(name.lexeme) || c.is_loop_var(name.lexeme))
    throw semantic("scalar '" + name.lexeme + "' is indexed", name.line);
  SynthAttr out;
  out.expr = target::index(name.lexeme, index.expr);
  out.v = is_active(name.lexeme);
  return out;
}

void AdjointSynthesizer::begin_rhs() { ctx().sac_counter = 0; }

SynthAttr AdjointSynthesizer::assignment(Attr lhs, Attr rhs, int line) {
  return synth_assignment(std::move(lhs), std::move(rhs), ctx(), line);
}

SynthAttr AdjointSynthesizer::allocation(const Token& name, const Token& fill, Attr length, int line) {
  if (is_reserved_name(name.lexeme)) throw semantic("reserved name '" + name.lexeme + "'", line);
  return synth_alloc(name.lexeme, number(fill.lexeme), length, ctx(), line);
}

SynthAttr AdjointSynthesizer::call(const Token& result, const Token& callee, const std::vector<Token>& args,
                                   int line) {
  auto& c = ctx();
  const CalleeSignature* sig = nullptr;
  if (auto it = internals_.find(callee.lexeme); it != internals_.end()) sig = &it->second;
  if (auto it = externals_.find(callee.lexeme); it != externals_.end()) sig = &it->second;
  if (!sig) {
    bool known = std::any_of(subprograms_.begin(), subprograms_.end(),
                             [&](const auto& s) { return s.name == callee.lexeme; });
    throw semantic(known ? "'" + callee.lexeme + "' does not return one of its parameters and cannot be called"
                         : "unknown subprogram '" + callee.lexeme + "'",
                   line);
  }
  std::vector<std::string> names;
  for (const auto& a : args) {
    require_defined(a);
    if (is_active(a.lexeme) && c.is_scalar_local(a.lexeme))
      throw semantic("active argument '" + a.lexeme + "' must be a vector", a.line);
    names.push_back(a.lexeme);
  }
  return synth_call(result.lexeme, callee.lexeme, *sig, names, c, line);
}

void AdjointSynthesizer::enter_block() { ++ctx().block_depth; }
void AdjointSynthesizer::leave_block() { --ctx().block_depth; }

void AdjointSynthesizer::begin_loop_body(const Token& var) {
  auto& c = ctx();
  if (is_active(var.lexeme))
    throw CompileError(ErrorCode::ActiveLoopVariable, "active loop variable '" + var.lexeme + "'", var.line);
  if (is_reserved_name(var.lexeme)) throw semantic("reserved name '" + var.lexeme + "'", var.line);
  if (!c.is_loop_var(var.lexeme) && c.is_defined(var.lexeme))
    throw semantic("loop variable '" + var.lexeme + "' is already defined", var.line);
  c.loop_vars.insert(var.lexeme);
}

SynthAttr AdjointSynthesizer::if_statement(Attr cond, Attr then_body, Attr else_body, int line) {
  return synth_if(std::move(cond), std::move(then_body), std::move(else_body), line);
}

SynthAttr AdjointSynthesizer::while_statement(Attr cond, Attr body, int line) {
  return synth_while(std::move(cond), std::move(body), ctx(), line);
}

SynthAttr AdjointSynthesizer::for_statement(const Token& var, Attr bound, Attr body, int line) {
  return synth_for(var.lexeme, bound, std::move(body), line);
}

SynthAttr AdjointSynthesizer::condition(Attr lhs, CmpOp op, Attr rhs, int) {
  SynthAttr out;
  out.expr = compare(op, lhs.expr, rhs.expr);
  out.v = propagate_variedness({lhs.v, rhs.v});
  return out;
}

SynthAttr AdjointSynthesizer::literal(const Token& number, ExprContext ectx) {
  auto expr = target::number(number.lexeme);
  if (ectx == ExprContext::Rhs) return synth_leaf(LeafKind::Literal, std::move(expr), false, ctx());
  SynthAttr out;
  out.expr = std::move(expr);
  return out;
}

SynthAttr AdjointSynthesizer::variable(const Token& name, ExprContext ectx) {
  require_defined(name);
  if (ctx().is_vector_local(name.lexeme))
    throw semantic("vector '" + name.lexeme + "' used as a scalar", name.line);
  auto expr = target::name(name.lexeme);
  const bool varied = is_active(name.lexeme);
  if (ectx == ExprContext::Rhs) return synth_leaf(LeafKind::Variable, std::move(expr), varied, ctx());
  SynthAttr out;
  out.expr = std::move(expr);
  out.v = varied;
  return out;
}

SynthAttr AdjointSynthesizer::indexed(const Token& name, Attr index, ExprContext ectx) {
  check_index_passive(index.v, name.line);
  require_defined(name);
  if (ctx().is_scalar_local(name.lexeme) || ctx().is_loop_var(name.lexeme))
    throw semantic("scalar '" + name.lexeme + "' is indexed", name.line);
  auto expr = target::index(name.lexeme, index.expr);
  const bool varied = is_active(name.lexeme);
  if (ectx == ExprContext::Rhs) return synth_leaf(LeafKind::Indexed, std::move(expr), varied, ctx());
  SynthAttr out;
  out.expr = std::move(expr);
  out.v = varied;
  return out;
}

SynthAttr AdjointSynthesizer::negate(Attr operand, ExprContext ectx, int) {
  if (ectx == ExprContext::Rhs) return synth_negate(std::move(operand), ctx());
  operand.expr = target::negate(operand.expr);
  return operand;
}

SynthAttr AdjointSynthesizer::binary(char op, Attr lhs, Attr rhs, ExprContext ectx, int) {
  if (ectx == ExprContext::Rhs) return synth_binary(op, std::move(lhs), std::move(rhs), ctx());
  SynthAttr out;
  out.expr = target::binary(op, lhs.expr, rhs.expr);
  out.v = propagate_variedness({lhs.v, rhs.v});
  return out;
}

SynthAttr AdjointSynthesizer::intrinsic(const Token& fn, Attr arg, ExprContext ectx, int line) {
  if (ectx == ExprContext::Rhs) return synth_intrinsic(fn.lexeme, std::move(arg), ctx(), line);
  arg.expr = target::call(fn.lexeme, {arg.expr});
  return arg;
}

SynthAttr AdjointSynthesizer::parenthesized(Attr inner, ExprContext) { return inner; }

Program AdjointSynthesizer::take_program(std::vector<std::string> preamble) {
  Program program;
  program.preamble = std::move(preamble);
  program.subprograms = std::move(subprograms_);
  subprograms_.clear();
  return program;
}

}  // namespace sl
