#include "sl/emitter.hpp"

#include <sstream>

namespace sl {

namespace {

using namespace target;

int precedence(const Expr& e) {
  if (auto* b = std::get_if<Binary>(&e.node)) return (b->op == '+' || b->op == '-') ? 1 : 2;
  if (std::holds_alternative<Negate>(e.node)) return 3;
  if (std::holds_alternative<Compare>(e.node)) return 0;
  if (std::holds_alternative<Alloc>(e.node)) return 2;
  return 4;
}

std::string wrapped(const Expr& e, bool parens) {
  return parens ? "(" + expr_text(e) + ")" : expr_text(e);
}

struct ExprPrinter {
  std::string operator()(const Number& n) const { return n.text; }
  std::string operator()(const Name& n) const { return n.id; }
  std::string operator()(const Index& ix) const { return ix.base + "[" + expr_text(*ix.index) + "]"; }
  std::string operator()(const Negate& n) const { return "-" + wrapped(*n.operand, precedence(*n.operand) < 3); }
  std::string operator()(const Binary& b) const {
    int p = b.op == '+' || b.op == '-' ? 1 : 2;
    return wrapped(*b.lhs, precedence(*b.lhs) < p) + b.op + wrapped(*b.rhs, precedence(*b.rhs) <= p);
  }
  std::string operator()(const Compare& c) const {
    return expr_text(*c.lhs) + std::string(cmp_text(c.op)) + expr_text(*c.rhs);
  }
  std::string operator()(const Call& c) const {
    std::string out = c.callee + "(";
    for (std::size_t i = 0; i < c.args.size(); ++i) {
      if (i) out += ',';
      out += expr_text(*c.args[i]);
    }
    return out + ")";
  }
  std::string operator()(const Alloc& a) const {
    return "[" + expr_text(*a.fill) + "]*" + wrapped(*a.length, precedence(*a.length) < 4);
  }
};

std::string indent(int depth) { return std::string(static_cast<std::size_t>(2 * depth), ' '); }

void format_block(std::ostringstream& out, const Block& body, int depth, EmitMode mode) {
  bool any = false;
  for (const auto& s : body) {
    out << '\n' << format_stmt(s, depth, mode);
    any = true;
  }
  if (!any && mode != EmitMode::Source) out << '\n' << indent(depth) << "pass";
}

std::string open_block(EmitMode mode) { return mode == EmitMode::Source ? " {" : " :"; }

void close_block(std::ostringstream& out, int depth, EmitMode mode) {
  if (mode == EmitMode::Source) out << '\n' << indent(depth) << "}";
}

}  // namespace

std::string expr_text(const Expr& expr) { return std::visit(ExprPrinter{}, expr.node); }

std::string stmt_text(const Stmt& stmt) { return format_stmt(stmt, 0); }

std::string format_stmt(const Stmt& stmt, int depth, EmitMode mode) {
  std::ostringstream out;
  out << indent(depth);
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Assign>) {
          out << expr_text(*s.target) << '=' << expr_text(*s.value);
        } else if constexpr (std::is_same_v<T, Eval>) {
          out << expr_text(*s.expr);
        } else if constexpr (std::is_same_v<T, If>) {
          out << "if " << expr_text(*s.cond) << open_block(mode);
          format_block(out, s.then_body, depth + 1, mode);
          if (mode == EmitMode::Source) {
            out << '\n' << indent(depth) << "} else {";
          } else {
            out << '\n' << indent(depth) << "else :";
          }
          format_block(out, s.else_body, depth + 1, mode);
          close_block(out, depth, mode);
        } else if constexpr (std::is_same_v<T, While>) {
          out << "while " << expr_text(*s.cond) << open_block(mode);
          format_block(out, s.body, depth + 1, mode);
          close_block(out, depth, mode);
        } else if constexpr (std::is_same_v<T, For>) {
          out << "for " << s.var << " in ";
          if (s.reversed)
            out << "reversed(range(" << expr_text(*s.bound) << ") )";
          else
            out << "range(" << expr_text(*s.bound) << ")";
          out << open_block(mode);
          format_block(out, s.body, depth + 1, mode);
          close_block(out, depth, mode);
        } else if constexpr (std::is_same_v<T, Comment>) {
          out << "# " << s.text;
        } else if constexpr (std::is_same_v<T, Pragma>) {
          out << "#pragma " << pragma_name(s.kind);
        }
      },
      stmt.node);
  return out.str();
}

std::string emit(const Program& program, EmitMode mode) {
  std::ostringstream out;
  for (const auto& line : program.preamble) out << line << '\n';
  const auto wanted = mode == EmitMode::Adjoint ? SubprogramKind::Adjoint : SubprogramKind::Primal;
  bool first = program.preamble.empty();
  for (const auto& sub : program.subprograms) {
    if (sub.kind != wanted) continue;
    if (!first) out << '\n';
    first = false;
    out << "def " << sub.name << '(';
    for (std::size_t i = 0; i < sub.params.size(); ++i) out << (i ? "," : "") << sub.params[i];
    out << ')' << open_block(mode) << '\n';
    auto body = [&](const Block& block) {
      for (const auto& s : block) out << format_stmt(s, 1, mode) << '\n';
    };
    if (mode == EmitMode::Adjoint) {
      body(sub.header);
      out << kForwardBanner << '\n';
      body(sub.forward);
      out << kReverseBanner << '\n';
      body(sub.reverse);
    } else {
      body(sub.forward);
    }
    out << indent(1) << "return " << sub.result << '\n';
    if (mode == EmitMode::Source) out << "}\n";
  }
  return out.str();
}

}  // namespace sl
