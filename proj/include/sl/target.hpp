#pragma once

// Structured form of emitted target scripts. The adjoint generator builds
// these nodes, the emitter prints them and the interpreter runs them.

#include <memory>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "sl/lexer.hpp"

namespace sl::target {

enum class CmpOp { Less, Greater, LessEqual, GreaterEqual, Equal, NotEqual };

std::string_view cmp_text(CmpOp op);

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Number {
  double value = 0.0;
  std::string text;
};
struct Name {
  std::string id;
};
struct Index {
  std::string base;
  ExprPtr index;
};
struct Negate {
  ExprPtr operand;
};
struct Binary {
  char op = '+';
  ExprPtr lhs, rhs;
};
struct Compare {
  CmpOp op = CmpOp::Less;
  ExprPtr lhs, rhs;
};
struct Call {
  std::string callee;
  std::vector<ExprPtr> args;
};
/// `[fill]*length`
struct Alloc {
  ExprPtr fill;
  ExprPtr length;
};

struct Expr {
  std::variant<Number, Name, Index, Negate, Binary, Compare, Call, Alloc> node;
};

bool operator==(const Expr& a, const Expr& b);
bool same(const ExprPtr& a, const ExprPtr& b);

ExprPtr number(std::string text);
ExprPtr integer(long value);
ExprPtr name(std::string id);
ExprPtr index(std::string base, ExprPtr idx);
ExprPtr index_at(std::string base, long idx);
ExprPtr negate(ExprPtr operand);
ExprPtr binary(char op, ExprPtr lhs, ExprPtr rhs);
ExprPtr compare(CmpOp op, ExprPtr lhs, ExprPtr rhs);
ExprPtr call(std::string callee, std::vector<ExprPtr> args = {});
ExprPtr alloc(ExprPtr fill, ExprPtr length);

/// SAC slot `v[k]` and its adjoint `a_v[k]`.
ExprPtr sac(int k);
ExprPtr sac_adjoint(int k);
/// Adjoint of a Name or Index: `x` -> `a_x`, `d[e]` -> `a_d[e]`.
ExprPtr adjoint_of(const ExprPtr& lvalue);
/// Base identifier of a Name or Index.
const std::string& base_name(const Expr& lvalue);

struct Stmt;
using Block = std::vector<Stmt>;

struct Assign {
  ExprPtr target;
  ExprPtr value;
};
/// Expression evaluated for its effect (`push_s(x)`).
struct Eval {
  ExprPtr expr;
};
struct If {
  ExprPtr cond;
  Block then_body, else_body;
};
struct While {
  ExprPtr cond;
  Block body;
};
/// `for var in range(bound)` or `for var in reversed(range(bound))`.
struct For {
  std::string var;
  ExprPtr bound;
  bool reversed = false;
  Block body;
};
/// Printed as `# <text>`.
struct Comment {
  std::string text;
};
struct Pragma {
  PragmaKind kind = PragmaKind::NoTbr;
};

struct Stmt {
  std::variant<Assign, Eval, If, While, For, Comment, Pragma> node;
};

bool operator==(const Stmt& a, const Stmt& b);

Stmt assign(ExprPtr target, ExprPtr value);
Stmt eval(ExprPtr expr);
Stmt comment(std::string text);

enum class SubprogramKind { Primal, Adjoint };

/// A primal subprogram keeps its statements in `forward`; an adjoint one has
/// all three sections.
struct Subprogram {
  std::string name;
  std::vector<std::string> params;
  SubprogramKind kind = SubprogramKind::Primal;
  Block header;
  Block forward;
  Block reverse;
  std::string result;

  bool operator==(const Subprogram&) const = default;
};

struct Program {
  std::vector<std::string> preamble;
  std::vector<Subprogram> subprograms;

  const Subprogram* find(std::string_view name) const;
  bool operator==(const Program&) const = default;
};

/// Concatenation helpers used throughout attribute synthesis.
void append(Block& to, const Block& from);
Block concat(std::initializer_list<const Block*> parts);

}  // namespace sl::target
