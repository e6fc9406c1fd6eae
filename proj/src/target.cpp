#include "sl/target.hpp"

#include <cstdlib>

namespace sl::target {

std::string_view cmp_text(CmpOp op) {
  switch (op) {
    case CmpOp::Less: return "<";
    case CmpOp::Greater: return ">";
    case CmpOp::LessEqual: return "<=";
    case CmpOp::GreaterEqual: return ">=";
    case CmpOp::Equal: return "==";
    case CmpOp::NotEqual: return "!=";
  }
  return "?";
}

bool same(const ExprPtr& a, const ExprPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  return *a == *b;
}

namespace {
struct ExprEq {
  bool operator()(const Number& a, const Number& b) const { return a.text == b.text; }
  bool operator()(const Name& a, const Name& b) const { return a.id == b.id; }
  bool operator()(const Index& a, const Index& b) const { return a.base == b.base && same(a.index, b.index); }
  bool operator()(const Negate& a, const Negate& b) const { return same(a.operand, b.operand); }
  bool operator()(const Binary& a, const Binary& b) const {
    return a.op == b.op && same(a.lhs, b.lhs) && same(a.rhs, b.rhs);
  }
  bool operator()(const Compare& a, const Compare& b) const {
    return a.op == b.op && same(a.lhs, b.lhs) && same(a.rhs, b.rhs);
  }
  bool operator()(const Call& a, const Call& b) const {
    if (a.callee != b.callee || a.args.size() != b.args.size()) return false;
    for (std::size_t i = 0; i < a.args.size(); ++i)
      if (!same(a.args[i], b.args[i])) return false;
    return true;
  }
  bool operator()(const Alloc& a, const Alloc& b) const { return same(a.fill, b.fill) && same(a.length, b.length); }
  template <class A, class B>
  bool operator()(const A&, const B&) const {
    return false;
  }
};

struct StmtEq {
  bool operator()(const Assign& a, const Assign& b) const { return same(a.target, b.target) && same(a.value, b.value); }
  bool operator()(const Eval& a, const Eval& b) const { return same(a.expr, b.expr); }
  bool operator()(const If& a, const If& b) const {
    return same(a.cond, b.cond) && a.then_body == b.then_body && a.else_body == b.else_body;
  }
  bool operator()(const While& a, const While& b) const { return same(a.cond, b.cond) && a.body == b.body; }
  bool operator()(const For& a, const For& b) const {
    return a.var == b.var && same(a.bound, b.bound) && a.reversed == b.reversed && a.body == b.body;
  }
  bool operator()(const Comment& a, const Comment& b) const { return a.text == b.text; }
  bool operator()(const Pragma& a, const Pragma& b) const { return a.kind == b.kind; }
  template <class A, class B>
  bool operator()(const A&, const B&) const {
    return false;
  }
};

ExprPtr make(auto node) { return std::make_shared<const Expr>(Expr{std::move(node)}); }
}  // namespace

bool operator==(const Expr& a, const Expr& b) { return std::visit(ExprEq{}, a.node, b.node); }
bool operator==(const Stmt& a, const Stmt& b) { return std::visit(StmtEq{}, a.node, b.node); }

ExprPtr number(std::string text) {
  double value = std::strtod(text.c_str(), nullptr);
  return make(Number{value, std::move(text)});
}
ExprPtr integer(long value) { return make(Number{static_cast<double>(value), std::to_string(value)}); }
ExprPtr name(std::string id) { return make(Name{std::move(id)}); }
ExprPtr index(std::string base, ExprPtr idx) { return make(Index{std::move(base), std::move(idx)}); }
ExprPtr index_at(std::string base, long idx) { return index(std::move(base), integer(idx)); }
ExprPtr negate(ExprPtr operand) { return make(Negate{std::move(operand)}); }
ExprPtr binary(char op, ExprPtr lhs, ExprPtr rhs) { return make(Binary{op, std::move(lhs), std::move(rhs)}); }
ExprPtr compare(CmpOp op, ExprPtr lhs, ExprPtr rhs) { return make(Compare{op, std::move(lhs), std::move(rhs)}); }
ExprPtr call(std::string callee, std::vector<ExprPtr> args) { return make(Call{std::move(callee), std::move(args)}); }
ExprPtr alloc(ExprPtr fill, ExprPtr length) { return make(Alloc{std::move(fill), std::move(length)}); }

ExprPtr sac(int k) { return index_at("v", k); }
ExprPtr sac_adjoint(int k) { return index_at("a_v", k); }

const std::string& base_name(const Expr& lvalue) {
  if (auto* n = std::get_if<Name>(&lvalue.node)) return n->id;
  return std::get<Index>(lvalue.node).base;
}

ExprPtr adjoint_of(const ExprPtr& lvalue) {
  if (auto* n = std::get_if<Name>(&lvalue->node)) return name("a_" + n->id);
  const auto& ix = std::get<Index>(lvalue->node);
  return index("a_" + ix.base, ix.index);
}

Stmt assign(ExprPtr target, ExprPtr value) { return Stmt{Assign{std::move(target), std::move(value)}}; }
Stmt eval(ExprPtr expr) { return Stmt{Eval{std::move(expr)}}; }
Stmt comment(std::string text) { return Stmt{Comment{std::move(text)}}; }

const Subprogram* Program::find(std::string_view name) const {
  for (const auto& s : subprograms)
    if (s.name == name) return &s;
  return nullptr;
}

void append(Block& to, const Block& from) { to.insert(to.end(), from.begin(), from.end()); }

Block concat(std::initializer_list<const Block*> parts) {
  Block out;
  for (const auto* p : parts) append(out, *p);
  return out;
}

}  // namespace sl::target
