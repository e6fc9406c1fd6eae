#include "sl/interp.hpp"

#include <cmath>

#include "sl/activity.hpp"
#include "sl/diagnostics.hpp"

namespace sl {

using namespace target;

namespace {

enum class Builtin { Exp, Gt0, DExp, DGt0, PushS, PopS, PushV, PopV, PushC, PopC };

const std::unordered_map<std::string_view, Builtin>& builtins() {
  static const std::unordered_map<std::string_view, Builtin> table{
      {"exp", Builtin::Exp},     {"gt0", Builtin::Gt0},     {"d_exp", Builtin::DExp},  {"d_gt0", Builtin::DGt0},
      {"push_s", Builtin::PushS}, {"pop_s", Builtin::PopS}, {"push_v", Builtin::PushV}, {"pop_v", Builtin::PopV},
      {"push_c", Builtin::PushC}, {"pop_c", Builtin::PopC},
  };
  return table;
}

constexpr int kMaxDepth = 256;

}  // namespace

Interpreter::Interpreter(const Program& program, TapeStacks& stacks, RunOptions options,
                         const ExternalRegistry& externals)
    : program_(program), stacks_(stacks), options_(options), externals_(externals) {
  validate(options_.smoothing);
  for (const auto& s : program_.subprograms) subprograms_.emplace(s.name, &s);
}

Value Interpreter::run(std::string_view entry, std::vector<Value> args) {
  auto it = subprograms_.find(std::string(entry));
  if (it == subprograms_.end()) throw RuntimeError("no subprogram named '" + std::string(entry) + "'");
  const Subprogram& sub = *it->second;
  Value result = call_subprogram(sub, std::move(args), true);
  if (sub.kind == SubprogramKind::Adjoint && !options_.forward_only && !stacks_.empty())
    throw RuntimeError("tape imbalance after '" + sub.name + "': " + std::to_string(stacks_.scalar_size()) +
                       " scalar, " + std::to_string(stacks_.vector_size()) + " vector, " +
                       std::to_string(stacks_.control_size()) + " control entries left");
  return result;
}

Value Interpreter::call_subprogram(const Subprogram& sub, std::vector<Value> args, bool entry) {
  if (args.size() != sub.params.size())
    throw RuntimeError("'" + sub.name + "' expects " + std::to_string(sub.params.size()) + " arguments, got " +
                       std::to_string(args.size()));
  if (++depth_ > kMaxDepth) throw RuntimeError("call depth exceeded in '" + sub.name + "'");
  Frame frame;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (is_active(sub.params[i]) && !is_vector(args[i]))
      throw RuntimeError("non-vector active argument '" + sub.params[i] + "' of '" + sub.name + "'");
    frame.insert_or_assign(sub.params[i], std::move(args[i]));
  }
  exec(sub.header, frame);
  exec(sub.forward, frame);
  if (!(entry && options_.forward_only)) exec(sub.reverse, frame);
  --depth_;
  return lookup(frame, sub.result);
}

Value& Interpreter::lookup(Frame& frame, const std::string& id) {
  auto it = frame.find(id);
  if (it == frame.end()) throw RuntimeError("unbound name '" + id + "'");
  return it->second;
}

std::size_t Interpreter::count_value(const Expr& e, Frame& frame, const char* what) {
  double d = scalar(e, frame);
  if (!(d >= 0) || d != std::floor(d) || d > 1e15)
    throw RuntimeError(std::string(what) + " must be a non-negative integer, got " + std::to_string(d));
  return static_cast<std::size_t>(d);
}

std::size_t Interpreter::index_value(const Expr& e, Frame& frame, std::size_t size, const std::string& base) {
  double d = scalar(e, frame);
  if (!(d >= 0) || d != std::floor(d) || d >= static_cast<double>(size))
    throw RuntimeError("index " + std::to_string(d) + " out of range for '" + base + "' of length " +
                       std::to_string(size));
  return static_cast<std::size_t>(d);
}

double Interpreter::scalar(const Expr& e, Frame& frame) {
  switch (e.node.index()) {
    case 0: return std::get<Number>(e.node).value;
    case 1: {
      const auto& id = std::get<Name>(e.node).id;
      return as_scalar(lookup(frame, id), id);
    }
    case 2: {
      const auto& ix = std::get<Index>(e.node);
      const auto& vec = as_vector(lookup(frame, ix.base), ix.base);
      return (*vec)[index_value(*ix.index, frame, vec->size(), ix.base)];
    }
    case 3: return -scalar(*std::get<Negate>(e.node).operand, frame);
    case 4: {
      const auto& b = std::get<Binary>(e.node);
      double l = scalar(*b.lhs, frame);
      double r = scalar(*b.rhs, frame);
      switch (b.op) {
        case '+': return l + r;
        case '-': return l - r;
        case '*': return l * r;
        case '/':
          if (r == 0.0) ++stats_.divisions_by_zero;
          return l / r;
      }
      throw RuntimeError(std::string("unknown operator ") + b.op);
    }
    case 5: {
      const auto& c = std::get<Compare>(e.node);
      double l = scalar(*c.lhs, frame);
      double r = scalar(*c.rhs, frame);
      bool out = false;
      switch (c.op) {
        case CmpOp::Less: out = l < r; break;
        case CmpOp::Greater: out = l > r; break;
        case CmpOp::LessEqual: out = l <= r; break;
        case CmpOp::GreaterEqual: out = l >= r; break;
        case CmpOp::Equal: out = l == r; break;
        case CmpOp::NotEqual: out = l != r; break;
      }
      return out ? 1.0 : 0.0;
    }
    default: return as_scalar(eval(e, frame), "expression");
  }
}

Value Interpreter::eval(const Expr& e, Frame& frame) {
  if (auto* n = std::get_if<Name>(&e.node)) return lookup(frame, n->id);
  if (auto* c = std::get_if<Call>(&e.node)) return call(*c, frame);
  if (auto* a = std::get_if<Alloc>(&e.node)) {
    double fill = scalar(*a->fill, frame);
    return make_vector(Vector(count_value(*a->length, frame, "allocation length"), fill));
  }
  return scalar(e, frame);
}

Value Interpreter::call(const Call& c, Frame& frame) {
  if (auto b = builtins().find(c.callee); b != builtins().end()) {
    auto arity = [&](std::size_t n) {
      if (c.args.size() != n)
        throw RuntimeError("'" + c.callee + "' expects " + std::to_string(n) + " arguments");
    };
    switch (b->second) {
      case Builtin::Exp: arity(1); return std::exp(scalar(*c.args[0], frame));
      case Builtin::Gt0: arity(1); return gt0(scalar(*c.args[0], frame));
      case Builtin::DExp: arity(1); return d_exp(scalar(*c.args[0], frame));
      case Builtin::DGt0: {
        arity(1);
        double x = scalar(*c.args[0], frame);
        if (std::fabs(x) <= options_.smoothing.h) {
          if (options_.strict_kinks)
            throw RuntimeError("d_gt0 evaluated within h of the kink (x=" + std::to_string(x) + ")");
          ++stats_.kinks;
        }
        return d_gt0(x, options_.smoothing);
      }
      case Builtin::PushS: arity(1); stacks_.push_scalar(scalar(*c.args[0], frame)); return 0.0;
      case Builtin::PopS: arity(0); return stacks_.pop_scalar();
      case Builtin::PushV: {
        arity(1);
        Value v = eval(*c.args[0], frame);
        stacks_.push_vector(*as_vector(v, "push_v argument"));
        return 0.0;
      }
      case Builtin::PopV: arity(0); return make_vector(stacks_.pop_vector());
      case Builtin::PushC:
        arity(1);
        stacks_.push_control(count_value(*c.args[0], frame, "control value"));
        return 0.0;
      case Builtin::PopC: arity(0); return static_cast<double>(stacks_.pop_control());
    }
  }

  std::vector<Value> args;
  args.reserve(c.args.size());
  for (const auto& a : c.args) args.push_back(eval(*a, frame));

  if (auto it = subprograms_.find(c.callee); it != subprograms_.end())
    return call_subprogram(*it->second, std::move(args), false);
  ExternalContext ectx{options_.seed};
  if (const auto* ext = externals_.find(c.callee)) return ext->primal(args, ectx);
  if (const auto* adj = externals_.find_adjoint(c.callee)) return (*adj)(args, ectx);
  throw RuntimeError("call of unknown subprogram '" + c.callee + "'");
}

void Interpreter::exec(const Block& block, Frame& frame) {
  for (const auto& s : block) exec(s, frame);
}

void Interpreter::exec(const Stmt& stmt, Frame& frame) {
  if (auto* a = std::get_if<Assign>(&stmt.node)) {
    if (auto* ix = std::get_if<Index>(&a->target->node)) {
      double value = scalar(*a->value, frame);
      const auto& vec = as_vector(lookup(frame, ix->base), ix->base);
      (*vec)[index_value(*ix->index, frame, vec->size(), ix->base)] = value;
      return;
    }
    const auto& id = std::get<Name>(a->target->node).id;
    Value value = eval(*a->value, frame);
    auto it = frame.find(id);
    if (it == frame.end()) {
      frame.emplace(id, std::move(value));
      return;
    }
    if (auto* src = std::get_if<VectorRef>(&value)) {
      auto* dst = std::get_if<VectorRef>(&it->second);
      if (dst && !std::holds_alternative<Alloc>(a->value->node)) {
        // assignment into an existing vector keeps its identity for aliases
        if (*dst != *src) {
          if ((*dst)->size() != (*src)->size())
            throw RuntimeError("length mismatch assigning to '" + id + "'");
          **dst = **src;
        }
        return;
      }
      it->second = std::move(value);
      return;
    }
    if (is_vector(it->second)) throw RuntimeError("scalar assigned to vector '" + id + "'");
    it->second = std::move(value);
    return;
  }
  if (auto* e = std::get_if<Eval>(&stmt.node)) {
    eval(*e->expr, frame);
    return;
  }
  if (auto* i = std::get_if<If>(&stmt.node)) {
    exec(scalar(*i->cond, frame) != 0.0 ? i->then_body : i->else_body, frame);
    return;
  }
  if (auto* w = std::get_if<While>(&stmt.node)) {
    while (scalar(*w->cond, frame) != 0.0) {
      ++stats_.while_iterations;
      exec(w->body, frame);
    }
    return;
  }
  if (auto* f = std::get_if<For>(&stmt.node)) {
    const std::size_t n = count_value(*f->bound, frame, "range bound");
    stats_.for_iterations[f->var] += n;
    for (std::size_t k = 0; k < n; ++k) {
      std::size_t i = f->reversed ? n - 1 - k : k;
      frame.insert_or_assign(f->var, static_cast<double>(i));
      exec(f->body, frame);
    }
    return;
  }
  // comments and pragmas have no effect
}

Value exec_program(const Program& program, std::string_view entry, std::vector<Value> args, TapeStacks& stacks,
                   const RunOptions& options, ExecStats* stats, const ExternalRegistry& externals) {
  Interpreter interp(program, stacks, options, externals);
  Value out = interp.run(entry, std::move(args));
  if (stats) *stats = interp.stats();
  return out;
}

}  // namespace sl
