#pragma once

// Recursive-descent parser for SL that drives a single bottom-up attribute
// synthesis pass. Every production reduction calls exactly one sink hook,
// children first, so a sink sees the same post-order a shift-reduce parser
// would produce. Hooks named begin_*/enter_*/leave_* are mid-rule actions,
// not reductions.
//
// A sink provides `using Attr = ...;` and:
//   void begin_subprogram(const Token& name, const std::vector<Token>& params);
//   Attr subprogram(const Token& name, const std::vector<Token>& params, Attr body, const Token& result);
//   Attr statements_empty();
//   Attr statements_append(Attr list, Attr stmt);
//   Attr pragma(const Token& pragma);
//   Attr lvalue_name(const Token& name);
//   Attr lvalue_indexed(const Token& name, Attr index);
//   void begin_rhs();
//   Attr assignment(Attr lhs, Attr rhs, int line);
//   Attr allocation(const Token& name, const Token& fill, Attr length, int line);
//   Attr call(const Token& result, const Token& callee, const std::vector<Token>& args, int line);
//   void enter_block(); void leave_block();
//   void begin_loop_body(const Token& var);
//   Attr if_statement(Attr cond, Attr then_body, Attr else_body, int line);
//   Attr while_statement(Attr cond, Attr body, int line);
//   Attr for_statement(const Token& var, Attr bound, Attr body, int line);
//   Attr condition(Attr lhs, target::CmpOp op, Attr rhs, int line);
//   Attr literal(const Token& number, ExprContext ctx);
//   Attr variable(const Token& name, ExprContext ctx);
//   Attr indexed(const Token& name, Attr index, ExprContext ctx);
//   Attr negate(Attr operand, ExprContext ctx, int line);
//   Attr binary(char op, Attr lhs, Attr rhs, ExprContext ctx, int line);
//   Attr intrinsic(const Token& fn, Attr arg, ExprContext ctx, int line);
//   Attr parenthesized(Attr inner, ExprContext ctx);

#include <initializer_list>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sl/diagnostics.hpp"
#include "sl/lexer.hpp"
#include "sl/target.hpp"

namespace sl {

/// Right-hand sides are decomposed into SAC; plain expressions (indices,
/// conditions, loop bounds, allocation lengths) only carry text and
/// variedness.
enum class ExprContext { Rhs, Plain };

template <class Attr>
struct SourceScript {
  std::vector<std::string> preamble;
  std::vector<Attr> subprograms;
};

template <class Sink>
class Parser {
 public:
  using Attr = typename Sink::Attr;

  Parser(std::span<const Token> tokens, Sink& sink) : tokens_(tokens.begin(), tokens.end()), sink_(sink) {
    int last_line = tokens_.empty() ? 1 : tokens_.back().line;
    tokens_.push_back({TokenKind::End, "", last_line});
  }

  SourceScript<Attr> parse_script() {
    SourceScript<Attr> script;
    while (at(TokenKind::Import)) script.preamble.push_back(advance().lexeme);
    std::set<std::string> names;
    while (!at(TokenKind::End)) {
      if (!at(TokenKind::Def)) fail({TokenKind::Def});
      int line = peek().line;
      auto [attr, name] = subprogram();
      if (!names.insert(name).second)
        throw CompileError(ErrorCode::Semantic, "duplicate subprogram '" + name + "'", line);
      script.subprograms.push_back(std::move(attr));
    }
    return script;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    return tokens_[std::min(pos_ + ahead, tokens_.size() - 1)];
  }
  bool at(TokenKind k, std::size_t ahead = 0) const { return peek(ahead).kind == k; }
  const Token& advance() {
    const Token& t = tokens_[pos_];
    if (pos_ + 1 < tokens_.size()) ++pos_;
    last_line_ = t.line;
    return t;
  }
  const Token& expect(TokenKind k) {
    if (!at(k)) fail({k});
    return advance();
  }

  [[noreturn]] void fail(std::initializer_list<TokenKind> expected) const {
    const Token& t = peek();
    std::string msg = "unexpected ";
    msg += t.kind == TokenKind::End ? std::string("end of input") : "'" + t.lexeme + "'";
    msg += ", expected ";
    bool first = true;
    for (auto k : expected) {
      if (!first) msg += " or ";
      msg += token_kind_name(k);
      first = false;
    }
    throw CompileError(ErrorCode::Syntax, msg, t.line);
  }

  std::pair<Attr, std::string> subprogram() {
    expect(TokenKind::Def);
    Token name = expect(TokenKind::Name);
    expect(TokenKind::LParen);
    std::vector<Token> params;
    if (!at(TokenKind::RParen)) {
      params.push_back(expect(TokenKind::Name));
      while (at(TokenKind::Comma)) {
        advance();
        params.push_back(expect(TokenKind::Name));
      }
    }
    expect(TokenKind::RParen);
    expect(TokenKind::LBrace);
    sink_.begin_subprogram(name, params);
    Attr body = statements();
    if (!at(TokenKind::Return)) fail({TokenKind::Return});
    advance();
    Token result = expect(TokenKind::Name);
    while (at(TokenKind::Semicolon)) advance();
    expect(TokenKind::RBrace);
    return {sink_.subprogram(name, params, std::move(body), result), name.lexeme};
  }

  Attr statements() {
    Attr list = sink_.statements_empty();
    while (!at(TokenKind::RBrace) && !at(TokenKind::Return) && !at(TokenKind::End)) {
      Attr stmt = statement();
      list = sink_.statements_append(std::move(list), std::move(stmt));
      bool separated = false;
      while (at(TokenKind::Semicolon)) {
        advance();
        separated = true;
      }
      if (!separated && !at(TokenKind::RBrace) && !at(TokenKind::Return) && !at(TokenKind::End) &&
          peek().line <= last_line_) {
        fail({TokenKind::Semicolon});
      }
    }
    return list;
  }

  Attr block() {
    expect(TokenKind::LBrace);
    sink_.enter_block();
    Attr body = statements();
    if (at(TokenKind::Return))
      throw CompileError(ErrorCode::Syntax, "'return' is only allowed at the end of a subprogram", peek().line);
    expect(TokenKind::RBrace);
    sink_.leave_block();
    return body;
  }

  Attr statement() {
    const Token& t = peek();
    switch (t.kind) {
      case TokenKind::Pragma: return sink_.pragma(advance());
      case TokenKind::If: return if_statement();
      case TokenKind::While: return while_statement();
      case TokenKind::For: return for_statement();
      case TokenKind::Name: return name_statement();
      default:
        fail({TokenKind::Name, TokenKind::If, TokenKind::While, TokenKind::For, TokenKind::Pragma,
              TokenKind::Return});
    }
  }

  Attr if_statement() {
    int line = advance().line;
    Attr cond = condition();
    Attr then_body = block();
    if (!at(TokenKind::Else)) fail({TokenKind::Else});
    advance();
    Attr else_body = block();
    return sink_.if_statement(std::move(cond), std::move(then_body), std::move(else_body), line);
  }

  Attr while_statement() {
    int line = advance().line;
    Attr cond = condition();
    Attr body = block();
    return sink_.while_statement(std::move(cond), std::move(body), line);
  }

  Attr for_statement() {
    int line = advance().line;
    Token var = expect(TokenKind::Name);
    expect(TokenKind::In);
    expect(TokenKind::Range);
    expect(TokenKind::LParen);
    Attr bound = expression(ExprContext::Plain);
    expect(TokenKind::RParen);
    sink_.begin_loop_body(var);
    Attr body = block();
    return sink_.for_statement(var, std::move(bound), std::move(body), line);
  }

  Attr name_statement() {
    Token name = advance();
    int line = name.line;
    if (at(TokenKind::LBracket)) {
      advance();
      Attr idx = expression(ExprContext::Plain);
      expect(TokenKind::RBracket);
      Attr lhs = sink_.lvalue_indexed(name, std::move(idx));
      expect(TokenKind::Assign);
      sink_.begin_rhs();
      Attr rhs = expression(ExprContext::Rhs);
      return sink_.assignment(std::move(lhs), std::move(rhs), line);
    }
    if (!at(TokenKind::Assign)) fail({TokenKind::Assign, TokenKind::LBracket});
    if (at(TokenKind::LBracket, 1)) {
      advance();
      advance();
      if (!at(TokenKind::Float) && !at(TokenKind::Int)) fail({TokenKind::Float});
      Token fill = advance();
      expect(TokenKind::RBracket);
      expect(TokenKind::Star);
      Attr length = factor(ExprContext::Plain);
      return sink_.allocation(name, fill, std::move(length), line);
    }
    if ((at(TokenKind::Name, 1) || at(TokenKind::External, 1)) && at(TokenKind::LParen, 2)) {
      advance();
      Token callee = advance();
      advance();
      std::vector<Token> args;
      if (!at(TokenKind::RParen)) {
        args.push_back(expect(TokenKind::Name));
        while (at(TokenKind::Comma)) {
          advance();
          args.push_back(expect(TokenKind::Name));
        }
      }
      expect(TokenKind::RParen);
      return sink_.call(name, callee, args, line);
    }
    Attr lhs = sink_.lvalue_name(name);
    advance();
    sink_.begin_rhs();
    Attr rhs = expression(ExprContext::Rhs);
    return sink_.assignment(std::move(lhs), std::move(rhs), line);
  }

  Attr condition() {
    Attr lhs = expression(ExprContext::Plain);
    int line = peek().line;
    target::CmpOp op;
    switch (peek().kind) {
      case TokenKind::Less: op = target::CmpOp::Less; break;
      case TokenKind::Greater: op = target::CmpOp::Greater; break;
      case TokenKind::LessEqual: op = target::CmpOp::LessEqual; break;
      case TokenKind::GreaterEqual: op = target::CmpOp::GreaterEqual; break;
      case TokenKind::Equal: op = target::CmpOp::Equal; break;
      case TokenKind::NotEqual: op = target::CmpOp::NotEqual; break;
      default:
        fail({TokenKind::Less, TokenKind::Greater, TokenKind::LessEqual, TokenKind::GreaterEqual, TokenKind::Equal,
              TokenKind::NotEqual});
    }
    advance();
    Attr rhs = expression(ExprContext::Plain);
    return sink_.condition(std::move(lhs), op, std::move(rhs), line);
  }

  Attr expression(ExprContext ctx) {
    Attr lhs = term(ctx);
    while (at(TokenKind::Plus) || at(TokenKind::Minus)) {
      const Token& op = advance();
      Attr rhs = term(ctx);
      lhs = sink_.binary(op.lexeme[0], std::move(lhs), std::move(rhs), ctx, op.line);
    }
    return lhs;
  }

  Attr term(ExprContext ctx) {
    Attr lhs = factor(ctx);
    while (at(TokenKind::Star) || at(TokenKind::Slash)) {
      const Token& op = advance();
      Attr rhs = factor(ctx);
      lhs = sink_.binary(op.lexeme[0], std::move(lhs), std::move(rhs), ctx, op.line);
    }
    return lhs;
  }

  Attr factor(ExprContext ctx) {
    if (at(TokenKind::Minus)) {
      int line = advance().line;
      Attr operand = factor(ctx);
      return sink_.negate(std::move(operand), ctx, line);
    }
    return primary(ctx);
  }

  Attr primary(ExprContext ctx) {
    const Token& t = peek();
    switch (t.kind) {
      case TokenKind::Float:
      case TokenKind::Int: return sink_.literal(advance(), ctx);
      case TokenKind::Name: {
        Token name = advance();
        if (at(TokenKind::LParen))
          throw CompileError(ErrorCode::Syntax,
                             "call of '" + name.lexeme + "' inside an expression; calls must be statements", name.line);
        if (at(TokenKind::LBracket)) {
          advance();
          Attr idx = expression(ExprContext::Plain);
          expect(TokenKind::RBracket);
          return sink_.indexed(name, std::move(idx), ctx);
        }
        return sink_.variable(name, ctx);
      }
      case TokenKind::External:
        throw CompileError(ErrorCode::Syntax,
                           "external '" + t.lexeme + "' used inside an expression; calls must be statements", t.line);
      case TokenKind::Exp:
      case TokenKind::Gt0: {
        Token fn = advance();
        expect(TokenKind::LParen);
        Attr arg = expression(ctx);
        expect(TokenKind::RParen);
        return sink_.intrinsic(fn, std::move(arg), ctx, fn.line);
      }
      case TokenKind::LParen: {
        advance();
        Attr inner = expression(ctx);
        expect(TokenKind::RParen);
        return sink_.parenthesized(std::move(inner), ctx);
      }
      default:
        fail({TokenKind::Float, TokenKind::Int, TokenKind::Name, TokenKind::Exp, TokenKind::Gt0, TokenKind::LParen,
              TokenKind::Minus});
    }
  }

  std::vector<Token> tokens_;
  Sink& sink_;
  std::size_t pos_ = 0;
  int last_line_ = 0;
};

template <class Sink>
SourceScript<typename Sink::Attr> parse(std::span<const Token> tokens, Sink& sink) {
  return Parser<Sink>(tokens, sink).parse_script();
}

}  // namespace sl
