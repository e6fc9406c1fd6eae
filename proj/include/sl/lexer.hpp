#pragma once

#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace sl {

enum class TokenKind {
  // keywords
  Def,
  Return,
  If,
  Else,
  While,
  For,
  In,
  Range,
  Exp,
  Gt0,
  // names and literals
  Name,
  External,
  Float,
  Int,
  // operators
  Plus,
  Minus,
  Star,
  Slash,
  Assign,
  Less,
  Greater,
  LessEqual,
  GreaterEqual,
  Equal,
  NotEqual,
  // delimiters
  LParen,
  RParen,
  LBrace,
  RBrace,
  LBracket,
  RBracket,
  Comma,
  Semicolon,
  // line-level tokens
  Pragma,
  Import,
  End,
};

enum class PragmaKind { NoPrimal, NoTbr };

struct Token {
  TokenKind kind = TokenKind::End;
  std::string lexeme;
  int line = 0;

  bool operator==(const Token&) const = default;
};

std::string_view token_kind_name(TokenKind kind);
std::string_view pragma_name(PragmaKind kind);

/// Pragma kind of a PRAGMA token (its lexeme is the bare pragma name).
PragmaKind pragma_kind(const Token& token);

using NameSet = std::set<std::string, std::less<>>;

/// Splits SL source into tokens. `#pragma noprimal|notbr` become single
/// PRAGMA tokens, other `#` comments are dropped, and lines starting with
/// `from` or `import` become IMPORT tokens holding the trimmed line.
/// Names listed in `externals` lex as EXTERNAL. No END sentinel is appended.
std::vector<Token> tokenize(std::string_view source, const NameSet& externals = {});

}  // namespace sl
