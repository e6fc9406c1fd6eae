#include "sl/lexer.hpp"

#include <array>
#include <cctype>
#include <utility>

#include "sl/diagnostics.hpp"

namespace sl {

std::string_view token_kind_name(TokenKind kind) {
  switch (kind) {
    case TokenKind::Def: return "def";
    case TokenKind::Return: return "return";
    case TokenKind::If: return "if";
    case TokenKind::Else: return "else";
    case TokenKind::While: return "while";
    case TokenKind::For: return "for";
    case TokenKind::In: return "in";
    case TokenKind::Range: return "range";
    case TokenKind::Exp: return "exp";
    case TokenKind::Gt0: return "gt0";
    case TokenKind::Name: return "name";
    case TokenKind::External: return "external name";
    case TokenKind::Float: return "float literal";
    case TokenKind::Int: return "integer literal";
    case TokenKind::Plus: return "'+'";
    case TokenKind::Minus: return "'-'";
    case TokenKind::Star: return "'*'";
    case TokenKind::Slash: return "'/'";
    case TokenKind::Assign: return "'='";
    case TokenKind::Less: return "'<'";
    case TokenKind::Greater: return "'>'";
    case TokenKind::LessEqual: return "'<='";
    case TokenKind::GreaterEqual: return "'>='";
    case TokenKind::Equal: return "'=='";
    case TokenKind::NotEqual: return "'!='";
    case TokenKind::LParen: return "'('";
    case TokenKind::RParen: return "')'";
    case TokenKind::LBrace: return "'{'";
    case TokenKind::RBrace: return "'}'";
    case TokenKind::LBracket: return "'['";
    case TokenKind::RBracket: return "']'";
    case TokenKind::Comma: return "','";
    case TokenKind::Semicolon: return "';'";
    case TokenKind::Pragma: return "pragma";
    case TokenKind::Import: return "import line";
    case TokenKind::End: return "end of input";
  }
  return "?";
}

std::string_view pragma_name(PragmaKind kind) {
  return kind == PragmaKind::NoPrimal ? "noprimal" : "notbr";
}

PragmaKind pragma_kind(const Token& token) {
  return token.lexeme == "noprimal" ? PragmaKind::NoPrimal : PragmaKind::NoTbr;
}

namespace {

constexpr std::array<std::pair<std::string_view, TokenKind>, 10> kKeywords{{
    {"def", TokenKind::Def},
    {"return", TokenKind::Return},
    {"if", TokenKind::If},
    {"else", TokenKind::Else},
    {"while", TokenKind::While},
    {"for", TokenKind::For},
    {"in", TokenKind::In},
    {"range", TokenKind::Range},
    {"exp", TokenKind::Exp},
    {"gt0", TokenKind::Gt0},
}};

bool is_name_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}
bool is_name_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}
bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)); }

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

class Lexer {
 public:
  Lexer(std::string_view src, const NameSet& externals) : src_(src), externals_(externals) {}

  std::vector<Token> run() {
    bool line_start = true;
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == '\n') {
        ++line_;
        ++pos_;
        line_start = true;
        continue;
      }
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
        continue;
      }
      if (line_start && is_name_start(c) && import_line()) continue;
      line_start = false;
      if (c == '#') {
        comment();
        continue;
      }
      if (is_name_start(c)) {
        name();
      } else if (is_digit(c) || (c == '.' && pos_ + 1 < src_.size() && is_digit(src_[pos_ + 1]))) {
        number();
      } else {
        punct();
      }
    }
    return std::move(out_);
  }

 private:
  std::string_view rest_of_line() const {
    auto end = src_.find('\n', pos_);
    if (end == std::string_view::npos) end = src_.size();
    return src_.substr(pos_, end - pos_);
  }

  bool import_line() {
    auto line = rest_of_line();
    auto word_end = line.find_first_of(" \t\r");
    auto word = line.substr(0, word_end);
    if (word != "from" && word != "import") return false;
    out_.push_back({TokenKind::Import, std::string(trim(line)), line_});
    pos_ += line.size();
    return true;
  }

  void comment() {
    auto line = rest_of_line();
    pos_ += line.size();
    auto body = trim(line.substr(1));
    if (body.substr(0, 6) != "pragma" || (body.size() > 6 && is_name_char(body[6]))) return;
    auto kind = trim(body.substr(6));
    if (kind != "noprimal" && kind != "notbr")
      throw CompileError(ErrorCode::Lex, "unknown pragma '" + std::string(kind) + "'", line_);
    out_.push_back({TokenKind::Pragma, std::string(kind), line_});
  }

  void name() {
    auto start = pos_;
    while (pos_ < src_.size() && is_name_char(src_[pos_])) ++pos_;
    std::string text(src_.substr(start, pos_ - start));
    TokenKind kind = TokenKind::Name;
    for (auto [word, k] : kKeywords)
      if (word == text) kind = k;
    if (kind == TokenKind::Name && externals_.contains(text)) kind = TokenKind::External;
    out_.push_back({kind, std::move(text), line_});
  }

  void number() {
    auto start = pos_;
    bool is_float = false;
    while (pos_ < src_.size() && is_digit(src_[pos_])) ++pos_;
    if (pos_ < src_.size() && src_[pos_] == '.') {
      is_float = true;
      ++pos_;
      while (pos_ < src_.size() && is_digit(src_[pos_])) ++pos_;
    }
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      auto save = pos_;
      ++pos_;
      if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
      if (pos_ < src_.size() && is_digit(src_[pos_])) {
        is_float = true;
        while (pos_ < src_.size() && is_digit(src_[pos_])) ++pos_;
      } else {
        pos_ = save;
      }
    }
    if (pos_ < src_.size() && is_name_start(src_[pos_]))
      throw CompileError(ErrorCode::Lex, "malformed number", line_);
    out_.push_back({is_float ? TokenKind::Float : TokenKind::Int,
                    std::string(src_.substr(start, pos_ - start)), line_});
  }

  void punct() {
    char c = src_[pos_];
    char next = pos_ + 1 < src_.size() ? src_[pos_ + 1] : '\0';
    auto two = [&](TokenKind k, std::string_view text) {
      out_.push_back({k, std::string(text), line_});
      pos_ += 2;
    };
    auto one = [&](TokenKind k) {
      out_.push_back({k, std::string(1, c), line_});
      ++pos_;
    };
    switch (c) {
      case '+': return one(TokenKind::Plus);
      case '-': return one(TokenKind::Minus);
      case '*': return one(TokenKind::Star);
      case '/': return one(TokenKind::Slash);
      case '(': return one(TokenKind::LParen);
      case ')': return one(TokenKind::RParen);
      case '{': return one(TokenKind::LBrace);
      case '}': return one(TokenKind::RBrace);
      case '[': return one(TokenKind::LBracket);
      case ']': return one(TokenKind::RBracket);
      case ',': return one(TokenKind::Comma);
      case ';': return one(TokenKind::Semicolon);
      case '<': return next == '=' ? two(TokenKind::LessEqual, "<=") : one(TokenKind::Less);
      case '>': return next == '=' ? two(TokenKind::GreaterEqual, ">=") : one(TokenKind::Greater);
      case '=': return next == '=' ? two(TokenKind::Equal, "==") : one(TokenKind::Assign);
      case '!':
        if (next == '=') return two(TokenKind::NotEqual, "!=");
        break;
      default: break;
    }
    std::string shown = std::isprint(static_cast<unsigned char>(c)) ? std::string(1, c)
                                                                      : "\\x" + std::to_string(int(c) & 0xff);
    throw CompileError(ErrorCode::Lex, "unexpected character '" + shown + "'", line_);
  }

  std::string_view src_;
  const NameSet& externals_;
  std::size_t pos_ = 0;
  int line_ = 1;
  std::vector<Token> out_;
};

}  // namespace

std::vector<Token> tokenize(std::string_view source, const NameSet& externals) {
  return Lexer(source, externals).run();
}

}  // namespace sl
