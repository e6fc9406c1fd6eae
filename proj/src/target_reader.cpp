#include "sl/target_reader.hpp"

#include <cctype>
#include <charconv>
#include <cstdlib>
#include <string>
#include <vector>

#include "sl/diagnostics.hpp"
#include "sl/emitter.hpp"

namespace sl {

namespace {

using namespace target;

struct Line {
  int number;
  int depth;
  std::string text;  // without indentation
};

bool starts_with(std::string_view s, std::string_view p) { return s.substr(0, p.size()) == p; }

bool ends_with(std::string_view s, std::string_view p) {
  return s.size() >= p.size() && s.substr(s.size() - p.size()) == p;
}

// Expression reader over a single line.
class ExprReader {
 public:
  ExprReader(std::string_view text, int line) : s_(text), line_(line) {}

  ExprPtr full() {
    auto e = comparison();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(s_.substr(pos_)) + "'");
    return e;
  }

  std::string identifier() {
    skip();
    auto start = pos_;
    while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
    if (start == pos_ || std::isdigit(static_cast<unsigned char>(s_[start]))) fail("expected a name");
    return std::string(s_.substr(start, pos_ - start));
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw CompileError(ErrorCode::Syntax, msg, line_); }

  void skip() {
    while (pos_ < s_.size() && s_[pos_] == ' ') ++pos_;
  }

  bool accept(std::string_view tok) {
    skip();
    if (starts_with(s_.substr(pos_), tok)) {
      pos_ += tok.size();
      return true;
    }
    return false;
  }

  void expect(std::string_view tok) {
    if (!accept(tok)) fail("expected '" + std::string(tok) + "'");
  }

  ExprPtr comparison() {
    auto lhs = sum();
    static constexpr std::pair<std::string_view, CmpOp> ops[] = {
        {"<=", CmpOp::LessEqual}, {">=", CmpOp::GreaterEqual}, {"==", CmpOp::Equal},
        {"!=", CmpOp::NotEqual},  {"<", CmpOp::Less},          {">", CmpOp::Greater},
    };
    for (auto [text, op] : ops)
      if (accept(text)) return compare(op, lhs, sum());
    return lhs;
  }

  ExprPtr sum() {
    auto lhs = term();
    for (;;) {
      if (accept("+")) lhs = binary('+', lhs, term());
      else if (accept("-")) lhs = binary('-', lhs, term());
      else return lhs;
    }
  }

  ExprPtr term() {
    auto lhs = unary();
    for (;;) {
      if (accept("*")) lhs = binary('*', lhs, unary());
      else if (accept("/")) lhs = binary('/', lhs, unary());
      else return lhs;
    }
  }

  ExprPtr unary() {
    if (accept("-")) return negate(unary());
    return primary();
  }

  ExprPtr primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of expression");
    char c = s_[pos_];
    if (accept("(")) {
      auto e = comparison();
      expect(")");
      return e;
    }
    if (accept("[")) {
      auto fill = comparison();
      expect("]");
      expect("*");
      return alloc(fill, primary());
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return literal();
    auto id = identifier();
    if (accept("[")) {
      auto idx = comparison();
      expect("]");
      return index(id, idx);
    }
    if (accept("(")) {
      std::vector<ExprPtr> args;
      if (!accept(")")) {
        do args.push_back(comparison());
        while (accept(","));
        expect(")");
      }
      return call(id, std::move(args));
    }
    return name(id);
  }

  ExprPtr literal() {
    auto start = pos_;
    auto digits = [&] {
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    };
    digits();
    if (pos_ < s_.size() && s_[pos_] == '.') {
      ++pos_;
      digits();
    }
    if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
      ++pos_;
      if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) ++pos_;
      digits();
    }
    return number(std::string(s_.substr(start, pos_ - start)));
  }

  std::string_view s_;
  std::size_t pos_ = 0;
  int line_;
};

class Reader {
 public:
  explicit Reader(std::vector<Line> lines) : lines_(std::move(lines)) {}

  Program program() {
    Program out;
    while (pos_ < lines_.size() && !starts_with(lines_[pos_].text, "def ")) {
      out.preamble.push_back(lines_[pos_].text);
      ++pos_;
    }
    while (pos_ < lines_.size()) out.subprograms.push_back(subprogram());
    return out;
  }

 private:
  [[noreturn]] void fail(const Line& l, const std::string& msg) const {
    throw CompileError(ErrorCode::Syntax, msg, l.number);
  }

  Subprogram subprogram() {
    const Line& head = lines_[pos_++];
    if (head.depth != 0 || !starts_with(head.text, "def ") || !ends_with(head.text, ") :"))
      fail(head, "expected a subprogram header");
    Subprogram sub;
    auto open = head.text.find('(');
    if (open == std::string::npos) fail(head, "expected '('");
    sub.name = head.text.substr(4, open - 4);
    std::string params = head.text.substr(open + 1, head.text.size() - 3 - open - 1);
    for (std::size_t start = 0; !params.empty();) {
      auto comma = params.find(',', start);
      sub.params.push_back(params.substr(start, comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }

    Block* current = &sub.forward;
    for (;;) {
      if (pos_ >= lines_.size()) fail(head, "missing return in '" + sub.name + "'");
      const Line& l = lines_[pos_];
      if (l.depth == 0 && l.text == kForwardBanner) {
        sub.kind = SubprogramKind::Adjoint;
        sub.header = std::move(sub.forward);
        sub.forward.clear();
        ++pos_;
        continue;
      }
      if (l.depth == 0 && l.text == kReverseBanner) {
        current = &sub.reverse;
        ++pos_;
        continue;
      }
      if (l.depth == 1 && starts_with(l.text, "return ")) {
        sub.result = l.text.substr(7);
        ++pos_;
        return sub;
      }
      if (l.depth != 1) fail(l, "unexpected indentation");
      current->push_back(statement(1));
    }
  }

  Block block(int depth) {
    Block out;
    while (pos_ < lines_.size() && lines_[pos_].depth == depth) {
      if (lines_[pos_].text == "pass") {
        ++pos_;
        continue;
      }
      if (lines_[pos_].text == "else :") break;
      out.push_back(statement(depth));
    }
    if (pos_ < lines_.size() && lines_[pos_].depth > depth) fail(lines_[pos_], "unexpected indentation");
    return out;
  }

  Stmt statement(int depth) {
    const Line& l = lines_[pos_++];
    const std::string& t = l.text;
    if (starts_with(t, "#pragma ")) {
      auto kind = t.substr(8);
      if (kind != "noprimal" && kind != "notbr") fail(l, "unknown pragma");
      return Stmt{Pragma{kind == "noprimal" ? PragmaKind::NoPrimal : PragmaKind::NoTbr}};
    }
    if (starts_with(t, "# ")) return comment(t.substr(2));
    if (starts_with(t, "if ") && ends_with(t, " :")) {
      If out{ExprReader(std::string_view(t).substr(3, t.size() - 5), l.number).full(), {}, {}};
      out.then_body = block(depth + 1);
      if (pos_ >= lines_.size() || lines_[pos_].depth != depth || lines_[pos_].text != "else :")
        fail(l, "if without else");
      ++pos_;
      out.else_body = block(depth + 1);
      return Stmt{std::move(out)};
    }
    if (starts_with(t, "while ") && ends_with(t, " :")) {
      While out{ExprReader(std::string_view(t).substr(6, t.size() - 8), l.number).full(), {}};
      out.body = block(depth + 1);
      return Stmt{std::move(out)};
    }
    if (starts_with(t, "for ") && ends_with(t, " :")) {
      auto in = t.find(" in ");
      if (in == std::string::npos) fail(l, "malformed for");
      For out;
      out.var = t.substr(4, in - 4);
      std::string_view rest = std::string_view(t).substr(in + 4, t.size() - in - 4 - 2);
      if (starts_with(rest, "reversed(range(") && ends_with(rest, ") )")) {
        out.reversed = true;
        rest = rest.substr(15, rest.size() - 18);
      } else if (starts_with(rest, "range(") && ends_with(rest, ")")) {
        rest = rest.substr(6, rest.size() - 7);
      } else {
        fail(l, "malformed range");
      }
      out.bound = ExprReader(rest, l.number).full();
      out.body = block(depth + 1);
      return Stmt{std::move(out)};
    }
    // assignment: first '=' not part of a comparison operator
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (t[i] != '=') continue;
      bool cmp = (i > 0 && (t[i - 1] == '<' || t[i - 1] == '>' || t[i - 1] == '!' || t[i - 1] == '=')) ||
                 (i + 1 < t.size() && t[i + 1] == '=');
      if (cmp) break;
      auto target = ExprReader(std::string_view(t).substr(0, i), l.number).full();
      if (!std::holds_alternative<Name>(target->node) && !std::holds_alternative<Index>(target->node))
        fail(l, "invalid assignment target");
      return assign(target, ExprReader(std::string_view(t).substr(i + 1), l.number).full());
    }
    return eval(ExprReader(t, l.number).full());
  }

  std::vector<Line> lines_;
  std::size_t pos_ = 0;
};

}  // namespace

Program read_target(std::string_view text) {
  std::vector<Line> lines;
  int number = 0;
  while (!text.empty()) {
    auto nl = text.find('\n');
    std::string_view raw = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++number;
    if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);
    auto first = raw.find_first_not_of(' ');
    if (first == std::string_view::npos) continue;
    if (first % 2 != 0) throw CompileError(ErrorCode::Syntax, "odd indentation", number);
    lines.push_back({number, static_cast<int>(first / 2), std::string(raw.substr(first))});
  }
  return Reader(std::move(lines)).program();
}

}  // namespace sl
