#include "support.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>
#include <stdexcept>

#include "sl/emitter.hpp"

namespace sltest {

std::string repo_path(std::string_view rel) { return std::string(SL_SOURCE_DIR) + "/" + std::string(rel); }

std::string read_text(std::string_view rel) {
  std::ifstream in(repo_path(rel), std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + std::string(rel));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

sl::CompileResult compile_path(std::string_view rel, bool honor_pragmas) {
  sl::CompileOptions opts;
  opts.honor_pragmas = honor_pragmas;
  return sl::compile(read_text(rel), opts);
}

std::vector<std::string> normalized_statements(std::string_view text) {
  std::vector<std::string> out;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    std::string piece;
    auto flush = [&] {
      if (!piece.empty()) out.push_back(piece);
      piece.clear();
    };
    bool comment = false;
    for (char c : line) {
      if (c == '#') comment = true;
      if (c == ';' && !comment) {
        flush();
        continue;
      }
      if (!std::isspace(static_cast<unsigned char>(c))) piece += c;
    }
    flush();
  }
  return out;
}

GoldenReport check_golden(std::string_view listing, std::string_view emitted) {
  GoldenReport report;
  for (auto& s : normalized_statements(listing))
    if (s != "..." && s != "#sac" && s != "#adjointsac") report.expected.push_back(s);
  auto have = normalized_statements(emitted);

  // longest common subsequence
  const auto& e = report.expected;
  std::vector<std::vector<int>> t(e.size() + 1, std::vector<int>(have.size() + 1, 0));
  for (std::size_t i = e.size(); i-- > 0;)
    for (std::size_t j = have.size(); j-- > 0;)
      t[i][j] = e[i] == have[j] ? t[i + 1][j + 1] + 1 : std::max(t[i + 1][j], t[i][j + 1]);
  std::vector<bool> matched(e.size(), false);
  for (std::size_t i = 0, j = 0; i < e.size() && j < have.size();) {
    if (e[i] == have[j]) {
      matched[i] = true;
      ++i;
      ++j;
    } else if (t[i + 1][j] >= t[i][j + 1]) {
      ++i;
    } else {
      ++j;
    }
  }
  for (std::size_t i = 0; i < e.size(); ++i) {
    if (matched[i]) continue;
    bool present = std::find(have.begin(), have.end(), e[i]) != have.end();
    (present ? report.reordered : report.missing).push_back(e[i]);
  }
  return report;
}

namespace {

using namespace sl::target;

bool is_sac_adjoint(const Expr& e, int& slot) {
  auto* ix = std::get_if<Index>(&e.node);
  if (!ix || ix->base != "a_v") return false;
  auto* n = std::get_if<Number>(&ix->index->node);
  if (!n) return false;
  slot = static_cast<int>(n->value);
  return true;
}

bool is_adjoint_target(const Stmt& s) {
  auto* a = std::get_if<Assign>(&s.node);
  if (!a) return false;
  const auto& base = base_name(*a->target);
  return base.rfind("a_", 0) == 0 && !std::holds_alternative<Call>(a->value->node);
}

bool is_zero(const Expr& e) {
  auto* n = std::get_if<Number>(&e.node);
  return n && n->value == 0.0;
}

void scan(const Block& block, const std::string& where, std::vector<std::string>& out) {
  std::vector<int> dirty;
  auto check = [&](const std::string& at) {
    for (int k : dirty) out.push_back(where + ": a_v[" + std::to_string(k) + "] not reset before " + at);
    dirty.clear();
  };
  for (const auto& s : block) {
    if (is_adjoint_target(s)) {
      const auto& a = std::get<Assign>(s.node);
      int k = 0;
      if (is_sac_adjoint(*a.target, k)) {
        dirty.erase(std::remove(dirty.begin(), dirty.end(), k), dirty.end());
        if (!is_zero(*a.value)) dirty.push_back(k);
      }
      continue;
    }
    check("'" + sl::stmt_text(s).substr(0, sl::stmt_text(s).find('\n')) + "'");
    if (auto* i = std::get_if<If>(&s.node)) {
      scan(i->then_body, where, out);
      scan(i->else_body, where, out);
    } else if (auto* w = std::get_if<While>(&s.node)) {
      scan(w->body, where, out);
    } else if (auto* f = std::get_if<For>(&s.node)) {
      scan(f->body, where, out);
    }
  }
  check("end of block");
}

}  // namespace

std::vector<std::string> reset_violations(const Program& program) {
  std::vector<std::string> out;
  for (const auto& sub : program.subprograms)
    if (sub.kind == SubprogramKind::Adjoint) scan(sub.reverse, sub.name, out);
  return out;
}

std::uint64_t NormalStream::step() {
  std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

double NormalStream::next() {
  const double scale = 1.0 / 9007199254740992.0;
  double u1 = static_cast<double>(step() >> 11) * scale;
  double u2 = static_cast<double>(step() >> 11) * scale;
  if (u1 == 0.0) u1 = scale;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

struct RandomScript::Node {
  enum Kind { X, T, U, Lit, Add, Sub, Mul, Div, Neg, Exp, Gt0 } kind;
  int index = 0;
  double value = 0.0;
  std::unique_ptr<Node> a, b;

  std::string text() const {
    char buf[32];
    switch (kind) {
      case X: return "x[" + std::to_string(index) + "]";
      case T: return "t";
      case U: return "u";
      case Lit:
        std::snprintf(buf, sizeof buf, "%.3f", value);
        return buf;
      case Add: return "(" + a->text() + "+" + b->text() + ")";
      case Sub: return "(" + a->text() + "-" + b->text() + ")";
      case Mul: return a->text() + "*" + b->text();
      case Div: return "(" + a->text() + ")/(" + b->text() + ")";
      case Neg: return "-(" + a->text() + ")";
      case Exp: return "exp(" + a->text() + ")";
      case Gt0: return "gt0(" + a->text() + ")";
    }
    return {};
  }

  double eval(std::span<const double> x, double t, double u, bool& ok, double margin) const {
    switch (kind) {
      case X: return x[static_cast<std::size_t>(index)];
      case T: return t;
      case U: return u;
      case Lit: return value;
      case Add: return a->eval(x, t, u, ok, margin) + b->eval(x, t, u, ok, margin);
      case Sub: return a->eval(x, t, u, ok, margin) - b->eval(x, t, u, ok, margin);
      case Mul: return a->eval(x, t, u, ok, margin) * b->eval(x, t, u, ok, margin);
      case Div: {
        double n = a->eval(x, t, u, ok, margin);
        double d = b->eval(x, t, u, ok, margin);
        if (std::fabs(d) < margin) ok = false;
        return n / d;
      }
      case Neg: return -a->eval(x, t, u, ok, margin);
      case Exp: {
        double v = a->eval(x, t, u, ok, margin);
        if (v > 20.0) ok = false;
        return std::exp(v);
      }
      case Gt0: {
        double v = a->eval(x, t, u, ok, margin);
        if (std::fabs(v) < margin) ok = false;
        return v > 0.0 ? v : 0.0;
      }
    }
    return 0.0;
  }
};

namespace {

std::unique_ptr<RandomScript::Node> random_node(std::mt19937_64& rng, int depth, int leaves) {
  using Node = RandomScript::Node;
  auto node = std::make_unique<Node>();
  std::uniform_int_distribution<int> pick(0, 9);
  if (depth <= 1 || pick(rng) < 2) {
    std::uniform_int_distribution<int> leaf(0, leaves + 3);
    int l = leaf(rng);
    if (l < 3) {
      node->kind = Node::X;
      node->index = l;
    } else if (l == 3) {
      node->kind = Node::Lit;
      node->value = std::round(std::uniform_real_distribution<double>(0.5, 2.0)(rng) * 1000.0) / 1000.0;
    } else {
      node->kind = l == 4 ? Node::T : Node::U;
    }
    return node;
  }
  static constexpr Node::Kind ops[] = {Node::Add, Node::Sub, Node::Mul, Node::Mul, Node::Div,
                                       Node::Neg, Node::Exp, Node::Gt0, Node::Add, Node::Sub};
  node->kind = ops[pick(rng)];
  node->a = random_node(rng, depth - 1, leaves);
  if (node->kind != Node::Neg && node->kind != Node::Exp && node->kind != Node::Gt0)
    node->b = random_node(rng, depth - 1, leaves);
  return node;
}

}  // namespace

RandomScript::RandomScript(std::mt19937_64& rng) {
  source_ = "def f(x,y) {\n";
  const char* lhs[] = {"t", "u", "y[0]"};
  for (int i = 0; i < 3; ++i) {
    auto n = random_node(rng, 4, i).release();
    stmts_.push_back(n);
    source_ += "  " + std::string(lhs[i]) + "=" + n->text() + "\n";
  }
  source_ += "  return y\n}\n";
}

RandomScript::~RandomScript() {
  for (auto* n : stmts_) delete n;
}

RandomScript::RandomScript(RandomScript&& other) noexcept
    : stmts_(std::move(other.stmts_)), source_(std::move(other.source_)) {
  other.stmts_.clear();
}

double RandomScript::eval(std::span<const double> x, bool& ok, double margin) const {
  ok = true;
  double t = stmts_[0]->eval(x, 0.0, 0.0, ok, margin);
  double u = stmts_[1]->eval(x, t, 0.0, ok, margin);
  double y = stmts_[2]->eval(x, t, u, ok, margin);
  if (!std::isfinite(y) || std::fabs(y) > 1e8) ok = false;
  return y;
}

}  // namespace sltest

#include "sl/commands.hpp"

namespace sltest {

double relative_error(double got, double want) {
  double d = std::fabs(got - want);
  return std::fabs(want) < 1e-12 ? d : d / std::fabs(want);
}

std::vector<RandomCheck> random_gradchecks(int count, std::uint64_t seed, double tolerance) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coord(0.3, 2.0);
  std::bernoulli_distribution sign(0.5);
  const double step = 1e-5;
  std::vector<RandomCheck> out;

  while (static_cast<int>(out.size()) < count) {
    RandomScript script(rng);
    RandomCheck check;
    bool found = false;
    for (int attempt = 0; attempt < 50 && !found; ++attempt) {
      std::vector<double> x(3);
      for (auto& v : x) v = sign(rng) ? coord(rng) : -coord(rng);
      bool ok = true;
      double y = script.eval(x, ok);
      std::vector<double> fd(3);
      for (std::size_t i = 0; i < 3 && ok; ++i) {
        double h = step * std::fabs(x[i]);
        auto xp = x, xm = x;
        xp[i] += h;
        xm[i] -= h;
        bool okp = true, okm = true;
        double yp = script.eval(xp, okp);
        double ym = script.eval(xm, okm);
        ok = okp && okm;
        fd[i] = (yp - ym) / (2 * h);
        if (fd[i] != 0.0 && std::fabs(fd[i]) < 1e-4 * std::max(1.0, std::fabs(y))) ok = false;  // ill-conditioned
      }
      if (!ok) continue;
      found = true;
      check.x = x;
      check.fd = fd;
    }
    if (!found) continue;

    check.source = script.source();
    auto program = sl::compile(check.source).program;
    sl::CliConfig cfg;
    cfg.x = check.x;
    cfg.eps = step;
    sl::EntryRunner runner(program, cfg);
    std::vector<double> e1{1.0};
    auto adj = runner.adjoint(check.x, e1);
    check.adjoint = adj.a_x;
    check.kinks = adj.stats.kinks;
    for (std::size_t i = 0; i < 3; ++i)
      check.max_error = std::max(check.max_error, relative_error(check.adjoint[i], check.fd[i]));
    check.harness_passed = sl::gradcheck(program, cfg, tolerance).passed;
    out.push_back(std::move(check));
  }
  return out;
}

}  // namespace sltest
