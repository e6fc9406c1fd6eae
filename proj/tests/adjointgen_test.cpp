#include <doctest.h>

#include <string>
#include <vector>

#include "sl/activity.hpp"
#include "sl/adjointgen.hpp"
#include "sl/compiler.hpp"
#include "sl/emitter.hpp"

using namespace sl;
using namespace sl::target;

namespace {

std::vector<std::string> lines(const Block& b) {
  std::vector<std::string> out;
  for (const auto& s : b) out.push_back(format_stmt(s, 0));
  return out;
}

const Subprogram& adjoint(const CompileResult& r, const std::string& name) {
  const auto* s = r.program.find(name);
  REQUIRE(s != nullptr);
  return *s;
}

ErrorCode error_of(std::string_view src) {
  try {
    compile(src);
  } catch (const CompileError& e) {
    return e.code();
  }
  FAIL("compiled without error: " << src);
  return ErrorCode::Lex;
}

bool contains(const std::vector<std::string>& v, const std::string& s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

}  // namespace

TEST_CASE("case convention") {
  CHECK(classify_symbol("x") == Activity::Active);
  CHECK(classify_symbol("_tmp") == Activity::Active);
  CHECK(classify_symbol("M") == Activity::Passive);
  CHECK(classify_symbol("I") == Activity::Passive);
}

TEST_CASE("variedness is a disjunction") {
  CHECK(propagate_variedness({true, false}));
  CHECK_FALSE(propagate_variedness({}));
  CHECK_FALSE(propagate_variedness({false, false}));
}

TEST_CASE("activity checks") {
  CHECK_NOTHROW(check_condition_passive(false, 1));
  CHECK_THROWS_AS(check_condition_passive(true, 1), CompileError);
  CHECK_NOTHROW(check_assignment_activity(true, true, 1));
  CHECK_THROWS_AS(check_assignment_activity(false, true, 1), CompileError);
  CHECK_NOTHROW(check_assignment_activity(false, false, 1));
  CHECK_THROWS_AS(check_index_passive(true, 1), CompileError);
}

TEST_CASE("compile-time activity errors") {
  CHECK(error_of("def f(x) {\n if x[0]<1.0 { x[0]=1.0 } else { x[0]=2.0 }\n return x\n}") ==
        ErrorCode::ActiveBranch);
  CHECK(error_of("def f(x,N) {\n while N<x[0] { N=N-1.0 }\n return x\n}") == ErrorCode::ActiveBranch);
  CHECK(error_of("def f(x,N) {\n N=x[0]\n return x\n}") == ErrorCode::ActiveToPassive);
  CHECK(error_of("def f(x) {\n t=x[1]\n x[0]=x[t]\n return x\n}") == ErrorCode::ActiveIndex);
  CHECK(error_of("def f(x,M) {\n for i in range(M) { x[0]=x[0]*2.0 }\n return x\n}") ==
        ErrorCode::ActiveLoopVariable);
  CHECK_NOTHROW(compile("def f(x,I,N) {\n while I<N { I=I+1.0 }\n return x\n}"));
}

TEST_CASE("semantic errors") {
  CHECK(error_of("def f(x) {\n x[0]=q\n return x\n}") == ErrorCode::Semantic);               // undefined
  CHECK(error_of("def f(N) {\n N=N+1.0\n return N\n}") == ErrorCode::Semantic);              // no active param
  CHECK(error_of("def f(x,M) {\n s=[0.0]*M\n s=[0.0]*M\n return x\n}") == ErrorCode::Semantic);  // realloc
  CHECK(error_of("def f(x) {\n v=x[0]\n return x\n}") == ErrorCode::Semantic);               // reserved
  CHECK(error_of("def f(x) {\n a_x=x[0]\n return x\n}") == ErrorCode::Semantic);
  CHECK(error_of("def f(x,y) {\n y=g(x,y)\n return y\n}") == ErrorCode::Semantic);           // unknown callee
}

TEST_CASE("leaf, binary and intrinsic attributes") {
  SubprogramCtx ctx;
  auto d1 = synth_leaf(LeafKind::Indexed, index_at("d", 1), true, ctx);
  CHECK(d1.j == 0);
  CHECK(lines(d1.s) == std::vector<std::string>{"v[0]=d[1]"});
  CHECK(lines(d1.a) == std::vector<std::string>{"a_d[1]=a_d[1]+a_v[0]", "a_v[0]=0.0"});

  auto d0 = synth_leaf(LeafKind::Indexed, index_at("d", 0), true, ctx);
  auto diff = synth_binary('-', d1, d0, ctx);
  CHECK(diff.j == 2);
  CHECK(lines(diff.s).back() == "v[2]=v[0]-v[1]");
  auto a = lines(diff.a);
  REQUIRE(a.size() >= 3);
  CHECK(std::vector<std::string>(a.begin(), a.begin() + 3) ==
        std::vector<std::string>{"a_v[0]=a_v[0]+a_v[2]", "a_v[1]=a_v[1]-a_v[2]", "a_v[2]=0.0"});

  auto g = synth_intrinsic("gt0", diff, ctx, 1);
  CHECK(g.j == 3);
  CHECK(lines(g.s).back() == "v[3]=gt0(v[2])");
  CHECK(lines(g.a).at(0) == "a_v[2]=a_v[2]+d_gt0(v[2])*a_v[3]");
  CHECK(lines(g.a).at(1) == "a_v[3]=0.0");
}

TEST_CASE("product and exp partials") {
  SubprogramCtx ctx;
  auto l = synth_leaf(LeafKind::Variable, name("t"), true, ctx);
  auto r = synth_leaf(LeafKind::Variable, name("u"), true, ctx);
  auto p = synth_binary('*', l, r, ctx);
  auto pa = lines(p.a);
  CHECK(std::vector<std::string>(pa.begin(), pa.begin() + 3) ==
        std::vector<std::string>{"a_v[0]=a_v[0]+v[1]*a_v[2]", "a_v[1]=a_v[1]+v[0]*a_v[2]", "a_v[2]=0.0"});

  SubprogramCtx ctx2;
  auto e = synth_intrinsic("exp", synth_leaf(LeafKind::Variable, name("t"), true, ctx2), ctx2, 1);
  CHECK(lines(e.a).at(0) == "a_v[0]=a_v[0]+d_exp(v[0])*a_v[1]");
  CHECK(lines(e.a).at(1) == "a_v[1]=0.0");
}

TEST_CASE("passive expressions have no adjoint") {
  SubprogramCtx ctx;
  auto m = synth_leaf(LeafKind::Variable, name("M"), false, ctx);
  CHECK(lines(m.s) == std::vector<std::string>{"v[0]=M"});
  CHECK(m.a.empty());
  auto lit = synth_leaf(LeafKind::Literal, number("0.0"), false, ctx);
  CHECK(lines(lit.s) == std::vector<std::string>{"v[1]=0.0"});
  CHECK(synth_binary('*', m, lit, ctx).a.empty());
  CHECK(synth_intrinsic("exp", m, ctx, 1).a.empty());
}

TEST_CASE("payoff under noprimal") {
  auto r = compile("def payoff (d,p) {\n  #pragma noprimal\n  p[0]=gt0(d[1]-d[0])\n  return p\n}\n");
  const auto& a = adjoint(r, "a_payoff");
  CHECK(a.params == std::vector<std::string>{"d", "a_d", "p", "a_p"});
  CHECK(a.result == "a_d");
  CHECK(lines(a.header) == std::vector<std::string>{"v=[0.0]*4", "a_v=[0.0]*4"});
  CHECK(lines(a.forward) == std::vector<std::string>{"# p[0]=gt0(d[1]-d[0]) omitted due to #pragma noprimal"});
  auto rev = lines(a.reverse);
  std::vector<std::string> head(rev.begin(), rev.begin() + 8);
  CHECK(head == std::vector<std::string>{"v[0]=d[1]", "v[1]=d[0]", "v[2]=v[0]-v[1]", "v[3]=gt0(v[2])",
                                         "a_v[3]=a_v[3]+a_p[0]", "a_p[0]=0.0",
                                         "a_v[2]=a_v[2]+d_gt0(v[2])*a_v[3]", "a_v[3]=0.0"});
}

TEST_CASE("default assignment tapes the overwritten value") {
  auto r = compile("def f(x,y) {\n  y[0]=y[0]*x[0]\n  return y\n}\n");
  const auto& a = adjoint(r, "a_f");
  CHECK(lines(a.forward) == std::vector<std::string>{"push_s(y[0])", "y[0]=y[0]*x[0]"});
  CHECK(lines(a.reverse).at(0) == "y[0]=pop_s()");
}

TEST_CASE("notbr suppresses the push and the pop") {
  auto r = compile("def f(x,y) {\n  #pragma notbr\n  y[0]=y[0]+exp(-x[1])\n  return y\n}\n");
  const auto& a = adjoint(r, "a_f");
  auto fwd = lines(a.forward);
  CHECK(fwd == std::vector<std::string>{"# push_v(y) omitted due to #pragma notbr", "y[0]=y[0]+exp(-x[1])"});
  auto rev = lines(a.reverse);
  CHECK(rev.at(0) == "# y=pop_v() omitted due to #pragma notbr");
  for (const auto& l : rev) CHECK(l.find("pop_s") == std::string::npos);
}

TEST_CASE("passive assignment with a pragma") {
  auto r = compile("def f(x,y,M) {\n  #pragma notbr\n  K2=M*2.0\n  y[0]=x[0]*K2\n  return y\n}\n");
  const auto& a = adjoint(r, "a_f");
  CHECK(contains(lines(a.forward), "K2=M*2.0"));
  CHECK_FALSE(contains(lines(a.forward), "push_s(K2)"));
  CHECK(r.warnings.empty());
}

TEST_CASE("allocation") {
  auto r = compile("def f(x,y,M) {\n  s=[0.0]*M\n  P=[0.0]*2\n  y[0]=x[0]\n  return y\n}\n");
  CHECK(lines(adjoint(r, "a_f").forward) ==
        std::vector<std::string>{"s=[0.0]*M", "a_s=[0.0]*M", "P=[0.0]*2", "push_s(y[0])", "y[0]=x[0]"});
}

TEST_CASE("if reversal pushes one flag per branch level") {
  auto r = compile(
      "def f(x,y,N) {\n"
      "  if N<1.0 {\n    if N<0.0 { y[0]=x[0] } else { y[0]=x[1] }\n  } else {\n    A=2.0\n  }\n"
      "  return y\n}\n");
  auto text = emit(r.program, EmitMode::Adjoint);
  CHECK(text.find("push_c(1)") != std::string::npos);
  CHECK(text.find("push_c(0)") != std::string::npos);
  CHECK(text.find("if pop_c()==1 :") != std::string::npos);
}

TEST_CASE("while reversal counts iterations") {
  auto r = compile("def f(x,N) {\n  while N>0.0 {\n    N=N-1.0\n  }\n  return x\n}\n");
  auto a = adjoint(r, "a_f");
  auto fwd = lines(a.forward);
  CHECK(contains(fwd, "C0=0"));
  CHECK(contains(fwd, "push_c(C0)"));
  CHECK(lines(a.reverse).at(0).rfind("for C0 in range(pop_c()) :", 0) == 0);
}

TEST_CASE("for reversal") {
  auto r = compile("def f(x,M) {\n  for I in range(M) {\n    x[0]=x[0]*x[1]\n  }\n  return x\n}\n");
  CHECK(lines(adjoint(r, "a_f").reverse).at(0).rfind("for I in reversed(range(M) ) :", 0) == 0);
}

TEST_CASE("calls") {
  auto r = compile(
      "def g(d,p) {\n  p[0]=d[0]*d[1]\n  return p\n}\n"
      "def f(x,y) {\n  p=[0.0]*1\n  p=g(x,p)\n  y[0]=p[0]\n  return y\n}\n");
  const auto& a = adjoint(r, "a_f");
  auto fwd = lines(a.forward);
  CHECK(contains(fwd, "push_v(p)"));
  CHECK(contains(fwd, "p=g(x,p)"));
  auto rev = lines(a.reverse);
  auto pop = std::find(rev.begin(), rev.end(), "p=pop_v()");
  auto call = std::find(rev.begin(), rev.end(), "a_x=a_g(x,a_x,p,a_p)");
  CHECK(pop != rev.end());
  CHECK(call == pop + 1);

  auto mc = compile("def f(x,y,M) {\n  s=[0.0]*M\n  s=mc(x,s,M)\n  y[0]=s[0]\n  return y\n}\n");
  CHECK(contains(lines(adjoint(mc, "a_f").reverse), "a_x=a_mc(x,a_x,s,a_s,M)"));
}

TEST_CASE("case study signatures") {
  CompileOptions opts;
  auto r = compile(
      "def payoff (d,p) {\n  p[0]=gt0(d[1]-d[0])\n  return p\n}\n"
      "def black_scholes_call (x,y,M) {\n  y[0]=x[0]\n  return y\n}\n",
      opts);
  CHECK(adjoint(r, "a_black_scholes_call").params == std::vector<std::string>{"x", "a_x", "y", "a_y", "M"});
  CHECK(adjoint(r, "a_black_scholes_call").result == "a_x");
  REQUIRE(r.program.subprograms.size() == 4);
  CHECK(r.program.subprograms[0].name == "payoff");
  CHECK(r.program.subprograms[1].name == "a_payoff");
}

TEST_CASE("pragma flags are one-shot") {
  auto r = compile("def f(x,y) {\n  #pragma notbr\n  y[0]=x[0]\n  y[0]=y[0]*x[1]\n  return y\n}\n");
  auto fwd = lines(adjoint(r, "a_f").forward);
  CHECK(std::count(fwd.begin(), fwd.end(), "push_s(y[0])") == 1);
}

TEST_CASE("dangling and repeated pragmas warn") {
  auto r = compile("def f(x,y) {\n  y[0]=x[0]\n  #pragma notbr\n  return y\n}\n");
  CHECK(r.warnings.size() == 1);
  auto r2 = compile("def f(x,y) {\n  #pragma notbr\n  #pragma notbr\n  y[0]=x[0]\n  return y\n}\n");
  CHECK(r2.warnings.size() == 1);
}

TEST_CASE("no-pragmas build ignores every pragma") {
  CompileOptions opts;
  opts.honor_pragmas = false;
  auto r = compile("def f(x,y,M) {\n  s=[0.0]*M\n  #pragma notbr\n  s=mc(x,s,M)\n  y[0]=s[0]\n  return y\n}\n", opts);
  const auto& a = adjoint(r, "a_f");
  CHECK(contains(lines(a.forward), "push_v(s)"));
  CHECK(contains(lines(a.reverse), "s=pop_v()"));
}

TEST_CASE("max_sac covers every slot") {
  auto r = compile("def f(x,y) {\n  y[0]=x[0]*x[1]+exp(x[2])\n  t=x[0]\n  return y\n}\n");
  const auto& a = adjoint(r, "a_f");
  CHECK(lines(a.header).at(0) == "v=[0.0]*6");
}
