#include "sl/commands.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "sl/activity.hpp"
#include "sl/compiler.hpp"
#include "sl/emitter.hpp"

namespace sl {

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt6(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6e", v);
  return buf;
}

CompileResult compile_file(const CliConfig& cfg, std::ostream& err) {
  CompileOptions opts;
  opts.honor_pragmas = !cfg.no_pragmas;
  auto result = compile(read_file(cfg.input), opts);
  for (const auto& w : result.warnings) err << format_warning(w) << '\n';
  return result;
}

// Shared error mapping of the three commands.
template <typename F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const CompileError& e) {
    err << e.what() << '\n';
    return kExitCompileError;
  } catch (const RuntimeError& e) {
    err << "runtime error: " << e.what() << '\n';
    return kExitRuntimeError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntimeError;
  }
}

}  // namespace

void validate(const CliConfig& cfg) {
  if (!(cfg.eps > 0)) throw std::invalid_argument("--eps must be positive");
  if (cfg.M == 0) throw std::invalid_argument("--M must be at least 1");
  if (!(cfg.h > 0)) throw std::invalid_argument("--h must be positive");
  if (cfg.out_len == 0) throw std::invalid_argument("--out-len must be at least 1");
}

EntryRunner::EntryRunner(const target::Program& program, const CliConfig& cfg) : program_(program), cfg_(cfg) {
  validate(cfg_);
  const target::Subprogram* sub = nullptr;
  if (cfg_.entry.empty()) {
    for (const auto& s : program_.subprograms)
      if (s.kind == target::SubprogramKind::Primal) sub = &s;
    if (!sub) throw RuntimeError("script defines no subprogram");
  } else {
    sub = program_.find(cfg_.entry);
    if (!sub || sub->kind != target::SubprogramKind::Primal)
      throw RuntimeError("no subprogram named '" + cfg_.entry + "'");
  }
  entry_ = sub->name;
  output_ = sub->result;
  for (const auto& p : sub->params)
    if (is_active(p)) {
      input_ = p;
      break;
    }
  if (input_.empty()) throw RuntimeError("entry '" + entry_ + "' has no active parameter");
  if (input_ == output_) throw RuntimeError("entry '" + entry_ + "' returns its input vector");
}

RunOptions EntryRunner::run_options() const {
  RunOptions opts;
  opts.smoothing.h = cfg_.h;
  opts.seed = cfg_.seed;
  opts.strict_kinks = cfg_.strict_kinks;
  return opts;
}

std::vector<Value> EntryRunner::bind(const target::Subprogram& sub, std::span<const double> x,
                                     std::span<const double> a_x, std::span<const double> a_y, VectorRef* x_out,
                                     VectorRef* y_out) const {
  std::vector<Value> args;
  for (const auto& p : sub.params) {
    if (p == input_) {
      args.push_back(make_vector(Vector(x.begin(), x.end())));
    } else if (p == "a_" + input_) {
      Vector v(x.size(), 0.0);
      for (std::size_t i = 0; i < a_x.size() && i < v.size(); ++i) v[i] = a_x[i];
      args.push_back(make_vector(std::move(v)));
      if (x_out) *x_out = std::get<VectorRef>(args.back());
    } else if (p == "a_" + output_) {
      Vector v(cfg_.out_len, 0.0);
      for (std::size_t i = 0; i < a_y.size() && i < v.size(); ++i) v[i] = a_y[i];
      args.push_back(make_vector(std::move(v)));
    } else if (is_active(p)) {
      args.push_back(make_vector(Vector(cfg_.out_len, 0.0)));
      if (p == output_ && y_out) *y_out = std::get<VectorRef>(args.back());
    } else {
      auto it = cfg_.passive.find(p);
      args.push_back(it != cfg_.passive.end() ? it->second : static_cast<double>(cfg_.M));
    }
  }
  return args;
}

std::vector<double> EntryRunner::primal(std::span<const double> x, ExecStats* stats) const {
  const auto* sub = program_.find(entry_);
  VectorRef y;
  auto args = bind(*sub, x, {}, {}, nullptr, &y);
  TapeStacks stacks;
  exec_program(program_, entry_, std::move(args), stacks, run_options(), stats);
  return *y;
}

EntryRunner::AdjointResult EntryRunner::adjoint(std::span<const double> x, std::span<const double> a_y,
                                                std::span<const double> a_x0) const {
  const auto* sub = program_.find("a_" + entry_);
  if (!sub) throw RuntimeError("no adjoint of '" + entry_ + "'");
  VectorRef a_x;
  auto args = bind(*sub, x, a_x0, a_y, &a_x, nullptr);
  TapeStacks stacks;
  AdjointResult out;
  exec_program(program_, sub->name, std::move(args), stacks, run_options(), &out.stats);
  out.a_x = *a_x;
  out.pushes = stacks.push_count();
  return out;
}

GradcheckReport gradcheck(const target::Program& program, const CliConfig& cfg, double tolerance) {
  EntryRunner runner(program, cfg);
  const std::vector<double>& x = cfg.x;
  const std::vector<double> e1{1.0};

  auto adjoint = std::async(std::launch::async, [&] { return runner.adjoint(x, e1); });
  struct Pending {
    std::future<std::vector<double>> plus, minus;
    double step = 0.0;
  };
  std::vector<Pending> fd(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] == 0.0) continue;
    fd[i].step = cfg.eps * std::fabs(x[i]);
    auto shifted = [&runner, x, i](double delta) {
      auto xs = x;
      xs[i] += delta;
      return runner.primal(xs);
    };
    fd[i].plus = std::async(std::launch::async, shifted, fd[i].step);
    fd[i].minus = std::async(std::launch::async, shifted, -fd[i].step);
  }

  GradcheckReport report;
  auto adj = adjoint.get();
  report.kinks = adj.stats.kinks;
  report.passed = true;
  for (std::size_t i = 0; i < x.size(); ++i) {
    GradcheckRow row;
    row.component = i;
    row.x = x[i];
    row.adjoint = i < adj.a_x.size() ? adj.a_x[i] : 0.0;
    if (x[i] == 0.0) {
      row.skipped = true;
      row.passed = true;
      report.rows.push_back(row);
      continue;
    }
    double yp = fd[i].plus.get().at(0);
    double ym = fd[i].minus.get().at(0);
    row.fd = (yp - ym) / (2.0 * fd[i].step);
    row.absolute = std::fabs(row.fd) < 1e-12;
    row.error = std::fabs(row.adjoint - row.fd) / (row.absolute ? 1.0 : std::fabs(row.fd));
    row.passed = row.error <= tolerance;
    report.passed = report.passed && row.passed;
    report.rows.push_back(row);
  }
  return report;
}

int cmd_compile(const CliConfig& cfg, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    auto result = compile_file(cfg, err);
    namespace fs = std::filesystem;
    fs::path dir(cfg.output_dir);
    fs::create_directories(dir);
    std::string stem = fs::path(cfg.input).stem().string();
    auto write = [&](const std::string& suffix, EmitMode mode) {
      fs::path path = dir / (stem + suffix);
      std::ofstream f(path, std::ios::binary);
      if (!f) throw std::runtime_error("cannot write '" + path.string() + "'");
      f << emit(result.program, mode);
      out << path.string() << '\n';
    };
    write(".primal.txt", EmitMode::Primal);
    write(".adjoint.txt", EmitMode::Adjoint);
    return kExitOk;
  });
}

int cmd_run(const CliConfig& cfg, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    auto result = compile_file(cfg, err);
    EntryRunner runner(result.program, cfg);
    std::vector<double> values;
    ExecStats stats;
    if (cfg.adjoint) {
      std::vector<double> e1{1.0};
      auto adj = runner.adjoint(cfg.x, e1);
      values = adj.a_x;
      stats = adj.stats;
    } else {
      values = runner.primal(cfg.x, &stats);
    }
    for (double v : values) out << fmt17(v) << '\n';
    if (stats.kinks) err << "warning: " << stats.kinks << " d_gt0 evaluations within h of the kink\n";
    if (stats.divisions_by_zero) err << "warning: " << stats.divisions_by_zero << " divisions by zero\n";
    return kExitOk;
  });
}

int cmd_gradcheck(const CliConfig& cfg, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    auto result = compile_file(cfg, err);
    auto report = gradcheck(result.program, cfg);
    out << "i  x                        adjoint                  fd                       error        status\n";
    for (const auto& r : report.rows) {
      if (r.skipped) {
        err << "warning: component " << r.component << " skipped (x_i = 0)\n";
        out << r.component << "  " << fmt17(r.x) << "  " << fmt17(r.adjoint) << "  -  -  skipped\n";
        continue;
      }
      out << r.component << "  " << fmt17(r.x) << "  " << fmt17(r.adjoint) << "  " << fmt17(r.fd) << "  "
          << fmt6(r.error) << (r.absolute ? " (abs)" : "") << "  " << (r.passed ? "ok" : "FAIL") << '\n';
    }
    out << "kinks: " << report.kinks << '\n';
    return report.passed ? kExitOk : kExitGradcheckFailure;
  });
}

int run_command(const CliConfig& cfg, std::ostream& out, std::ostream& err) {
  switch (cfg.command) {
    case Command::Compile: return cmd_compile(cfg, out, err);
    case Command::Run: return cmd_run(cfg, out, err);
    case Command::Gradcheck: return cmd_gradcheck(cfg, out, err);
  }
  return kExitRuntimeError;
}

}  // namespace sl
