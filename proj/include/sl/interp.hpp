#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "sl/externals.hpp"
#include "sl/runtime.hpp"
#include "sl/target.hpp"

namespace sl {

struct RunOptions {
  SmoothingConfig smoothing;
  std::uint64_t seed = 42;
  /// Turn near-kink d_gt0 evaluations into errors instead of counting them.
  bool strict_kinks = false;
  /// Run only the header and forward section of an adjoint entry.
  bool forward_only = false;
};

struct ExecStats {
  std::size_t kinks = 0;  // d_gt0 evaluations with |x| <= h
  std::size_t divisions_by_zero = 0;
  std::size_t while_iterations = 0;
  std::map<std::string, std::size_t> for_iterations;  // keyed by loop variable
};

/// Tree-walking executor for target programs. Scalars are passed by value,
/// vectors by reference.
class Interpreter {
 public:
  Interpreter(const target::Program& program, TapeStacks& stacks, RunOptions options = {},
              const ExternalRegistry& externals = ExternalRegistry::builtin());

  /// Calls `entry`. After an adjoint entry returns every tape must be empty.
  Value run(std::string_view entry, std::vector<Value> args);

  const ExecStats& stats() const { return stats_; }

 private:
  using Frame = std::unordered_map<std::string, Value>;

  Value call_subprogram(const target::Subprogram& sub, std::vector<Value> args, bool entry);
  Value call(const target::Call& c, Frame& frame);
  Value eval(const target::Expr& e, Frame& frame);
  double scalar(const target::Expr& e, Frame& frame);
  std::size_t index_value(const target::Expr& e, Frame& frame, std::size_t size, const std::string& base);
  std::size_t count_value(const target::Expr& e, Frame& frame, const char* what);
  void exec(const target::Block& block, Frame& frame);
  void exec(const target::Stmt& stmt, Frame& frame);
  Value& lookup(Frame& frame, const std::string& id);

  const target::Program& program_;
  TapeStacks& stacks_;
  RunOptions options_;
  const ExternalRegistry& externals_;
  std::unordered_map<std::string, const target::Subprogram*> subprograms_;
  ExecStats stats_;
  int depth_ = 0;
};

/// One-shot execution of `entry`.
Value exec_program(const target::Program& program, std::string_view entry, std::vector<Value> args,
                   TapeStacks& stacks, const RunOptions& options = {}, ExecStats* stats = nullptr,
                   const ExternalRegistry& externals = ExternalRegistry::builtin());

}  // namespace sl
