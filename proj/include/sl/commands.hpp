#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "sl/interp.hpp"
#include "sl/target.hpp"

namespace sl {

enum class Command { Compile, Run, Gradcheck };

inline constexpr int kExitOk = 0;
inline constexpr int kExitCompileError = 1;
inline constexpr int kExitRuntimeError = 2;
inline constexpr int kExitGradcheckFailure = 3;

struct CliConfig {
  Command command = Command::Run;
  std::string input;
  std::string output_dir = ".";
  /// Primal entry subprogram; empty selects the last one in the script.
  std::string entry;
  std::vector<double> x{100.0, 0.05, 0.2, 100.0};
  std::size_t M = 10000;
  std::uint64_t seed = 42;
  double h = 1e-3;
  /// Relative central-difference step.
  double eps = 1e-4;
  bool no_pragmas = false;
  bool strict_kinks = false;
  /// `run` prints a_x instead of the primal outputs.
  bool adjoint = false;
  std::size_t out_len = 1;
  /// Values of passive entry parameters; unlisted ones receive M.
  std::map<std::string, double> passive;
};

/// Throws std::invalid_argument when eps <= 0, M == 0, h <= 0 or out_len == 0.
void validate(const CliConfig& cfg);

/// Binds the parameters of a primal entry and its adjoint. The first active
/// parameter receives x, the returned parameter is the output vector (zero
/// initialized, length out_len), further active parameters get zero vectors of
/// length out_len and passive parameters take their `passive` value or M.
class EntryRunner {
 public:
  EntryRunner(const target::Program& program, const CliConfig& cfg);

  struct AdjointResult {
    std::vector<double> a_x;
    ExecStats stats;
    std::size_t pushes = 0;
  };

  const std::string& entry() const { return entry_; }

  std::vector<double> primal(std::span<const double> x, ExecStats* stats = nullptr) const;
  /// Runs a_<entry> with output adjoint a_y and initial input adjoint a_x0
  /// (zeros when empty).
  AdjointResult adjoint(std::span<const double> x, std::span<const double> a_y,
                        std::span<const double> a_x0 = {}) const;

 private:
  std::vector<Value> bind(const target::Subprogram& sub, std::span<const double> x, std::span<const double> a_x,
                          std::span<const double> a_y, VectorRef* x_out, VectorRef* y_out) const;
  RunOptions run_options() const;

  const target::Program& program_;
  CliConfig cfg_;
  std::string entry_;
  std::string input_;
  std::string output_;
};

struct GradcheckRow {
  std::size_t component = 0;
  double x = 0.0;
  double adjoint = 0.0;
  double fd = 0.0;
  double error = 0.0;
  bool absolute = false;  // |fd| < 1e-12, error is absolute
  bool skipped = false;   // x_i == 0
  bool passed = false;
};

struct GradcheckReport {
  std::vector<GradcheckRow> rows;
  std::size_t kinks = 0;
  bool passed = false;
};

inline constexpr double kGradcheckTolerance = 1e-3;

/// Adjoint (seed e_1) against central differences of the primal, evaluated
/// concurrently on independent interpreters.
GradcheckReport gradcheck(const target::Program& program, const CliConfig& cfg,
                          double tolerance = kGradcheckTolerance);

int cmd_compile(const CliConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_run(const CliConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_gradcheck(const CliConfig& cfg, std::ostream& out, std::ostream& err);
int run_command(const CliConfig& cfg, std::ostream& out, std::ostream& err);

}  // namespace sl
