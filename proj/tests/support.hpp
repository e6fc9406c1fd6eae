#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sl/compiler.hpp"
#include "sl/target.hpp"

namespace sltest {

std::string repo_path(std::string_view rel);
std::string read_text(std::string_view rel);
sl::CompileResult compile_path(std::string_view rel, bool honor_pragmas = true);

/// Statement-level text of an emitted program with all whitespace removed,
/// `;`-separated lines split and blank lines dropped.
std::vector<std::string> normalized_statements(std::string_view text);

struct GoldenReport {
  std::vector<std::string> expected;   // listing statements checked
  std::vector<std::string> missing;    // absent from the emitted text
  std::vector<std::string> reordered;  // present but outside the longest ordered match
};

/// Matches the listing against emitted text. `...` elisions and the
/// annotation-only comments `# sac` / `# adjoint sac` are skipped.
GoldenReport check_golden(std::string_view listing, std::string_view emitted);

/// Reverse-section positions where an SAC adjoint `a_v[k]` is still nonzero
/// at a statement that is not part of an adjoint chunk, or at block end.
std::vector<std::string> reset_violations(const sl::target::Program& program);

/// Independent splitmix64 + Box-Muller stream.
class NormalStream {
 public:
  explicit NormalStream(std::uint64_t seed) : state_(seed) {}
  double next();

 private:
  std::uint64_t step();
  std::uint64_t state_;
};

/// Random straight-line script over x[0..2]:
///   t=<e>; u=<e>; y[0]=<e>
/// with expressions of depth <= 4 over + - * / exp gt0 and unary minus.
class RandomScript {
 public:
  struct Node;

  RandomScript(std::mt19937_64& rng);
  ~RandomScript();
  RandomScript(RandomScript&&) noexcept;

  const std::string& source() const { return source_; }
  /// Evaluates y[0]. `ok` turns false near a kink of gt0 (|arg| < margin),
  /// for small denominators (|d| < margin) and large exp arguments (> 20).
  double eval(std::span<const double> x, bool& ok, double margin = 0.05) const;

 private:
  std::vector<Node*> stmts_;
  std::string source_;
};

}  // namespace sltest

namespace sltest {

struct RandomCheck {
  std::string source;
  std::vector<double> x;
  std::vector<double> adjoint;
  std::vector<double> fd;  // central differences of the test-side evaluator
  double max_error = 0.0;  // relative, absolute where |fd| < 1e-12
  bool harness_passed = false;  // sl::gradcheck at the same point
  std::size_t kinks = 0;
};

/// Generates `count` random straight-line scripts and checks each adjoint at
/// a kink-free, well-conditioned random point.
std::vector<RandomCheck> random_gradchecks(int count, std::uint64_t seed, double tolerance);

double relative_error(double got, double want);

}  // namespace sltest
