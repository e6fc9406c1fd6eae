#pragma once

// Natively implemented external subprograms callable from scripts, with the
// Black-Scholes path simulator `mc` and its hand-written adjoint `a_mc`.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sl/adjointgen.hpp"
#include "sl/runtime.hpp"

namespace sl {

/// splitmix64 stream with Box-Muller normals; two steps per normal.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next();
  /// (z >> 11) * 2^-53, in [0, 1)
  double uniform();

 private:
  std::uint64_t state_;
};

double prng_normal(SplitMix64& prng);

/// s[i] = S0 * exp((r - sigma^2/2) T + sigma sqrt(T) Z_i), T = 1, with x =
/// [S0, r, sigma, K] and Z_i the i-th normal of `seed`.
void mc(std::span<const double> x, std::span<double> s, std::size_t paths, std::uint64_t seed);

/// Pathwise adjoint of mc. Regenerates Z_i from `seed` and recomputes the
/// paths, so the contents of `s` are not read; increments a_x[0..2] and
/// zeroes a_s.
void a_mc(std::span<const double> x, std::span<double> a_x, std::span<const double> s, std::span<double> a_s,
          std::size_t paths, std::uint64_t seed);

inline constexpr double kMaturity = 1.0;

struct BsResult {
  double price;
  double delta;
  double rho;
  double vega;
  double dstrike;
};

/// Standard normal CDF via erfc.
double normal_cdf(double x);

/// Closed-form European call price and sensitivities; throws
/// std::domain_error outside S0, K, sigma, T > 0.
BsResult bs_closed_form(double spot, double strike, double rate, double sigma, double maturity);

struct ExternalContext {
  std::uint64_t seed = 42;
};

using ExternalFn = std::function<Value(std::span<const Value> args, const ExternalContext& ctx)>;

struct External {
  CalleeSignature signature;
  ExternalFn primal;
  ExternalFn adjoint;
};

/// name -> (signature, primal, adjoint). Both entries are required.
class ExternalRegistry {
 public:
  void add(std::string name, External ext);
  const External* find(std::string_view name) const;
  /// Resolves `a_<name>` to the adjoint of a registered external.
  const ExternalFn* find_adjoint(std::string_view adjoint_name) const;
  SignatureTable signatures() const;
  NameSet names() const;

  /// Registry holding `mc`.
  static const ExternalRegistry& builtin();

 private:
  std::map<std::string, External, std::less<>> entries_;
};

std::uint64_t seed_from_env(std::uint64_t fallback = 42);

}  // namespace sl
