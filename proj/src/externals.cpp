#include "sl/externals.hpp"

#include <cmath>
#include <cstdlib>
#include <numbers>
#include <stdexcept>

#include "sl/diagnostics.hpp"

namespace sl {

std::uint64_t SplitMix64::next() {
  state_ += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double SplitMix64::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

double prng_normal(SplitMix64& prng) {
  double u1 = prng.uniform();
  double u2 = prng.uniform();
  if (u1 == 0.0) u1 = 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

namespace {

void check_market(std::span<const double> x, std::size_t s_len, std::size_t paths) {
  if (x.size() < 3) throw RuntimeError("mc: x needs at least 3 components, got " + std::to_string(x.size()));
  if (s_len != paths)
    throw RuntimeError("mc: length mismatch, s has " + std::to_string(s_len) + " entries for M=" +
                       std::to_string(paths));
}

double path_value(double spot, double rate, double sigma, double z) {
  return spot * std::exp((rate - 0.5 * sigma * sigma) * kMaturity + sigma * std::sqrt(kMaturity) * z);
}

}  // namespace

void mc(std::span<const double> x, std::span<double> s, std::size_t paths, std::uint64_t seed) {
  check_market(x, s.size(), paths);
  SplitMix64 prng(seed);
  for (std::size_t i = 0; i < paths; ++i) s[i] = path_value(x[0], x[1], x[2], prng_normal(prng));
}

void a_mc(std::span<const double> x, std::span<double> a_x, std::span<const double> s, std::span<double> a_s,
          std::size_t paths, std::uint64_t seed) {
  check_market(x, s.size(), paths);
  if (a_s.size() != paths || a_x.size() != x.size()) throw RuntimeError("a_mc: adjoint length mismatch");
  SplitMix64 prng(seed);
  const double sqrt_t = std::sqrt(kMaturity);
  for (std::size_t i = 0; i < paths; ++i) {
    const double z = prng_normal(prng);
    const double si = path_value(x[0], x[1], x[2], z);
    a_x[0] += si / x[0] * a_s[i];
    a_x[1] += si * kMaturity * a_s[i];
    a_x[2] += si * (-x[2] * kMaturity + sqrt_t * z) * a_s[i];
    a_s[i] = 0.0;
  }
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

BsResult bs_closed_form(double spot, double strike, double rate, double sigma, double maturity) {
  if (!(spot > 0) || !(strike > 0) || !(sigma > 0) || !(maturity > 0))
    throw std::domain_error("bs_closed_form requires S0, K, sigma, T > 0");
  const double sqrt_t = std::sqrt(maturity);
  const double d1 = (std::log(spot / strike) + (rate + 0.5 * sigma * sigma) * maturity) / (sigma * sqrt_t);
  const double d2 = d1 - sigma * sqrt_t;
  const double discount = std::exp(-rate * maturity);
  const double pdf_d1 = std::exp(-0.5 * d1 * d1) / std::sqrt(2.0 * std::numbers::pi);
  BsResult r;
  r.price = spot * normal_cdf(d1) - strike * discount * normal_cdf(d2);
  r.delta = normal_cdf(d1);
  r.rho = strike * maturity * discount * normal_cdf(d2);
  r.vega = spot * pdf_d1 * sqrt_t;
  r.dstrike = -discount * normal_cdf(d2);
  return r;
}

// ---------------------------------------------------------------------------
// registry

void ExternalRegistry::add(std::string name, External ext) {
  if (!ext.primal || !ext.adjoint) throw std::invalid_argument("external '" + name + "' needs primal and adjoint");
  entries_.insert_or_assign(std::move(name), std::move(ext));
}

const External* ExternalRegistry::find(std::string_view name) const {
  auto it = entries_.find(name);
  return it == entries_.end() ? nullptr : &it->second;
}

const ExternalFn* ExternalRegistry::find_adjoint(std::string_view adjoint_name) const {
  if (!adjoint_name.starts_with("a_")) return nullptr;
  const auto* ext = find(adjoint_name.substr(2));
  return ext ? &ext->adjoint : nullptr;
}

SignatureTable ExternalRegistry::signatures() const {
  SignatureTable out;
  for (const auto& [name, ext] : entries_) out.emplace(name, ext.signature);
  return out;
}

NameSet ExternalRegistry::names() const {
  NameSet out;
  for (const auto& [name, ext] : entries_) out.insert(name);
  return out;
}

namespace {

std::size_t path_count(const Value& v) {
  double m = as_scalar(v, "M");
  if (!(m >= 1) || m != std::floor(m)) throw RuntimeError("mc: M must be a positive integer");
  return static_cast<std::size_t>(m);
}

ExternalRegistry make_builtin() {
  ExternalRegistry reg;
  External ext;
  ext.signature = CalleeSignature{{"x", "s", "M"}, 1};
  ext.primal = [](std::span<const Value> args, const ExternalContext& ctx) -> Value {
    if (args.size() != 3) throw RuntimeError("mc expects 3 arguments");
    const auto& x = as_vector(args[0], "x");
    const auto& s = as_vector(args[1], "s");
    mc(*x, *s, path_count(args[2]), ctx.seed);
    return args[1];
  };
  ext.adjoint = [](std::span<const Value> args, const ExternalContext& ctx) -> Value {
    if (args.size() != 5) throw RuntimeError("a_mc expects 5 arguments");
    const auto& x = as_vector(args[0], "x");
    const auto& a_x = as_vector(args[1], "a_x");
    const auto& s = as_vector(args[2], "s");
    const auto& a_s = as_vector(args[3], "a_s");
    a_mc(*x, *a_x, *s, *a_s, path_count(args[4]), ctx.seed);
    return args[1];
  };
  reg.add("mc", std::move(ext));
  return reg;
}

}  // namespace

const ExternalRegistry& ExternalRegistry::builtin() {
  static const ExternalRegistry reg = make_builtin();
  return reg;
}

std::uint64_t seed_from_env(std::uint64_t fallback) {
  const char* env = std::getenv("SL_SEED");
  if (!env) return fallback;
  char* end = nullptr;
  auto v = std::strtoull(env, &end, 10);
  if (end == env || *end != '\0') throw std::invalid_argument("SL_SEED is not an unsigned integer");
  return v;
}

}  // namespace sl
