#include "sl/runtime.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>

#include "sl/diagnostics.hpp"

namespace sl {

double as_scalar(const Value& v, const std::string& what) {
  if (auto* d = std::get_if<double>(&v)) return *d;
  throw RuntimeError("vector used as scalar: " + what);
}

const VectorRef& as_vector(const Value& v, const std::string& what) {
  if (auto* p = std::get_if<VectorRef>(&v)) return *p;
  throw RuntimeError("scalar used as vector: " + what);
}

void validate(const SmoothingConfig& cfg) {
  if (!(cfg.h > 0.0) || !std::isfinite(cfg.h)) throw std::invalid_argument("smoothing width h must be positive");
}

SmoothingConfig smoothing_from_env() {
  SmoothingConfig cfg;
  if (const char* env = std::getenv("SL_SMOOTH_H")) {
    char* end = nullptr;
    cfg.h = std::strtod(env, &end);
    if (end == env || *end != '\0') throw std::invalid_argument("SL_SMOOTH_H is not a number");
  }
  validate(cfg);
  return cfg;
}

double gt0(double x) { return std::fmax(x, 0.0); }

double d_gt0(double x, const SmoothingConfig& cfg) {
  if (x < -cfg.h) return 0.0;
  if (x > cfg.h) return 1.0;
  return 1.0 / (1.0 + std::exp(-x / cfg.h));
}

double d_exp(double x) { return std::exp(x); }

void TapeStacks::push_scalar(double v) {
  scalars_.push_back(v);
  ++pushes_;
}

double TapeStacks::pop_scalar() {
  if (scalars_.empty()) throw RuntimeError("tape underflow (scalar stack)");
  double v = scalars_.back();
  scalars_.pop_back();
  return v;
}

void TapeStacks::push_vector(std::span<const double> v) {
  vectors_.emplace_back(v.begin(), v.end());
  ++pushes_;
}

Vector TapeStacks::pop_vector() {
  if (vectors_.empty()) throw RuntimeError("tape underflow (vector stack)");
  Vector v = std::move(vectors_.back());
  vectors_.pop_back();
  return v;
}

void TapeStacks::push_control(std::uint64_t n) {
  controls_.push_back(n);
  ++pushes_;
}

std::uint64_t TapeStacks::pop_control() {
  if (controls_.empty()) throw RuntimeError("tape underflow (control stack)");
  auto n = controls_.back();
  controls_.pop_back();
  return n;
}

}  // namespace sl
