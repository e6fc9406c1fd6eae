#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace sl {

using Vector = std::vector<double>;
using VectorRef = std::shared_ptr<Vector>;

/// Scalar or vector. Vectors are shared handles so that calls see (and
/// mutate) the caller's storage.
using Value = std::variant<double, VectorRef>;

inline Value make_vector(Vector v) { return std::make_shared<Vector>(std::move(v)); }
inline bool is_vector(const Value& v) { return std::holds_alternative<VectorRef>(v); }

double as_scalar(const Value& v, const std::string& what);
const VectorRef& as_vector(const Value& v, const std::string& what);

struct SmoothingConfig {
  double h = 1e-3;
};

/// Reads `SL_SMOOTH_H` when set; throws std::invalid_argument on h <= 0 or
/// unparsable values.
SmoothingConfig smoothing_from_env();
void validate(const SmoothingConfig& cfg);

double gt0(double x);
/// Sigmoid-smoothed derivative of gt0: 0 below -h, 1 above h.
double d_gt0(double x, const SmoothingConfig& cfg = {});
double d_exp(double x);

/// Three LIFO tapes used by one adjoint execution.
class TapeStacks {
 public:
  void push_scalar(double v);
  double pop_scalar();
  void push_vector(std::span<const double> v);  // deep copy
  Vector pop_vector();
  void push_control(std::uint64_t n);
  std::uint64_t pop_control();

  bool empty() const { return scalars_.empty() && vectors_.empty() && controls_.empty(); }
  std::size_t scalar_size() const { return scalars_.size(); }
  std::size_t vector_size() const { return vectors_.size(); }
  std::size_t control_size() const { return controls_.size(); }
  /// Pushes performed since construction, over all three stacks.
  std::size_t push_count() const { return pushes_; }

 private:
  std::vector<double> scalars_;
  std::vector<Vector> vectors_;
  std::vector<std::uint64_t> controls_;
  std::size_t pushes_ = 0;
};

}  // namespace sl
