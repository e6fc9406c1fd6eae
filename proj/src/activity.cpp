#include "sl/activity.hpp"

#include <algorithm>
#include <cctype>

#include "sl/diagnostics.hpp"

namespace sl {

Activity classify_symbol(std::string_view name) {
  if (!name.empty() && std::isupper(static_cast<unsigned char>(name.front()))) return Activity::Passive;
  return Activity::Active;
}

bool propagate_variedness(std::span<const bool> child_flags) {
  return std::any_of(child_flags.begin(), child_flags.end(), [](bool v) { return v; });
}

bool propagate_variedness(std::initializer_list<bool> child_flags) {
  return propagate_variedness(std::span<const bool>(child_flags.begin(), child_flags.size()));
}

void check_condition_passive(bool condition_varied, int line) {
  if (condition_varied) throw CompileError(ErrorCode::ActiveBranch, "active branch condition", line);
}

void check_assignment_activity(bool lhs_varied, bool rhs_varied, int line) {
  if (!lhs_varied && rhs_varied)
    throw CompileError(ErrorCode::ActiveToPassive, "active value assigned to passive variable", line);
}

void check_index_passive(bool index_varied, int line) {
  if (index_varied) throw CompileError(ErrorCode::ActiveIndex, "active index", line);
}

}  // namespace sl
