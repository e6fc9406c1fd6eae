#pragma once

#include <initializer_list>
#include <span>
#include <string_view>

namespace sl {

enum class Activity { Active, Passive };

/// Case convention: lowercase or underscore initial is active, uppercase
/// initial is passive.
Activity classify_symbol(std::string_view name);

inline bool is_active(std::string_view name) {
  return classify_symbol(name) == Activity::Active;
}

/// Variedness of a reduced production is the disjunction of its operands'.
bool propagate_variedness(std::span<const bool> child_flags);
bool propagate_variedness(std::initializer_list<bool> child_flags);

// The checks below throw CompileError on violation.

void check_condition_passive(bool condition_varied, int line);
void check_assignment_activity(bool lhs_varied, bool rhs_varied, int line);
/// Index expressions, range bounds and allocation lengths.
void check_index_passive(bool index_varied, int line);

}  // namespace sl
