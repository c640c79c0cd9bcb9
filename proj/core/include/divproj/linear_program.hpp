#pragma once

// Small dense linear programs: feasibility and support questions about
// linear families. Alphabets are tiny, so a two-phase tableau simplex
// with Bland's rule is plenty.

#include "divproj/measures.hpp"

#include <vector>

namespace divproj {

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  Vector x;
  double objective = 0.0;
};

/// minimize c'x subject to A x = b, x >= 0.
LpResult solve_lp(const Matrix& a, const Vector& b, const Vector& c);

/// A point of {P >= 0, sum P = 1, f P = target}, if there is one.
std::optional<Vector> simplex_feasible_point(const Matrix& f, const Vector& target);

/// Symbols that carry positive mass for some member of the linear family
/// {P >= 0, sum P = 1, f P = target}. Empty when the family is empty.
std::vector<bool> linear_family_support(const Matrix& f, const Vector& target);

}  // namespace divproj
