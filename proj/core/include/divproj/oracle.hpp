#pragma once

// Brute-force minimizers over simplex grids and θ-grids, used to certify the
// solvers on small instances.

#include "divproj/divergences.hpp"
#include "divproj/families.hpp"
#include "divproj/projection.hpp"

#include <string_view>
#include <vector>

namespace divproj {

/// All points c / d with c a composition of d into m nonnegative parts, in
/// lexicographic order of c.
class SimplexGrid {
 public:
  SimplexGrid(std::size_t m, std::size_t resolution, bool interior_only = false);

  std::size_t m() const noexcept { return m_; }
  std::size_t resolution() const noexcept { return d_; }
  bool interior_only() const noexcept { return interior_only_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(points_.cols()); }
  /// Column i is the i-th grid point.
  const Matrix& points() const noexcept { return points_; }

  /// C(d + m - 1, m - 1), the size of the full grid.
  static std::size_t full_count(std::size_t m, std::size_t resolution);

 private:
  std::size_t m_;
  std::size_t d_;
  bool interior_only_;
  Matrix points_;
};

/// Product grid over a box; steps[i] points per axis including both ends.
struct ThetaGrid {
  Vector lo;
  Vector hi;
  std::vector<std::size_t> steps;

  std::size_t size() const;
  Vector point(std::size_t index) const;
  /// Largest spacing between neighbouring points.
  double cell() const;

  /// "lo:hi:steps" for every axis, or one such triple per axis separated by commas.
  static ThetaGrid parse(std::string_view text, std::size_t k);
  static ThetaGrid box(std::size_t k, double lo, double hi, std::size_t steps);
};

struct ForwardOracleResult {
  Distribution p_best;
  double value = 0.0;
  std::size_t index = 0;
  std::size_t candidates = 0;
};

/// Exhaustive argmin of D(P, Q) over grid points, optionally filtered by
/// |f P - a|_inf <= 0.5 / d. First lowest point wins.
ForwardOracleResult grid_forward_min(DivergenceKind kind, Alpha alpha, const Distribution& q,
                                     const LinearFamilySpec* constraint, const SimplexGrid& grid,
                                     unsigned threads = 1);

struct ReverseOracleResult {
  Vector theta_best;
  double value = 0.0;
  std::size_t index = 0;
  std::size_t admissible = 0;
  /// Grid argmax of the matched likelihood, and whether it is the same point.
  std::size_t likelihood_index = 0;
  bool likelihood_agrees = false;
};

/// Estimator whose likelihood is maximized where D(P̂, P_θ) is minimized.
Estimator likelihood_for(DivergenceKind kind, Alpha alpha);

/// Exhaustive argmin of D(P̂, P_θ) over admissible grid θ.
ReverseOracleResult grid_reverse_min(DivergenceKind kind, Alpha alpha, const Distribution& empirical,
                                     const FamilySpec& spec, const ThetaGrid& grid,
                                     unsigned threads = 1);

}  // namespace divproj
