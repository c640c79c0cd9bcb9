#pragma once

// Solver plumbing shared by the estimating-equation, projection-equation and
// likelihood routes.

#include "divproj/measures.hpp"

#include <functional>
#include <string>
#include <vector>

namespace divproj {

enum class Route { EstimatingEq, ProjectionEq, LikelihoodMax, Oracle };

const char* to_string(Route route);

struct TraceEntry {
  Vector theta;
  double residual;  // 2-norm of the route's residual (gradient for LikelihoodMax)
};

struct SolveReport {
  Vector theta_star;
  Distribution p_star;
  /// Max-norm of the route's own residual at theta_star.
  double residual_norm = 0.0;
  std::size_t iterations = 0;
  std::vector<TraceEntry> trace;
  Route route = Route::EstimatingEq;
  bool multistart = false;
  std::string note;
};

/// Residual map. Throws divproj::Error (DomainViolation, NormalizerNotFound,
/// DomainError) when θ is outside the admissible region.
using ResidualFn = std::function<Vector(const Vector&)>;
using ObjectiveFn = std::function<double(const Vector&)>;

struct NewtonOptions {
  double tolerance = 1e-10;
  int max_iterations = 200;
  /// Multi-start grids {-c s, 0, c s}^k for c in {1, 0.3, 0.1}.
  double start_scale = 1.0;
  bool multistart = true;
  unsigned threads = 1;
};

struct NewtonResult {
  Vector theta;
  double residual_inf = 0.0;
  int iterations = 0;
  std::vector<TraceEntry> trace;
  bool converged = false;
  bool multistart = false;
};

/// Central finite-difference Jacobian, h = 1e-6 (1 + |θ_j|). Falls back to a
/// one-sided stencil when one side is inadmissible and shrinks h up to three
/// times before giving up with DomainViolation.
Matrix fd_jacobian(const ResidualFn& r, const Vector& theta, const Vector& r0);

/// Damped Newton with Armijo backtracking on ||r||^2. Does not throw on
/// non-convergence; inspect `converged`.
NewtonResult damped_newton(const ResidualFn& r, const Vector& init, const NewtonOptions& opt);

/// damped_newton from `init`, then from every point of the start grid if that
/// fails. Throws NoConvergence with the best iterate, or DomainViolation when
/// no start is admissible.
NewtonResult solve_system(const ResidualFn& r, const Vector& init, const NewtonOptions& opt);

struct MaximizeOptions {
  int max_iterations = 500;
  double gradient_step = 1e-5;
  double hessian_step = 1e-4;
};

struct MaximizeResult {
  Vector theta;
  double value = 0.0;
  Vector gradient;
  Matrix hessian;
  int iterations = 0;
  std::vector<TraceEntry> trace;
};

/// Central finite-difference gradient of an objective.
Vector fd_gradient(const ObjectiveFn& fn, const Vector& theta, double step);

/// BFGS ascent with finite-difference gradients, finished by Newton steps on
/// a finite-difference Hessian. Succeeds only with a certificate: the Hessian
/// is negative definite and the final Newton step is negligible. Otherwise
/// throws NoConvergence.
MaximizeResult maximize(const ObjectiveFn& fn, const Vector& init, const MaximizeOptions& opt);

}  // namespace divproj
