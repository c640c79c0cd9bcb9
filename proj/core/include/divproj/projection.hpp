#pragma once

// Projection equations, forward B_α-projection onto linear families,
// Pythagorean checks, reverse B_α-projection through the forward one, and
// the Φ map of the α-power-law projection equation.

#include "divproj/estimators.hpp"
#include "divproj/families.hpp"
#include "divproj/newton.hpp"

#include <string_view>
#include <vector>

namespace divproj {

enum class ProjectionKind {
  IProj,       // E_θ[f] = f̄ on the exponential family
  BProj,       // E_θ[f] = f̄ on B(α)
  IAlphaProj,  // E_θ[f] = E_θ[Q^(α-1)] f̄ / mean(Q^(α-1)) on M(α)
  DAlphaProj,  // escort means of f and Q^(1-α) on E_α
};

const char* to_string(ProjectionKind kind);
ProjectionKind parse_projection_kind(std::string_view name);
ProjectionKind matched_projection(EstimatorKind kind);
FamilyKind matched_family(ProjectionKind kind);

/// Linear family {P : f P = a} (f is k x m).
class LinearFamilySpec {
 public:
  /// Throws Infeasible when no probability vector satisfies the constraints.
  LinearFamilySpec(Matrix f, Vector a);

  const Matrix& f() const noexcept { return f_; }
  const Vector& a() const noexcept { return a_; }
  std::size_t m() const noexcept { return static_cast<std::size_t>(f_.cols()); }
  /// Symbols that some member charges.
  const std::vector<bool>& support() const noexcept { return support_; }
  bool contains(const Distribution& p, double tol = 1e-10) const;

 private:
  Matrix f_;
  Vector a_;
  std::vector<bool> support_;
};

Vector projection_residual(ProjectionKind kind, const FamilySpec& spec, const Vector& theta,
                           const Distribution& empirical);
inline Vector projection_residual(ProjectionKind kind, const FamilySpec& spec,
                                  const Vector& theta, const SampleData& sample) {
  return projection_residual(kind, spec, theta, sample.empirical());
}

/// Both forms of the E_α projection equation: the unnormalized sums
///   sum P^α f - (sum P^α Q^(1-α) / sum P̂^α Q^(1-α)) sum P̂^α f
/// and the escort-mean form. The first divided by sum P^α equals the second.
struct DAlphaForms {
  Vector sums;
  Vector escort;
  double power_mass;  // sum P^α
};
DAlphaForms dalpha_forms(const FamilySpec& spec, const Vector& theta,
                         const Distribution& empirical);

SolveReport solve_projection_equation(ProjectionKind kind, const FamilySpec& spec,
                                      const SampleData& sample, const Vector& init,
                                      const NewtonOptions& opt = {});

struct KktMultipliers {
  Vector lambda;  // one per constraint row of f
  double nu = 0.0;
  Vector mu;      // one per symbol; zero for α < 1
};

struct ForwardProjectionResult {
  Distribution p_star;
  Vector theta;
  double z = 0.0;
  std::vector<bool> support_mask;
  KktMultipliers kkt;
  double objective = 0.0;
  int iterations = 0;
  bool fallback_used = false;
};

/// argmin of B_α(P, Q) over the linear family. Q must be strictly positive.
/// The solution has the form
///   P*(x) = [Q^(α-1) + (1-α)(Z + θ·f(x))]_+^(1/(α-1))  on Supp(L),
/// with no clamping needed for α < 1.
ForwardProjectionResult forward_b_projection(const Distribution& q, const LinearFamilySpec& l,
                                             Alpha alpha);

/// Least-squares fit of (θ, Z) to P on its support, then the max gap between
/// P and the clamped parametric form on all symbols. `hint` (θ, Z) selects
/// among fits when the support is too small to pin them down.
struct ForwardFormFit {
  Vector theta;
  double z = 0.0;
  double residual = 0.0;
};
ForwardFormFit forward_form_residual(const Distribution& q, const LinearFamilySpec& l,
                                     Alpha alpha, const Distribution& p,
                                     const Vector& hint_theta, double hint_z);

/// Convex set {f P = a, g P <= c}.
struct ConvexSetSpec {
  Matrix f;
  Vector a;
  Matrix g;
  Vector c;
};

/// argmin of B_α(P, Q) over a convex set, by enumerating active inequality
/// sets. Meant for a handful of inequalities.
ForwardProjectionResult forward_b_projection(const Distribution& q, const ConvexSetSpec& set,
                                             Alpha alpha);

/// B_α(P,Q) - B_α(P,P*) - B_α(P*,Q).
double pythagorean_gap(Alpha alpha, const Distribution& p, const Distribution& p_star,
                       const Distribution& q);

struct ReverseProjectionResult {
  SolveReport report;
  /// The forward projection on the sample's linear family is not a family
  /// member; the reverse projection is attained only on the closure.
  bool closure_only = false;
  double membership = 0.0;
  double z = 0.0;
};

ReverseProjectionResult reverse_b_projection(const SampleData& sample, const FamilySpec& spec);
ReverseProjectionResult reverse_b_projection(const Distribution& empirical,
                                             const FamilySpec& spec);

/// Φ(θ) in the quotient form
///   E_θ[f] (mean(Q^(α-1)) + (1-α) θ·f̄) / E_θ[Q^(α-1) + (1-α) θ·f].
Vector phi_map(const FamilySpec& spec, const Vector& theta, const Distribution& empirical);
/// Φ(θ) as E_θ[f] mean(P_θ^(α-1)) / sum P_θ^α.
Vector phi_map_escort_form(const FamilySpec& spec, const Vector& theta,
                           const Distribution& empirical);

/// -Z^(1-α) mean(P_θ^(α-1)) Cov_esc(P^(1-α) f_i, P^(1-α) f_j), the escort
/// covariance form. It is the derivative of Φ at solutions of Φ(θ) = f̄.
Matrix phi_jacobian(const FamilySpec& spec, const Vector& theta, const Distribution& empirical);
/// Derivative of Φ valid at every θ.
Matrix phi_jacobian_exact(const FamilySpec& spec, const Vector& theta,
                          const Distribution& empirical);

}  // namespace divproj
