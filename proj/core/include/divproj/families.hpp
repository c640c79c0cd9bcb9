#pragma once

// Parametric families over a finite alphabet, all tilts of a reference
// measure Q by statistics f (k x m, one row per statistic):
//
//   Exponential                 P ∝ Q exp(θ·f)
//   AlphaPowerLaw      M(α)     P ∝ [Q^(α-1) + (1-α) θ·f]^(1/(α-1))
//   AlphaExponential   E_α      P ∝ [Q^(1-α) + (1-α) θ·f]^(1/(1-α))
//   NonNormalized...   B(α)     P  = [Q^(α-1) + (1-α)(Z + θ·f)]^(1/(α-1))
//
// For B(α) the normalizer sits inside the bracket and is found by a root
// solve. θ = 0 gives Q for every kind.

#include "divproj/measures.hpp"

#include <string_view>
#include <vector>

namespace divproj {

enum class FamilyKind { Exponential, AlphaPowerLaw, NonNormalizedAlphaPowerLaw, AlphaExponential };

const char* to_string(FamilyKind kind);
/// Accepts the JSON names ("exponential", "alpha_power_law",
/// "nonnormalized_alpha_power_law", "alpha_exponential") and the short model
/// names (exp, mpow, bpow, aexp).
FamilyKind parse_family_kind(std::string_view name);

class FamilySpec {
 public:
  /// Q must be strictly positive and f must have m columns and full row rank.
  /// Power-law kinds need alpha != 1. For AlphaPowerLaw, Q^(α-1) must also be
  /// independent of the rows of f.
  FamilySpec(FamilyKind kind, Distribution q, Matrix f, Alpha alpha);

  FamilyKind kind() const noexcept { return kind_; }
  const Distribution& q() const noexcept { return q_; }
  const Matrix& f() const noexcept { return f_; }
  Alpha alpha() const noexcept { return alpha_; }
  std::size_t k() const noexcept { return static_cast<std::size_t>(f_.rows()); }
  std::size_t m() const noexcept { return q_.size(); }

  /// Statistic vector f(x) (column x of f).
  Vector stat(std::size_t x) const { return f_.col(static_cast<Eigen::Index>(x)); }

 private:
  FamilyKind kind_;
  Distribution q_;
  Matrix f_;
  Alpha alpha_;
};

/// Everything known about P_θ after evaluation.
struct FamilyPoint {
  Distribution p;
  /// Normalizing constant: the explicit sum, or the root for B(α).
  double z = 1.0;
  /// Bracket per symbol before the final power: θ·f for Exponential,
  /// u for M(α) and B(α), v for E_α.
  Vector bracket;
};

/// Brackets that are <= 0 at θ (power-law kinds; B(α) at Z = 0 is not
/// meaningful, so only M(α) and E_α are checked here).
std::vector<std::size_t> domain_violations(const FamilySpec& spec, const Vector& theta);

/// Whether P_θ can be evaluated (bracket positive and, for B(α), Z exists).
bool admissible(const FamilySpec& spec, const Vector& theta);

FamilyPoint evaluate(const FamilySpec& spec, const Vector& theta);

inline Distribution eval_member(const FamilySpec& spec, const Vector& theta) {
  return evaluate(spec, theta).p;
}

/// Z(θ) of the non-normalized α-power-law family.
double normalizer_root(const FamilySpec& spec, const Vector& theta);

/// θ' = -α θ / ||Q||^(1-α).
Vector escort_parameter_map(const Vector& theta, const Distribution& q, Alpha alpha);
/// Inverse of escort_parameter_map.
Vector escort_inverse_parameter_map(const Vector& theta_prime, const Distribution& q,
                                    Alpha alpha);

/// The M(1/α) family with reference escort(Q, α) and the same statistics,
/// paired with an E_α family.
FamilySpec escort_target_spec(const FamilySpec& alpha_exponential);

struct EscortImage {
  Distribution escort;
  Vector theta_prime;
};

/// escort(P_θ, α) and θ' for an E_α member.
EscortImage escort_family_map(const FamilySpec& alpha_exponential, const Vector& theta);

/// Recover (P_θ, θ) from a member of the target M(1/α) family.
std::pair<Distribution, Vector> escort_inverse_map(const FamilySpec& alpha_exponential,
                                                   const Vector& theta_prime);

/// Same family with reference P_θ0.
FamilySpec rebase(const FamilySpec& spec, const Vector& theta0);
/// Parameter of the rebased family giving the same member as θ.
Vector rebased_parameter(const FamilySpec& spec, const Vector& theta0, const Vector& theta);

/// Max-abs residual of the least-squares fit of P to the family's defining
/// linear form (log P - log Q on [f; 1], P^(α-1) on [Q^(α-1); f], ...).
/// Zero up to round-off for members.
double membership_residual(const FamilySpec& spec, const Distribution& p);

/// E_P[g] for a per-symbol vector g.
inline double expect(const Distribution& p, const Vector& g) { return p.probs().dot(g); }

/// Numerical rank with tolerance 1e-10 * largest singular value.
Eigen::Index numerical_rank(const Matrix& a);

}  // namespace divproj
