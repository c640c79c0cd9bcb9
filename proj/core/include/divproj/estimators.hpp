#pragma once

// Score functions, generalized likelihoods and estimating equations.
//
//   MLE         sum P̂ s = 0
//   HellingerD  sum P̂^α P^(1-α) s = 0
//   BasuB       sum P̂ P^(α-1) s - sum P^α s = 0
//   JonesI      sum P̂ P^(α-1) s / sum P̂ P^(α-1) - sum P^α s / sum P^α = 0
//
// with s(x; θ) = ∇ log P_θ(x). Each robust kind collapses to MLE at α = 1.

#include "divproj/divergences.hpp"
#include "divproj/families.hpp"
#include "divproj/newton.hpp"

#include <string_view>

namespace divproj {

enum class EstimatorKind { MLE, HellingerD, BasuB, JonesI };

const char* to_string(EstimatorKind kind);
EstimatorKind parse_estimator_kind(std::string_view name);

/// Family kind on which the estimator's solution has a projection-equation
/// characterization.
FamilyKind matched_family(EstimatorKind kind);
/// Divergence D such that maximizing the likelihood minimizes D(P̂, P_θ).
DivergenceKind matched_divergence(EstimatorKind kind);

struct Estimator {
  EstimatorKind kind;
  Alpha alpha;

  /// Whether the estimator reduces to MLE (kind MLE or alpha = 1).
  bool is_mle() const { return kind == EstimatorKind::MLE || alpha.is_one(); }
};

/// k x m matrix whose column x is s(x; θ), from the closed forms.
Matrix score_matrix(const FamilySpec& spec, const Vector& theta);
Vector score(const FamilySpec& spec, const Vector& theta, std::size_t x);

/// ∇Z(θ) for the non-normalized α-power-law family.
Vector bpow_normalizer_gradient(const FamilySpec& spec, const Vector& theta);

double likelihood(const Estimator& est, const FamilySpec& spec, const Vector& theta,
                  const Distribution& empirical);
inline double likelihood(const Estimator& est, const FamilySpec& spec, const Vector& theta,
                         const SampleData& sample) {
  return likelihood(est, spec, theta, sample.empirical());
}

Vector estimating_residual(const Estimator& est, const FamilySpec& spec, const Vector& theta,
                           const Distribution& empirical);
inline Vector estimating_residual(const Estimator& est, const FamilySpec& spec,
                                  const Vector& theta, const SampleData& sample) {
  return estimating_residual(est, spec, theta, sample.empirical());
}

SolveReport solve_estimating_equation(const Estimator& est, const FamilySpec& spec,
                                      const SampleData& sample, const Vector& init,
                                      const NewtonOptions& opt = {});

/// Quasi-Newton ascent of the likelihood. The estimating residual at the
/// reported maximum must be below `first_order_tol`, else NoConvergence.
SolveReport maximize_likelihood(const Estimator& est, const FamilySpec& spec,
                                const SampleData& sample, const Vector& init,
                                double first_order_tol = 1e-8);

}  // namespace divproj
