#pragma once

// Sufficient statistics for the generalized likelihoods:
//
//   Exponential / MLE        T1 = f̄
//   B(α) / Basu              T2 = f̄
//   M(α) / Jones             T3 = f̄ / mean(Q^(α-1))
//   E_α / Hellinger          T4 = f̄^(α) / mean^(α)(Q^(1-α))
//
// where mean^(α) averages under the escort of P̂. Each likelihood splits as
// g(θ, T) + h(sample).

#include "divproj/estimators.hpp"
#include "divproj/families.hpp"

#include <optional>
#include <string>
#include <vector>

namespace divproj {

struct SufficientStatistic {
  FamilyKind model_kind;
  Vector value;
  std::string components_doc;
};

SufficientStatistic sufficient_statistic(FamilyKind model_kind, const Distribution& empirical,
                                         const Distribution& q, const Matrix& f, Alpha alpha);
SufficientStatistic sufficient_statistic(FamilyKind model_kind, const SampleData& sample,
                                         const Distribution& q, const Matrix& f, Alpha alpha);

/// Estimator whose likelihood the statistic factorizes.
Estimator matched_estimator(const FamilySpec& spec);

struct LikelihoodSplit {
  double g;  // depends on the sample only through T
  double h;  // free of θ
};

/// g and h of the matched likelihood at θ, g computed from T alone.
LikelihoodSplit likelihood_decomposition(const FamilySpec& spec, const Vector& theta,
                                         const Distribution& empirical);

struct FactorizationReport {
  double t_gap = 0.0;
  bool equal_t = false;
  /// Max over the grid of |(L_a - L_b) - mean(L_a - L_b)|.
  double max_deviation = 0.0;
  double mean_difference = 0.0;
  std::size_t argmax_a = 0;
  std::size_t argmax_b = 0;
  bool argmax_equal = false;
  std::size_t grid_points = 0;
};

inline constexpr double kEqualStatisticTolerance = 1e-10;

/// Compares the matched likelihood of two samples over the admissible points
/// of a θ-grid. Inadmissible grid points are skipped.
FactorizationReport factorization_check(const FamilySpec& spec, const Distribution& sample_a,
                                        const Distribution& sample_b,
                                        const std::vector<Vector>& theta_grid);

/// Two count vectors (total at most n_max each) with different empirical
/// measures and equal statistic, found by exhaustive enumeration.
std::optional<std::pair<std::vector<std::size_t>, std::vector<std::size_t>>> find_equal_statistic_pair(
    FamilyKind model_kind, const Distribution& q, const Matrix& f, Alpha alpha,
    std::size_t n_max = 12);

}  // namespace divproj
