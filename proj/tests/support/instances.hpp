#pragma once
// Random desk-scale instances shared by the unit and acceptance tests.
#include "divproj/families.hpp"
#include "divproj/projection.hpp"
#include "divproj/sampling.hpp"

#include <Eigen/Cholesky>

#include <random>

namespace divproj::testing {

/// Strictly positive distribution with every entry at least `floor`.
inline Distribution random_simplex(std::mt19937_64& rng, std::size_t m, double floor = 0.03) {
  Vector w(static_cast<Eigen::Index>(m));
  for (Eigen::Index i = 0; i < w.size(); ++i) w(i) = -std::log(1.0 - uniform01(rng));
  w /= w.sum();
  w = floor + (1.0 - floor * static_cast<double>(m)) * w.array();
  return Distribution::from_probs(w / w.sum());
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform01(rng);
}

/// k x m statistics with entries in [-1, 1], redrawn until full row rank.
inline Matrix random_stats(std::mt19937_64& rng, std::size_t k, std::size_t m) {
  for (;;) {
    Matrix f(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(m));
    for (Eigen::Index i = 0; i < f.rows(); ++i) {
      for (Eigen::Index j = 0; j < f.cols(); ++j) f(i, j) = uniform(rng, -1.0, 1.0);
    }
    if (numerical_rank(f) == f.rows()) return f;
  }
}

inline Vector random_theta(std::mt19937_64& rng, std::size_t k, double scale) {
  Vector t(static_cast<Eigen::Index>(k));
  for (Eigen::Index i = 0; i < t.size(); ++i) t(i) = uniform(rng, -scale, scale);
  return t;
}

/// Random θ at which the family evaluates with every bracket comfortably
/// positive. Shrinks the draw until admissible.
inline Vector admissible_theta(std::mt19937_64& rng, const FamilySpec& spec, double scale) {
  for (int attempt = 0; attempt < 200; ++attempt) {
    Vector t = random_theta(rng, spec.k(), scale);
    for (int shrink = 0; shrink < 8; ++shrink) {
      if (admissible(spec, t)) {
        const FamilyPoint fp = evaluate(spec, t);
        if (fp.p.probs().minCoeff() > 0.02) return t;
      }
      t *= 0.5;
    }
  }
  return Vector::Zero(static_cast<Eigen::Index>(spec.k()));
}

/// Random family of the given kind. The AlphaPowerLaw check on Q^(α-1)
/// is retried with fresh draws.
inline FamilySpec random_family(std::mt19937_64& rng, FamilyKind kind, std::size_t m, std::size_t k,
                                double alpha) {
  for (;;) {
    try {
      return FamilySpec(kind, random_simplex(rng, m, 0.05), random_stats(rng, k, m),
                        Alpha(kind == FamilyKind::Exponential ? 1.0 : alpha));
    } catch (const Error&) {
    }
  }
}

/// Random family whose statistics are centred and whitened under Q, so
/// Cov_Q(f) = I and θ is well conditioned near the reference.
inline FamilySpec standardized_family(std::mt19937_64& rng, FamilyKind kind, std::size_t m, std::size_t k,
                                      double alpha) {
  for (;;) {
    const Distribution q = random_simplex(rng, m, 0.05);
    const Matrix raw = random_stats(rng, k, m);
    const Vector mean = raw * q.probs();
    const Matrix centred = raw.colwise() - mean;
    const Matrix cov = centred * q.probs().asDiagonal() * centred.transpose();
    const Eigen::LLT<Matrix> llt(cov);
    if (llt.info() != Eigen::Success) continue;
    const Matrix f = llt.matrixL().solve(centred);
    try {
      return FamilySpec(kind, q, f, Alpha(kind == FamilyKind::Exponential ? 1.0 : alpha));
    } catch (const Error&) {
    }
  }
}

/// Feasible linear family whose target is the mean of f under a random
/// strictly positive P.
inline LinearFamilySpec random_linear(std::mt19937_64& rng, std::size_t m, std::size_t k) {
  const Matrix f = random_stats(rng, k, m);
  const Distribution p = random_simplex(rng, m, 0.02);
  return LinearFamilySpec(f, f * p.probs());
}

/// Counts whose empirical measure approximates P with total n.
inline std::vector<std::size_t> rounded_counts(const Distribution& p, std::size_t n) {
  std::vector<std::size_t> c(p.size());
  std::size_t used = 0;
  for (std::size_t i = 0; i + 1 < p.size(); ++i) {
    c[i] = static_cast<std::size_t>(std::llround(p[i] * static_cast<double>(n)));
    used += c[i];
  }
  c.back() = used < n ? n - used : 0;
  return c;
}

}  // namespace divproj::testing
