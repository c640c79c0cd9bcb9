#pragma once

// Finite-alphabet probability measures: the vector substrate shared by every
// other part of the library. All vectors are indexed by alphabet position.

#include "divproj/error.hpp"

#include <Eigen/Core>

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace divproj {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Simplex sums must be within this of 1.
inline constexpr double kSumTolerance = 1e-12;
/// Sums off by less than this are repaired by one renormalization.
inline constexpr double kRepairTolerance = 1e-9;
/// Negative weights down to this are treated as round-off and clamped to 0.
inline constexpr double kNegativeClamp = 1e-14;

/// Ordered set of distinct symbol labels. Position is the canonical index.
class Alphabet {
 public:
  explicit Alphabet(std::vector<std::string> symbols);

  /// Alphabet {"0", "1", ..., "m-1"}.
  static Alphabet indexed(std::size_t m);

  std::size_t size() const noexcept { return symbols_.size(); }
  const std::string& label(std::size_t i) const { return symbols_.at(i); }
  const std::vector<std::string>& symbols() const noexcept { return symbols_; }
  std::optional<std::size_t> index_of(std::string_view label) const;

  bool operator==(const Alphabet& other) const = default;

 private:
  std::vector<std::string> symbols_;
};

/// Probability vector over a finite alphabet.
///
/// Entries are nonnegative and sum to 1 within kSumTolerance. A strict
/// distribution additionally has every entry > 0; that is the standing
/// assumption for families and estimators. Non-strict distributions appear
/// for empirical measures and for boundary forward projections.
class Distribution {
 public:
  Distribution() = default;

  /// Validates and (if the sum drifted by less than kRepairTolerance)
  /// renormalizes once. Throws DomainError when `strict` and some entry is 0.
  static Distribution from_probs(Vector probs, bool strict = true);
  static Distribution from_probs(std::initializer_list<double> probs,
                                 bool strict = true);

  static Distribution uniform(std::size_t m);

  const Vector& probs() const noexcept { return probs_; }
  double operator[](std::size_t i) const { return probs_(static_cast<Eigen::Index>(i)); }
  std::size_t size() const noexcept { return static_cast<std::size_t>(probs_.size()); }

  /// Whether strict positivity was requested at construction.
  bool strict() const noexcept { return strict_; }
  bool strictly_positive() const;

  /// Indices with positive mass.
  std::vector<std::size_t> support() const;

 private:
  Distribution(Vector probs, bool strict) : probs_(std::move(probs)), strict_(strict) {}

  Vector probs_;
  bool strict_ = false;
};

/// Positive real exponent alpha of the divergence families.
class Alpha {
 public:
  explicit Alpha(double value);

  double value() const noexcept { return value_; }
  bool is_one() const noexcept { return value_ == 1.0; }
  Alpha reciprocal() const { return Alpha(1.0 / value_); }

 private:
  double value_;
};

/// i.i.d. observations as alphabet indices, with counts and empirical measure.
class SampleData {
 public:
  SampleData(std::vector<std::size_t> observations, std::size_t alphabet_size);

  /// Observations listed in symbol order, counts[i] copies of symbol i.
  static SampleData from_counts(std::span<const std::size_t> counts);

  const std::vector<std::size_t>& observations() const noexcept { return observations_; }
  const std::vector<std::size_t>& counts() const noexcept { return counts_; }
  const Distribution& empirical() const noexcept { return empirical_; }
  std::size_t n() const noexcept { return observations_.size(); }
  std::size_t alphabet_size() const noexcept { return counts_.size(); }

 private:
  std::vector<std::size_t> observations_;
  std::vector<std::size_t> counts_;
  Distribution empirical_;
};

/// weights / sum(weights). Strict iff every entry is positive.
Distribution normalize(const Vector& weights);

/// Escort (alpha-scaled) measure P^a / sum P^a.
///
/// Zero entries are rejected for alpha < 1 unless `allow_boundary` is set;
/// estimators pass it for empirical measures, whose zeros are legitimate.
Distribution escort(const Distribution& p, Alpha alpha, bool allow_boundary = false);

/// (sum_x P(x)^a)^(1/a).
double alpha_norm(const Distribution& p, Alpha alpha);

/// Empirical measure of labelled observations.
SampleData empirical(std::span<const std::string> observations, const Alphabet& alphabet);

/// Max-shifted log(sum exp(v)).
double log_sum_exp(const Vector& v);

}  // namespace divproj
