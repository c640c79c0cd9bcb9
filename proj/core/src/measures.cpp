#include "divproj/measures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

namespace divproj {

Alphabet::Alphabet(std::vector<std::string> symbols) : symbols_(std::move(symbols)) {
  if (symbols_.size() < 2) {
    throw Error(ErrorCode::InvalidArgument, "alphabet needs at least two symbols");
  }
  std::set<std::string> seen;
  for (const auto& s : symbols_) {
    if (!seen.insert(s).second) {
      throw Error(ErrorCode::InvalidArgument, "duplicate alphabet label '" + s + "'");
    }
  }
}

Alphabet Alphabet::indexed(std::size_t m) {
  std::vector<std::string> labels;
  labels.reserve(m);
  for (std::size_t i = 0; i < m; ++i) labels.push_back(std::to_string(i));
  return Alphabet(std::move(labels));
}

std::optional<std::size_t> Alphabet::index_of(std::string_view label) const {
  auto it = std::find(symbols_.begin(), symbols_.end(), label);
  if (it == symbols_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - symbols_.begin());
}

Distribution Distribution::from_probs(Vector probs, bool strict) {
  if (probs.size() < 1) {
    throw Error(ErrorCode::InvalidArgument, "distribution must have at least one entry");
  }
  for (Eigen::Index i = 0; i < probs.size(); ++i) {
    if (!std::isfinite(probs(i))) {
      throw Error(ErrorCode::DomainError, "distribution entry is not finite");
    }
    if (probs(i) < 0.0) {
      if (probs(i) < -kNegativeClamp) {
        throw Error(ErrorCode::NegativeWeight,
                    "distribution entry " + std::to_string(i) + " is negative");
      }
      probs(i) = 0.0;
    }
  }
  const double sum = probs.sum();
  if (std::abs(sum - 1.0) > kSumTolerance) {
    if (std::abs(sum - 1.0) > kRepairTolerance) {
      std::ostringstream os;
      os.precision(17);
      os << "probabilities sum to " << sum << ", not 1";
      throw Error(ErrorCode::DomainError, os.str());
    }
    probs /= sum;
  }
  if (strict && (probs.array() <= 0.0).any()) {
    throw Error(ErrorCode::DomainError, "strictly positive distribution has a zero entry");
  }
  return Distribution(std::move(probs), strict);
}

Distribution Distribution::from_probs(std::initializer_list<double> probs, bool strict) {
  Vector v(static_cast<Eigen::Index>(probs.size()));
  Eigen::Index i = 0;
  for (double p : probs) v(i++) = p;
  return from_probs(std::move(v), strict);
}

Distribution Distribution::uniform(std::size_t m) {
  return Distribution(Vector::Constant(static_cast<Eigen::Index>(m), 1.0 / static_cast<double>(m)),
                      true);
}

bool Distribution::strictly_positive() const { return (probs_.array() > 0.0).all(); }

std::vector<std::size_t> Distribution::support() const {
  std::vector<std::size_t> s;
  for (Eigen::Index i = 0; i < probs_.size(); ++i) {
    if (probs_(i) > 0.0) s.push_back(static_cast<std::size_t>(i));
  }
  return s;
}

Alpha::Alpha(double value) : value_(value) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw Error(ErrorCode::InvalidArgument, "alpha must be a positive finite number");
  }
}

SampleData::SampleData(std::vector<std::size_t> observations, std::size_t alphabet_size)
    : observations_(std::move(observations)), counts_(alphabet_size, 0) {
  if (observations_.empty()) {
    throw Error(ErrorCode::EmptySample, "sample has no observations");
  }
  for (std::size_t obs : observations_) {
    if (obs >= alphabet_size) {
      throw Error(ErrorCode::UnknownLabel,
                  "observation index " + std::to_string(obs) + " outside alphabet");
    }
    ++counts_[obs];
  }
  Vector p(static_cast<Eigen::Index>(alphabet_size));
  const double n = static_cast<double>(observations_.size());
  for (std::size_t i = 0; i < alphabet_size; ++i) {
    p(static_cast<Eigen::Index>(i)) = static_cast<double>(counts_[i]) / n;
  }
  empirical_ = Distribution::from_probs(std::move(p), false);
}

SampleData SampleData::from_counts(std::span<const std::size_t> counts) {
  std::vector<std::size_t> obs;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    obs.insert(obs.end(), counts[i], i);
  }
  return SampleData(std::move(obs), counts.size());
}

Distribution normalize(const Vector& weights) {
  if (weights.size() == 0) {
    throw Error(ErrorCode::AllZero, "empty weight vector");
  }
  Vector w = weights;
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    if (!std::isfinite(w(i))) {
      throw Error(ErrorCode::InvalidArgument, "weight is not finite");
    }
    if (w(i) < 0.0) {
      if (w(i) < -kNegativeClamp) {
        throw Error(ErrorCode::NegativeWeight, "weight " + std::to_string(i) + " is negative");
      }
      w(i) = 0.0;
    }
  }
  const double sum = w.sum();
  if (!(sum > 0.0)) {
    throw Error(ErrorCode::AllZero, "weights sum to zero");
  }
  w /= sum;
  const bool strict = (w.array() > 0.0).all();
  return Distribution::from_probs(std::move(w), strict);
}

double log_sum_exp(const Vector& v) {
  const double mx = v.maxCoeff();
  if (!std::isfinite(mx)) return mx;
  return mx + std::log((v.array() - mx).exp().sum());
}

Distribution escort(const Distribution& p, Alpha alpha, bool allow_boundary) {
  if (alpha.is_one()) return p;
  const double a = alpha.value();
  if (a < 1.0 && !allow_boundary && !p.strictly_positive()) {
    throw Error(ErrorCode::DomainError, "escort with alpha < 1 needs a strictly positive measure");
  }
  // Work in logs so that large alpha does not underflow the small entries.
  const Vector& pr = p.probs();
  Vector logw(pr.size());
  for (Eigen::Index i = 0; i < pr.size(); ++i) {
    logw(i) = pr(i) > 0.0 ? a * std::log(pr(i)) : -std::numeric_limits<double>::infinity();
  }
  const double lse = log_sum_exp(logw);
  // Eigen's vectorized exp clamps -inf to a denormal, so zeros are kept explicitly.
  Vector w = (pr.array() > 0.0).select((logw.array() - lse).exp(), 0.0);
  const bool strict = p.strict() && (w.array() > 0.0).all();
  return Distribution::from_probs(std::move(w), strict);
}

double alpha_norm(const Distribution& p, Alpha alpha) {
  const double a = alpha.value();
  if (alpha.is_one()) return p.probs().sum();
  double s = 0.0;
  for (Eigen::Index i = 0; i < p.probs().size(); ++i) {
    const double v = p.probs()(i);
    if (v > 0.0) s += std::pow(v, a);
  }
  return std::pow(s, 1.0 / a);
}

SampleData empirical(std::span<const std::string> observations, const Alphabet& alphabet) {
  if (observations.empty()) {
    throw Error(ErrorCode::EmptySample, "sample has no observations");
  }
  std::vector<std::size_t> idx;
  idx.reserve(observations.size());
  for (std::size_t j = 0; j < observations.size(); ++j) {
    auto i = alphabet.index_of(observations[j]);
    if (!i) {
      throw Error(ErrorCode::UnknownLabel, "observation " + std::to_string(j) + " has label '" +
                                               observations[j] + "' not in the alphabet");
    }
    idx.push_back(*i);
  }
  return SampleData(std::move(idx), alphabet.size());
}

}  // namespace divproj
