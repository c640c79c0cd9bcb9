#include "divproj/sampling.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <limits>

namespace divproj {

std::size_t draw_symbol(const Distribution& p, std::mt19937_64& rng) {
  const double u = uniform01(rng);
  double acc = 0.0;
  const std::size_t m = p.size();
  for (std::size_t i = 0; i < m; ++i) {
    acc += p[i];
    if (u < acc) return i;
  }
  // Round-off left u above the last partial sum; take the last charged symbol.
  for (std::size_t i = m; i-- > 0;) {
    if (p[i] > 0.0) return i;
  }
  return m - 1;
}

SampleData sample_distribution(const Distribution& p, std::size_t n,
                               const std::optional<Contamination>& contamination,
                               std::uint64_t seed) {
  if (n == 0) throw Error(ErrorCode::EmptySample, "sample size must be at least 1");
  if (contamination) {
    if (!(contamination->rate >= 0.0 && contamination->rate < 1.0)) {
      throw Error(ErrorCode::InvalidArgument, "contamination rate must be in [0, 1)");
    }
    if (contamination->outlier_symbol >= p.size()) {
      throw Error(ErrorCode::InvalidArgument, "outlier symbol outside the alphabet");
    }
  }
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> obs;
  obs.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t x = draw_symbol(p, rng);
    if (contamination && uniform01(rng) < contamination->rate) x = contamination->outlier_symbol;
    obs.push_back(x);
  }
  return SampleData(std::move(obs), p.size());
}

SampleData sample_generator(const FamilySpec& spec, const Vector& theta, std::size_t n,
                            const std::optional<Contamination>& contamination,
                            std::uint64_t seed) {
  return sample_distribution(eval_member(spec, theta), n, contamination, seed);
}

Distribution random_member(const LinearFamilySpec& l, const Distribution& start,
                           std::mt19937_64& rng, int steps) {
  std::vector<Eigen::Index> idx;
  for (std::size_t x = 0; x < l.m(); ++x) {
    if (l.support()[x]) idx.push_back(static_cast<Eigen::Index>(x));
  }
  const auto s = static_cast<Eigen::Index>(idx.size());
  const Eigen::Index k = l.f().rows();
  Matrix a(k + 1, s);
  for (Eigen::Index j = 0; j < s; ++j) {
    a.block(0, j, k, 1) = l.f().col(idx[static_cast<std::size_t>(j)]);
    a(k, j) = 1.0;
  }
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeFullV);
  Eigen::Index rank = 0;
  const Vector& sv = svd.singularValues();
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > 1e-10 * sv(0)) ++rank;
  }
  const Matrix null = svd.matrixV().rightCols(s - rank);
  Vector p = start.probs();
  if (null.cols() == 0) return start;
  std::normal_distribution<double> normal;
  for (int step = 0; step < steps; ++step) {
    Vector coef(null.cols());
    for (Eigen::Index i = 0; i < coef.size(); ++i) coef(i) = normal(rng);
    const Vector dir = null * coef;
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < s; ++j) {
      const double pj = p(idx[static_cast<std::size_t>(j)]);
      if (dir(j) > 1e-15) lo = std::max(lo, -pj / dir(j));
      if (dir(j) < -1e-15) hi = std::min(hi, -pj / dir(j));
    }
    if (!std::isfinite(lo) || !std::isfinite(hi) || hi <= lo) continue;
    const double t = lo + (hi - lo) * (0.05 + 0.9 * uniform01(rng));
    for (Eigen::Index j = 0; j < s; ++j) p(idx[static_cast<std::size_t>(j)]) += t * dir(j);
    p = p.cwiseMax(0.0);
  }
  return Distribution::from_probs(p / p.sum(), false);
}

}  // namespace divproj
