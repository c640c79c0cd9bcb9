#include "divproj/oracle.hpp"

#include "divproj/estimators.hpp"
#include "divproj/parallel.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace divproj {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void compositions(std::size_t left, std::size_t pos, std::vector<std::size_t>& cur,
                  std::vector<std::vector<std::size_t>>& out) {
  if (pos + 1 == cur.size()) {
    cur[pos] = left;
    out.push_back(cur);
    return;
  }
  for (std::size_t c = 0; c <= left; ++c) {
    cur[pos] = c;
    compositions(left - c, pos + 1, cur, out);
  }
}

// First index of the smallest finite value.
std::size_t first_min(const std::vector<double>& v) {
  std::size_t best = v.size();
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (std::isnan(v[i])) continue;
    if (best == v.size() || v[i] < v[best]) best = i;
  }
  return best;
}

double parse_double(std::string_view s) {
  std::string str(s);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(str, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != str.size() || str.empty()) {
    throw Error(ErrorCode::InputError, "bad number '" + str + "' in grid");
  }
  return v;
}

}  // namespace

SimplexGrid::SimplexGrid(std::size_t m, std::size_t resolution, bool interior_only)
    : m_(m), d_(resolution), interior_only_(interior_only) {
  if (m < 2 || resolution < 1) {
    throw Error(ErrorCode::InvalidArgument, "simplex grid needs m >= 2 and resolution >= 1");
  }
  std::vector<std::vector<std::size_t>> comps;
  std::vector<std::size_t> cur(m, 0);
  compositions(resolution, 0, cur, comps);
  std::vector<const std::vector<std::size_t>*> kept;
  for (const auto& c : comps) {
    bool interior = true;
    for (auto v : c) interior = interior && v > 0;
    if (!interior_only || interior) kept.push_back(&c);
  }
  points_.resize(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(kept.size()));
  for (std::size_t j = 0; j < kept.size(); ++j) {
    for (std::size_t i = 0; i < m; ++i) {
      points_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          static_cast<double>((*kept[j])[i]) / static_cast<double>(resolution);
    }
  }
}

std::size_t SimplexGrid::full_count(std::size_t m, std::size_t resolution) {
  // C(d + m - 1, m - 1)
  std::size_t n = resolution + m - 1;
  std::size_t r = m - 1;
  std::size_t c = 1;
  for (std::size_t i = 1; i <= r; ++i) c = c * (n - r + i) / i;
  return c;
}

std::size_t ThetaGrid::size() const {
  std::size_t n = 1;
  for (auto s : steps) n *= s;
  return n;
}

Vector ThetaGrid::point(std::size_t index) const {
  const auto k = static_cast<Eigen::Index>(steps.size());
  Vector t(k);
  // Last axis varies fastest.
  for (Eigen::Index i = k - 1; i >= 0; --i) {
    const std::size_t s = steps[static_cast<std::size_t>(i)];
    const std::size_t j = index % s;
    index /= s;
    t(i) = s == 1 ? lo(i) : lo(i) + (hi(i) - lo(i)) * static_cast<double>(j) / static_cast<double>(s - 1);
  }
  return t;
}

double ThetaGrid::cell() const {
  double c = 0.0;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    if (steps[i] > 1) {
      const auto ii = static_cast<Eigen::Index>(i);
      c = std::max(c, (hi(ii) - lo(ii)) / static_cast<double>(steps[i] - 1));
    }
  }
  return c;
}

ThetaGrid ThetaGrid::box(std::size_t k, double lo, double hi, std::size_t steps) {
  ThetaGrid g;
  g.lo = Vector::Constant(static_cast<Eigen::Index>(k), lo);
  g.hi = Vector::Constant(static_cast<Eigen::Index>(k), hi);
  g.steps.assign(k, steps);
  return g;
}

ThetaGrid ThetaGrid::parse(std::string_view text, std::size_t k) {
  std::vector<std::string_view> axes;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = text.find(',', start);
    axes.push_back(text.substr(start, comma == std::string_view::npos ? std::string_view::npos
                                                                      : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  if (axes.size() != 1 && axes.size() != k) {
    throw Error(ErrorCode::InputError, "grid needs one lo:hi:steps triple or one per parameter");
  }
  ThetaGrid g;
  g.lo.resize(static_cast<Eigen::Index>(k));
  g.hi.resize(static_cast<Eigen::Index>(k));
  g.steps.resize(k);
  for (std::size_t i = 0; i < k; ++i) {
    const std::string_view ax = axes.size() == 1 ? axes[0] : axes[i];
    const auto c1 = ax.find(':');
    const auto c2 = c1 == std::string_view::npos ? c1 : ax.find(':', c1 + 1);
    if (c2 == std::string_view::npos) {
      throw Error(ErrorCode::InputError, "grid axis '" + std::string(ax) + "' is not lo:hi:steps");
    }
    const double lo = parse_double(ax.substr(0, c1));
    const double hi = parse_double(ax.substr(c1 + 1, c2 - c1 - 1));
    const double st = parse_double(ax.substr(c2 + 1));
    if (!(st >= 1.0) || st != std::floor(st) || !(hi >= lo)) {
      throw Error(ErrorCode::InputError, "grid axis '" + std::string(ax) + "' is malformed");
    }
    g.lo(static_cast<Eigen::Index>(i)) = lo;
    g.hi(static_cast<Eigen::Index>(i)) = hi;
    g.steps[i] = static_cast<std::size_t>(st);
  }
  return g;
}

ForwardOracleResult grid_forward_min(DivergenceKind kind, Alpha alpha, const Distribution& q,
                                     const LinearFamilySpec* constraint, const SimplexGrid& grid,
                                     unsigned threads) {
  if (grid.m() != q.size()) throw Error(ErrorCode::InvalidArgument, "grid and Q sizes differ");
  const double band = 0.5 / static_cast<double>(grid.resolution());
  std::vector<double> values(grid.size(), kNaN);
  parallel_for(grid.size(), threads, [&](std::size_t j) {
    const Vector p = grid.points().col(static_cast<Eigen::Index>(j));
    if (constraint && (constraint->f() * p - constraint->a()).cwiseAbs().maxCoeff() > band) return;
    try {
      const double v = divergence(kind, Distribution::from_probs(p, false), q, alpha);
      if (std::isfinite(v)) values[j] = v;
    } catch (const Error&) {
    }
  });
  ForwardOracleResult res;
  for (double v : values) res.candidates += std::isnan(v) ? 0 : 1;
  const std::size_t best = first_min(values);
  if (best == values.size()) {
    throw Error(ErrorCode::EmptyFeasibleGrid, "no grid point satisfies the constraints");
  }
  res.index = best;
  res.value = values[best];
  res.p_best = Distribution::from_probs(grid.points().col(static_cast<Eigen::Index>(best)), false);
  return res;
}

Estimator likelihood_for(DivergenceKind kind, Alpha alpha) {
  switch (kind) {
    case DivergenceKind::KL: return {EstimatorKind::MLE, Alpha(1.0)};
    case DivergenceKind::RenyiD: return {EstimatorKind::HellingerD, alpha};
    case DivergenceKind::DensityPowerB: return {EstimatorKind::BasuB, alpha};
    case DivergenceKind::RelAlphaEntropyI: return {EstimatorKind::JonesI, alpha};
  }
  return {EstimatorKind::MLE, Alpha(1.0)};
}

ReverseOracleResult grid_reverse_min(DivergenceKind kind, Alpha alpha, const Distribution& emp,
                                     const FamilySpec& spec, const ThetaGrid& grid,
                                     unsigned threads) {
  if (grid.steps.size() != spec.k()) {
    throw Error(ErrorCode::InvalidArgument, "theta grid dimension does not match the family");
  }
  const Estimator est = likelihood_for(kind, alpha);
  const std::size_t n = grid.size();
  std::vector<double> div(n, kNaN);
  std::vector<double> neg_lik(n, kNaN);
  parallel_for(n, threads, [&](std::size_t j) {
    const Vector t = grid.point(j);
    try {
      const Distribution p = eval_member(spec, t);
      const double d = divergence(kind, emp, p, alpha);
      const double l = likelihood(est, spec, t, emp);
      if (std::isfinite(d) && std::isfinite(l)) {
        div[j] = d;
        neg_lik[j] = -l;
      }
    } catch (const Error& e) {
      if (e.code() != ErrorCode::DomainViolation && e.code() != ErrorCode::NormalizerNotFound &&
          e.code() != ErrorCode::DomainError) {
        throw;
      }
    }
  });
  ReverseOracleResult res;
  for (double v : div) res.admissible += std::isnan(v) ? 0 : 1;
  const std::size_t best = first_min(div);
  if (best == n) throw Error(ErrorCode::NoAdmissibleTheta, "no admissible theta on the grid");
  res.index = best;
  res.value = div[best];
  res.theta_best = grid.point(best);
  res.likelihood_index = first_min(neg_lik);
  res.likelihood_agrees = res.likelihood_index == best;
  return res;
}

}  // namespace divproj
