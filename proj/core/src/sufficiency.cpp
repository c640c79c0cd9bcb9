#include "divproj/sufficiency.hpp"

#include <cmath>
#include <limits>

namespace divproj {
namespace {

Vector pow_vec(const Vector& v, double e) { return v.array().pow(e).matrix(); }

Vector emp_pow(const Vector& v, double a) {
  Vector r(v.size());
  for (Eigen::Index i = 0; i < r.size(); ++i) r(i) = v(i) > 0.0 ? std::pow(v(i), a) : 0.0;
  return r;
}

void for_each_composition(std::size_t n, std::size_t m, std::vector<std::size_t>& cur,
                          std::size_t pos, const auto& fn) {
  if (pos + 1 == m) {
    cur[pos] = n;
    fn(cur);
    return;
  }
  for (std::size_t c = 0; c <= n; ++c) {
    cur[pos] = c;
    for_each_composition(n - c, m, cur, pos + 1, fn);
  }
}

}  // namespace

SufficientStatistic sufficient_statistic(FamilyKind kind, const Distribution& emp,
                                         const Distribution& q, const Matrix& f, Alpha alpha) {
  if (emp.size() != q.size() || static_cast<std::size_t>(f.cols()) != q.size()) {
    throw Error(ErrorCode::InvalidArgument, "sample, reference and statistics sizes differ");
  }
  if (!q.strictly_positive()) {
    throw Error(ErrorCode::DomainError, "reference measure must be strictly positive");
  }
  const double a = alpha.value();
  const Vector fbar = f * emp.probs();
  SufficientStatistic s{kind, fbar, {}};
  switch (kind) {
    case FamilyKind::Exponential: s.components_doc = "T1 = mean(f)"; break;
    case FamilyKind::NonNormalizedAlphaPowerLaw: s.components_doc = "T2 = mean(f)"; break;
    case FamilyKind::AlphaPowerLaw:
      s.value = fbar / emp.probs().dot(pow_vec(q.probs(), a - 1.0));
      s.components_doc = "T3 = mean(f) / mean(Q^(alpha-1))";
      break;
    case FamilyKind::AlphaExponential: {
      const Vector he = emp_pow(emp.probs(), a);
      const Vector esc = he / he.sum();
      s.value = (f * esc) / esc.dot(pow_vec(q.probs(), 1.0 - a));
      s.components_doc = "T4 = escort mean(f) / escort mean(Q^(1-alpha))";
      break;
    }
  }
  return s;
}

SufficientStatistic sufficient_statistic(FamilyKind kind, const SampleData& sample,
                                         const Distribution& q, const Matrix& f, Alpha alpha) {
  if (sample.n() == 0) throw Error(ErrorCode::EmptySample, "sample has no observations");
  return sufficient_statistic(kind, sample.empirical(), q, f, alpha);
}

Estimator matched_estimator(const FamilySpec& spec) {
  switch (spec.kind()) {
    case FamilyKind::Exponential: return {EstimatorKind::MLE, Alpha(1.0)};
    case FamilyKind::NonNormalizedAlphaPowerLaw: return {EstimatorKind::BasuB, spec.alpha()};
    case FamilyKind::AlphaPowerLaw: return {EstimatorKind::JonesI, spec.alpha()};
    case FamilyKind::AlphaExponential: return {EstimatorKind::HellingerD, spec.alpha()};
  }
  return {EstimatorKind::MLE, Alpha(1.0)};
}

LikelihoodSplit likelihood_decomposition(const FamilySpec& spec, const Vector& theta,
                                         const Distribution& emp) {
  const double a = spec.alpha().value();
  const FamilyPoint fp = evaluate(spec, theta);
  const Vector& q = spec.q().probs();
  const Vector& ph = emp.probs();
  const Vector t =
      sufficient_statistic(spec.kind(), emp, spec.q(), spec.f(), spec.alpha()).value;
  LikelihoodSplit out{};
  switch (spec.kind()) {
    case FamilyKind::Exponential: {
      out.g = theta.dot(t) - std::log(fp.z);
      out.h = ph.dot(q.array().log().matrix());
      break;
    }
    case FamilyKind::NonNormalizedAlphaPowerLaw: {
      out.g = -(a * fp.z + 1.0 / (a - 1.0) + a * theta.dot(t) + pow_vec(fp.p.probs(), a).sum());
      out.h = a / (a - 1.0) * ph.dot(pow_vec(q, a - 1.0));
      break;
    }
    case FamilyKind::AlphaPowerLaw: {
      out.g = a / (a - 1.0) * std::log(1.0 + (1.0 - a) * theta.dot(t)) - a * std::log(fp.z) -
              std::log(pow_vec(fp.p.probs(), a).sum());
      out.h = a / (a - 1.0) * std::log(ph.dot(pow_vec(q, a - 1.0)));
      break;
    }
    case FamilyKind::AlphaExponential: {
      out.g = std::log(1.0 + (1.0 - a) * theta.dot(t)) / (1.0 - a) - std::log(fp.z);
      out.h = std::log(emp_pow(ph, a).dot(pow_vec(q, 1.0 - a))) / (1.0 - a);
      break;
    }
  }
  return out;
}

FactorizationReport factorization_check(const FamilySpec& spec, const Distribution& sa,
                                        const Distribution& sb,
                                        const std::vector<Vector>& grid) {
  FactorizationReport rep;
  const Vector ta = sufficient_statistic(spec.kind(), sa, spec.q(), spec.f(), spec.alpha()).value;
  const Vector tb = sufficient_statistic(spec.kind(), sb, spec.q(), spec.f(), spec.alpha()).value;
  rep.t_gap = (ta - tb).cwiseAbs().maxCoeff();
  rep.equal_t = rep.t_gap <= kEqualStatisticTolerance;

  const Estimator est = matched_estimator(spec);
  std::vector<double> diff;
  double best_a = -std::numeric_limits<double>::infinity();
  double best_b = best_a;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!admissible(spec, grid[i])) continue;
    const double la = likelihood(est, spec, grid[i], sa);
    const double lb = likelihood(est, spec, grid[i], sb);
    if (la > best_a) {
      best_a = la;
      rep.argmax_a = i;
    }
    if (lb > best_b) {
      best_b = lb;
      rep.argmax_b = i;
    }
    diff.push_back(la - lb);
  }
  rep.grid_points = diff.size();
  if (diff.empty()) throw Error(ErrorCode::NoAdmissibleTheta, "no admissible grid point");
  double mean = 0.0;
  for (double d : diff) mean += d;
  mean /= static_cast<double>(diff.size());
  rep.mean_difference = mean;
  for (double d : diff) rep.max_deviation = std::max(rep.max_deviation, std::abs(d - mean));
  rep.argmax_equal = rep.argmax_a == rep.argmax_b;
  return rep;
}

std::optional<std::pair<std::vector<std::size_t>, std::vector<std::size_t>>> find_equal_statistic_pair(
    FamilyKind kind, const Distribution& q, const Matrix& f, Alpha alpha, std::size_t n_max) {
  const std::size_t m = q.size();
  struct Entry {
    std::vector<std::size_t> counts;
    Vector emp;
    Vector t;
  };
  std::vector<Entry> entries;
  std::vector<std::size_t> cur(m, 0);
  for (std::size_t n = 1; n <= n_max; ++n) {
    for_each_composition(n, m, cur, 0, [&](const std::vector<std::size_t>& c) {
      Vector p(static_cast<Eigen::Index>(m));
      for (std::size_t i = 0; i < m; ++i) {
        p(static_cast<Eigen::Index>(i)) = static_cast<double>(c[i]) / static_cast<double>(n);
      }
      const Distribution emp = Distribution::from_probs(p, false);
      entries.push_back({c, p, sufficient_statistic(kind, emp, q, f, alpha).value});
    });
  }
  for (std::size_t i = 0; i < entries.size(); ++i) {
    for (std::size_t j = i + 1; j < entries.size(); ++j) {
      if ((entries[i].emp - entries[j].emp).cwiseAbs().maxCoeff() <= 1e-12) continue;
      if ((entries[i].t - entries[j].t).cwiseAbs().maxCoeff() <= 1e-12) {
        return std::make_pair(entries[i].counts, entries[j].counts);
      }
    }
  }
  return std::nullopt;
}

}  // namespace divproj
