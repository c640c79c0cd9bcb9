#include "divproj/estimators.hpp"

#include <cmath>

namespace divproj {
namespace {

Vector pow_vec(const Vector& v, double e) { return v.array().pow(e).matrix(); }

// P̂^α with 0^α = 0.
Vector emp_pow(const Distribution& emp, double a) {
  Vector r(emp.probs().size());
  for (Eigen::Index i = 0; i < r.size(); ++i) {
    const double v = emp.probs()(i);
    r(i) = v > 0.0 ? std::pow(v, a) : 0.0;
  }
  return r;
}

void require_sizes(const FamilySpec& spec, const Distribution& emp) {
  if (emp.size() != spec.m()) {
    throw Error(ErrorCode::InvalidArgument, "sample alphabet size " + std::to_string(emp.size()) +
                                                " does not match family size " +
                                                std::to_string(spec.m()));
  }
}

bool matched(const Estimator& est, const FamilySpec& spec) {
  return matched_family(est.kind) == spec.kind();
}

}  // namespace

const char* to_string(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::MLE: return "mle";
    case EstimatorKind::HellingerD: return "hellinger";
    case EstimatorKind::BasuB: return "basu";
    case EstimatorKind::JonesI: return "jones";
  }
  return "?";
}

EstimatorKind parse_estimator_kind(std::string_view name) {
  if (name == "mle") return EstimatorKind::MLE;
  if (name == "hellinger") return EstimatorKind::HellingerD;
  if (name == "basu") return EstimatorKind::BasuB;
  if (name == "jones") return EstimatorKind::JonesI;
  throw Error(ErrorCode::InvalidArgument, "unknown estimator kind '" + std::string(name) + "'");
}

FamilyKind matched_family(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::MLE: return FamilyKind::Exponential;
    case EstimatorKind::HellingerD: return FamilyKind::AlphaExponential;
    case EstimatorKind::BasuB: return FamilyKind::NonNormalizedAlphaPowerLaw;
    case EstimatorKind::JonesI: return FamilyKind::AlphaPowerLaw;
  }
  return FamilyKind::Exponential;
}

DivergenceKind matched_divergence(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::MLE: return DivergenceKind::KL;
    case EstimatorKind::HellingerD: return DivergenceKind::RenyiD;
    case EstimatorKind::BasuB: return DivergenceKind::DensityPowerB;
    case EstimatorKind::JonesI: return DivergenceKind::RelAlphaEntropyI;
  }
  return DivergenceKind::KL;
}

Vector bpow_normalizer_gradient(const FamilySpec& spec, const Vector& theta) {
  if (spec.kind() != FamilyKind::NonNormalizedAlphaPowerLaw) {
    throw Error(ErrorCode::InvalidArgument, "normalizer gradient needs the non-normalized family");
  }
  const FamilyPoint fp = evaluate(spec, theta);
  const Vector w = fp.p.probs().cwiseQuotient(fp.bracket);
  return -(spec.f() * w) / w.sum();
}

Matrix score_matrix(const FamilySpec& spec, const Vector& theta) {
  const FamilyPoint fp = evaluate(spec, theta);
  const Vector& p = fp.p.probs();
  const Matrix& f = spec.f();
  Matrix s(f.rows(), f.cols());
  switch (spec.kind()) {
    case FamilyKind::Exponential: {
      const Vector mean = f * p;
      s = f.colwise() - mean;
      break;
    }
    case FamilyKind::AlphaPowerLaw: {
      const Matrix g = f.array().rowwise() / fp.bracket.transpose().array();
      const Vector mean = g * p;
      s = (-g).colwise() + mean;
      break;
    }
    case FamilyKind::AlphaExponential: {
      const Matrix g = f.array().rowwise() / fp.bracket.transpose().array();
      const Vector mean = g * p;
      s = g.colwise() - mean;
      break;
    }
    case FamilyKind::NonNormalizedAlphaPowerLaw: {
      const Vector w = p.cwiseQuotient(fp.bracket);
      const Vector c = (f * w) / w.sum();
      s = (-(f.colwise() - c)).array().rowwise() / fp.bracket.transpose().array();
      break;
    }
  }
  return s;
}

Vector score(const FamilySpec& spec, const Vector& theta, std::size_t x) {
  if (x >= spec.m()) throw Error(ErrorCode::InvalidArgument, "symbol index out of range");
  return score_matrix(spec, theta).col(static_cast<Eigen::Index>(x));
}

double likelihood(const Estimator& est, const FamilySpec& spec, const Vector& theta,
                  const Distribution& emp) {
  require_sizes(spec, emp);
  const Vector p = eval_member(spec, theta).probs();
  const Vector& ph = emp.probs();
  const double a = est.alpha.value();
  if (est.is_mle()) {
    double l = 0.0;
    for (Eigen::Index i = 0; i < p.size(); ++i) {
      if (ph(i) > 0.0) l += ph(i) * std::log(p(i));
    }
    return l;
  }
  switch (est.kind) {
    case EstimatorKind::HellingerD:
      return std::log(emp_pow(emp, a).dot(pow_vec(p, 1.0 - a))) / (1.0 - a);
    case EstimatorKind::BasuB:
      return (ph.dot(a * pow_vec(p, a - 1.0) - Vector::Ones(p.size()))) / (a - 1.0) -
             pow_vec(p, a).sum();
    case EstimatorKind::JonesI:
      return a / (a - 1.0) * std::log(ph.dot(pow_vec(p, a - 1.0))) - std::log(pow_vec(p, a).sum());
    case EstimatorKind::MLE: break;
  }
  return 0.0;
}

Vector estimating_residual(const Estimator& est, const FamilySpec& spec, const Vector& theta,
                           const Distribution& emp) {
  require_sizes(spec, emp);
  const Vector p = eval_member(spec, theta).probs();
  const Matrix s = score_matrix(spec, theta);
  const Vector& ph = emp.probs();
  const double a = est.alpha.value();
  if (est.is_mle()) return s * ph;
  switch (est.kind) {
    case EstimatorKind::HellingerD:
      return s * emp_pow(emp, a).cwiseProduct(pow_vec(p, 1.0 - a));
    case EstimatorKind::BasuB: {
      const Vector pa1 = pow_vec(p, a - 1.0);
      return s * ph.cwiseProduct(pa1) - s * pow_vec(p, a);
    }
    case EstimatorKind::JonesI: {
      const Vector w1 = ph.cwiseProduct(pow_vec(p, a - 1.0));
      const Vector w2 = pow_vec(p, a);
      return s * w1 / w1.sum() - s * w2 / w2.sum();
    }
    case EstimatorKind::MLE: break;
  }
  return s * ph;
}

SolveReport solve_estimating_equation(const Estimator& est, const FamilySpec& spec,
                                      const SampleData& sample, const Vector& init,
                                      const NewtonOptions& opt) {
  const Distribution& emp = sample.empirical();
  require_sizes(spec, emp);
  ResidualFn r = [&](const Vector& t) { return estimating_residual(est, spec, t, emp); };
  const NewtonResult nr = solve_system(r, init, opt);
  SolveReport rep;
  rep.theta_star = nr.theta;
  rep.p_star = eval_member(spec, nr.theta);
  rep.residual_norm = nr.residual_inf;
  rep.iterations = static_cast<std::size_t>(nr.iterations);
  rep.trace = nr.trace;
  rep.route = Route::EstimatingEq;
  rep.multistart = nr.multistart;
  if (!matched(est, spec)) rep.note = "unmatched pair, no equivalence guarantee";
  return rep;
}

SolveReport maximize_likelihood(const Estimator& est, const FamilySpec& spec,
                                const SampleData& sample, const Vector& init,
                                double first_order_tol) {
  const Distribution& emp = sample.empirical();
  require_sizes(spec, emp);
  ObjectiveFn fn = [&](const Vector& t) { return likelihood(est, spec, t, emp); };
  const MaximizeResult mr = maximize(fn, init, {});
  const Vector er = estimating_residual(est, spec, mr.theta, emp);
  const double first_order = er.cwiseAbs().maxCoeff();
  if (!(first_order <= first_order_tol)) {
    throw NoConvergence("likelihood maximum fails the first-order check", mr.theta, first_order);
  }
  SolveReport rep;
  rep.theta_star = mr.theta;
  rep.p_star = eval_member(spec, mr.theta);
  rep.residual_norm = mr.gradient.cwiseAbs().maxCoeff();
  rep.iterations = static_cast<std::size_t>(mr.iterations);
  rep.trace = mr.trace;
  rep.route = Route::LikelihoodMax;
  if (!matched(est, spec)) rep.note = "unmatched pair, no equivalence guarantee";
  return rep;
}

}  // namespace divproj
