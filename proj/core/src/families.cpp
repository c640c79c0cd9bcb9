#include "divproj/families.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>

#include <cmath>
#include <limits>
#include <sstream>

namespace divproj {
namespace {

bool power_law(FamilyKind kind) { return kind != FamilyKind::Exponential; }

Vector pow_vec(const Vector& v, double e) { return v.array().pow(e).matrix(); }

// Mass of the B(α) bracket, sum (c + s)^(1/(α-1)), and its derivative in s.
struct Mass {
  double value;
  double slope;
};

Mass bracket_mass(const Vector& c, double s, double alpha) {
  const double e = 1.0 / (alpha - 1.0);
  double v = 0.0;
  double d = 0.0;
  for (Eigen::Index i = 0; i < c.size(); ++i) {
    const double u = c(i) + s;
    const double w = std::pow(u, e);
    v += w;
    d += e * w / u;
  }
  return {v, d};
}

struct RootResult {
  double s;
  double mass;
};

// Solves mass(s) = 1 on s > -min(c). Monotone: increasing for α > 1,
// decreasing for α < 1.
RootResult solve_mass(const Vector& c, double alpha) {
  const double boundary = -c.minCoeff();
  const bool increasing = alpha > 1.0;
  const double a = 1.0 - alpha;  // Z = s / a

  auto fail = [&](double lo, double hi, const std::string& why) {
    double zlo = lo / a;
    double zhi = hi / a;
    if (zlo > zhi) std::swap(zlo, zhi);
    std::ostringstream os;
    os << "normalizer not found: " << why << " (Z bracket [" << zlo << ", " << zhi << "])";
    return NormalizerNotFound(os.str(), zlo, zhi);
  };

  // Bracket [lo, hi] in s with mass(lo) on one side of 1 and mass(hi) on the other.
  double lo;
  double hi;
  double step = std::max(1.0, std::abs(boundary));
  if (increasing) {
    double gap_mass = 0.0;
    const double e = 1.0 / (alpha - 1.0);
    for (Eigen::Index i = 0; i < c.size(); ++i) gap_mass += std::pow(c(i) - c.minCoeff(), e);
    if (gap_mass >= 1.0) {
      throw fail(boundary, boundary, "bracket mass exceeds 1 before every symbol is positive");
    }
    lo = boundary;
    hi = std::max(boundary, 0.0);
    int grow = 0;
    while (bracket_mass(c, hi, alpha).value < 1.0) {
      hi = std::max(boundary, 0.0) + step;
      step *= 2.0;
      if (++grow > 200) throw fail(lo, hi, "mass does not reach 1");
    }
  } else {
    hi = std::max(boundary, 0.0);
    int grow = 0;
    if (hi <= boundary) hi = boundary + step;
    while (bracket_mass(c, hi, alpha).value > 1.0) {
      hi = std::max(boundary, 0.0) + step;
      step *= 2.0;
      if (++grow > 200) throw fail(boundary, hi, "mass does not drop to 1");
    }
    double delta = std::max(hi - boundary, 1e-300);
    lo = boundary + delta;
    grow = 0;
    while (bracket_mass(c, lo, alpha).value < 1.0) {
      delta *= 0.5;
      lo = boundary + delta;
      if (++grow > 1100 || lo <= boundary) throw fail(boundary, hi, "mass does not rise to 1");
    }
  }

  // Safeguarded Newton: keep [lo, hi] bracketing the root, bisect when a
  // Newton step leaves it.
  auto below = [&](double m) { return increasing ? m < 1.0 : m > 1.0; };
  double s = increasing ? hi : lo;
  for (int it = 0; it < 300; ++it) {
    const Mass mv = bracket_mass(c, s, alpha);
    if (std::abs(mv.value - 1.0) <= 1e-15) return {s, mv.value};
    if (below(mv.value)) {
      lo = s;
    } else {
      hi = s;
    }
    double next = s - (mv.value - 1.0) / mv.slope;
    if (!(next > std::min(lo, hi) && next < std::max(lo, hi)) || !std::isfinite(next)) {
      next = 0.5 * (lo + hi);
    }
    if (std::abs(next - s) <= 1e-17 * std::max(1.0, std::abs(s))) {
      return {next, bracket_mass(c, next, alpha).value};
    }
    s = next;
  }
  const double m = bracket_mass(c, s, alpha).value;
  if (std::abs(m - 1.0) <= 1e-12) return {s, m};
  throw fail(lo, hi, "root iteration did not converge");
}

FamilyPoint from_bracket(const Vector& bracket, double exponent) {
  Vector w = pow_vec(bracket, exponent);
  const double z = w.sum();
  FamilyPoint fp;
  fp.z = z;
  fp.bracket = bracket;
  fp.p = Distribution::from_probs(w / z, true);
  return fp;
}

void require_theta(const FamilySpec& spec, const Vector& theta) {
  if (static_cast<std::size_t>(theta.size()) != spec.k()) {
    throw Error(ErrorCode::InvalidArgument, "theta has " + std::to_string(theta.size()) +
                                                " entries, family has " +
                                                std::to_string(spec.k()) + " statistics");
  }
  if (!theta.allFinite()) throw Error(ErrorCode::InvalidArgument, "theta is not finite");
}

Vector raw_bracket(const FamilySpec& spec, const Vector& theta) {
  const double a = spec.alpha().value();
  const Vector tf = spec.f().transpose() * theta;
  switch (spec.kind()) {
    case FamilyKind::Exponential: return tf;
    case FamilyKind::AlphaPowerLaw:
    case FamilyKind::NonNormalizedAlphaPowerLaw:
      return pow_vec(spec.q().probs(), a - 1.0) + (1.0 - a) * tf;
    case FamilyKind::AlphaExponential:
      return pow_vec(spec.q().probs(), 1.0 - a) + (1.0 - a) * tf;
  }
  return tf;
}

double fit_residual(const Matrix& design, const Vector& y) {
  if (!y.allFinite()) return std::numeric_limits<double>::infinity();
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(design);
  const Vector beta = cod.solve(y);
  return (design * beta - y).cwiseAbs().maxCoeff();
}

}  // namespace

Eigen::Index numerical_rank(const Matrix& a) {
  if (a.size() == 0) return 0;
  Eigen::JacobiSVD<Matrix> svd(a);
  const Vector& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  Eigen::Index r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) > 1e-10 * s(0)) ++r;
  }
  return r;
}

const char* to_string(FamilyKind kind) {
  switch (kind) {
    case FamilyKind::Exponential: return "exponential";
    case FamilyKind::AlphaPowerLaw: return "alpha_power_law";
    case FamilyKind::NonNormalizedAlphaPowerLaw: return "nonnormalized_alpha_power_law";
    case FamilyKind::AlphaExponential: return "alpha_exponential";
  }
  return "?";
}

FamilyKind parse_family_kind(std::string_view name) {
  if (name == "exponential" || name == "exp") return FamilyKind::Exponential;
  if (name == "alpha_power_law" || name == "mpow") return FamilyKind::AlphaPowerLaw;
  if (name == "nonnormalized_alpha_power_law" || name == "bpow") {
    return FamilyKind::NonNormalizedAlphaPowerLaw;
  }
  if (name == "alpha_exponential" || name == "aexp") return FamilyKind::AlphaExponential;
  throw Error(ErrorCode::InvalidArgument, "unknown family kind '" + std::string(name) + "'");
}

FamilySpec::FamilySpec(FamilyKind kind, Distribution q, Matrix f, Alpha alpha)
    : kind_(kind), q_(std::move(q)), f_(std::move(f)), alpha_(alpha) {
  if (!q_.strictly_positive()) {
    throw Error(ErrorCode::DomainError, "family reference measure must be strictly positive");
  }
  if (f_.rows() < 1 || static_cast<std::size_t>(f_.cols()) != q_.size()) {
    throw Error(ErrorCode::InvalidArgument,
                "statistics must be a k x m matrix with m = " + std::to_string(q_.size()));
  }
  if (!f_.allFinite()) throw Error(ErrorCode::InvalidArgument, "statistics are not finite");
  if (numerical_rank(f_) < f_.rows()) {
    throw Error(ErrorCode::InvalidArgument, "statistic rows are linearly dependent");
  }
  if (power_law(kind_) && alpha_.is_one()) {
    throw Error(ErrorCode::InvalidArgument,
                std::string(to_string(kind_)) + " family needs alpha != 1");
  }
  if (kind_ == FamilyKind::AlphaPowerLaw) {
    Matrix stacked(f_.rows() + 1, f_.cols());
    stacked.topRows(f_.rows()) = f_;
    stacked.row(f_.rows()) = pow_vec(q_.probs(), alpha_.value() - 1.0).transpose();
    if (numerical_rank(stacked) < stacked.rows()) {
      throw Error(ErrorCode::InvalidArgument,
                  "Q^(alpha-1) is linearly dependent on the statistic rows");
    }
  }
}

std::vector<std::size_t> domain_violations(const FamilySpec& spec, const Vector& theta) {
  require_theta(spec, theta);
  std::vector<std::size_t> bad;
  if (spec.kind() != FamilyKind::AlphaPowerLaw && spec.kind() != FamilyKind::AlphaExponential) {
    return bad;
  }
  const Vector u = raw_bracket(spec, theta);
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    if (!(u(i) > 0.0)) bad.push_back(static_cast<std::size_t>(i));
  }
  return bad;
}

bool admissible(const FamilySpec& spec, const Vector& theta) {
  try {
    evaluate(spec, theta);
    return true;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::DomainViolation || e.code() == ErrorCode::NormalizerNotFound ||
        e.code() == ErrorCode::DomainError) {
      return false;
    }
    throw;
  }
}

double normalizer_root(const FamilySpec& spec, const Vector& theta) {
  if (spec.kind() != FamilyKind::NonNormalizedAlphaPowerLaw) {
    throw Error(ErrorCode::InvalidArgument, "normalizer_root needs the non-normalized family");
  }
  return evaluate(spec, theta).z;
}

FamilyPoint evaluate(const FamilySpec& spec, const Vector& theta) {
  require_theta(spec, theta);
  const double a = spec.alpha().value();
  const Vector c = raw_bracket(spec, theta);
  switch (spec.kind()) {
    case FamilyKind::Exponential: {
      const Vector logw = spec.q().probs().array().log().matrix() + c;
      const double lse = log_sum_exp(logw);
      FamilyPoint fp;
      fp.z = std::exp(log_sum_exp(c + spec.q().probs().array().log().matrix()));
      fp.bracket = c;
      fp.p = Distribution::from_probs((logw.array() - lse).exp().matrix(), true);
      return fp;
    }
    case FamilyKind::AlphaPowerLaw:
    case FamilyKind::AlphaExponential: {
      auto bad = domain_violations(spec, theta);
      if (!bad.empty()) {
        std::ostringstream os;
        os << "bracket is not positive at symbol(s)";
        for (auto b : bad) os << ' ' << b;
        throw DomainViolation(os.str(), std::move(bad));
      }
      const double e = spec.kind() == FamilyKind::AlphaPowerLaw ? 1.0 / (a - 1.0) : 1.0 / (1.0 - a);
      return from_bracket(c, e);
    }
    case FamilyKind::NonNormalizedAlphaPowerLaw: {
      if (theta.isZero(0.0)) {
        FamilyPoint fp;
        fp.z = 0.0;
        fp.bracket = c;
        fp.p = spec.q();
        return fp;
      }
      const RootResult r = solve_mass(c, a);
      const Vector u = (c.array() + r.s).matrix();
      Vector w = pow_vec(u, 1.0 / (a - 1.0));
      FamilyPoint fp;
      fp.z = r.s / (1.0 - a);
      fp.bracket = u;
      fp.p = Distribution::from_probs(w / w.sum(), true);
      return fp;
    }
  }
  throw Error(ErrorCode::InvalidArgument, "unknown family kind");
}

Vector escort_parameter_map(const Vector& theta, const Distribution& q, Alpha alpha) {
  const double a = alpha.value();
  return -a * theta / std::pow(alpha_norm(q, alpha), 1.0 - a);
}

Vector escort_inverse_parameter_map(const Vector& theta_prime, const Distribution& q,
                                    Alpha alpha) {
  const double a = alpha.value();
  return -theta_prime * std::pow(alpha_norm(q, alpha), 1.0 - a) / a;
}

FamilySpec escort_target_spec(const FamilySpec& spec) {
  if (spec.kind() != FamilyKind::AlphaExponential) {
    throw Error(ErrorCode::InvalidArgument, "escort correspondence starts from an alpha-exponential family");
  }
  return FamilySpec(FamilyKind::AlphaPowerLaw, escort(spec.q(), spec.alpha()), spec.f(),
                    spec.alpha().reciprocal());
}

EscortImage escort_family_map(const FamilySpec& spec, const Vector& theta) {
  if (spec.kind() != FamilyKind::AlphaExponential) {
    throw Error(ErrorCode::InvalidArgument, "escort correspondence starts from an alpha-exponential family");
  }
  const Distribution p = eval_member(spec, theta);
  return {escort(p, spec.alpha()), escort_parameter_map(theta, spec.q(), spec.alpha())};
}

std::pair<Distribution, Vector> escort_inverse_map(const FamilySpec& spec,
                                                   const Vector& theta_prime) {
  const FamilySpec target = escort_target_spec(spec);
  const Distribution pe = eval_member(target, theta_prime);
  return {escort(pe, spec.alpha().reciprocal()),
          escort_inverse_parameter_map(theta_prime, spec.q(), spec.alpha())};
}

FamilySpec rebase(const FamilySpec& spec, const Vector& theta0) {
  return FamilySpec(spec.kind(), eval_member(spec, theta0), spec.f(), spec.alpha());
}

Vector rebased_parameter(const FamilySpec& spec, const Vector& theta0, const Vector& theta) {
  const double a = spec.alpha().value();
  const Vector d = theta - theta0;
  switch (spec.kind()) {
    case FamilyKind::Exponential:
    case FamilyKind::NonNormalizedAlphaPowerLaw: return d;
    case FamilyKind::AlphaPowerLaw: return d * std::pow(evaluate(spec, theta0).z, 1.0 - a);
    case FamilyKind::AlphaExponential: return d * std::pow(evaluate(spec, theta0).z, a - 1.0);
  }
  return d;
}

double membership_residual(const FamilySpec& spec, const Distribution& p) {
  if (p.size() != spec.m()) {
    throw Error(ErrorCode::InvalidArgument, "distribution and family sizes differ");
  }
  const double a = spec.alpha().value();
  const Eigen::Index m = static_cast<Eigen::Index>(spec.m());
  const Eigen::Index k = static_cast<Eigen::Index>(spec.k());
  Matrix design(m, k + 1);
  Vector y;
  const Vector& pp = p.probs();
  const Vector& qq = spec.q().probs();
  switch (spec.kind()) {
    case FamilyKind::Exponential:
      design.leftCols(k) = spec.f().transpose();
      design.col(k).setOnes();
      y = (pp.array().log() - qq.array().log()).matrix();
      break;
    case FamilyKind::AlphaPowerLaw:
      design.col(0) = pow_vec(qq, a - 1.0);
      design.rightCols(k) = spec.f().transpose();
      y = pow_vec(pp, a - 1.0);
      break;
    case FamilyKind::AlphaExponential:
      design.col(0) = pow_vec(qq, 1.0 - a);
      design.rightCols(k) = spec.f().transpose();
      y = pow_vec(pp, 1.0 - a);
      break;
    case FamilyKind::NonNormalizedAlphaPowerLaw:
      design.col(0).setOnes();
      design.rightCols(k) = spec.f().transpose();
      y = pow_vec(pp, a - 1.0) - pow_vec(qq, a - 1.0);
      break;
  }
  return fit_residual(design, y);
}

}  // namespace divproj
