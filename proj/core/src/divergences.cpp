#include "divproj/divergences.hpp"

#include <cmath>

namespace divproj {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_sizes(const Distribution& p, const Distribution& q) {
  if (p.size() != q.size() || p.size() == 0) {
    throw Error(ErrorCode::InvalidArgument, "distributions have different sizes");
  }
}

double safe_log(double v) { return v > 0.0 ? std::log(v) : kNegInf; }

// log sum_x P(x)^a Q(x)^b over entries where both weights are defined;
// terms with a zero base and positive exponent vanish.
double log_power_sum(const Vector& p, double a, const Vector& q, double b) {
  Vector t(p.size());
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    double lp = 0.0;
    if (a != 0.0) {
      if (p(i) == 0.0) {
        if (a > 0.0) {
          t(i) = kNegInf;
          continue;
        }
        throw Error(ErrorCode::DomainError, "negative power of a zero probability");
      }
      lp = a * std::log(p(i));
    }
    double lq = 0.0;
    if (b != 0.0) {
      if (q(i) == 0.0) {
        if (b > 0.0) {
          t(i) = kNegInf;
          continue;
        }
        throw Error(ErrorCode::DomainError, "negative power of a zero probability");
      }
      lq = b * std::log(q(i));
    }
    t(i) = lp + lq;
  }
  return log_sum_exp(t);
}

}  // namespace

const char* to_string(DivergenceKind kind) {
  switch (kind) {
    case DivergenceKind::KL: return "kl";
    case DivergenceKind::RenyiD: return "renyi";
    case DivergenceKind::DensityPowerB: return "dpd";
    case DivergenceKind::RelAlphaEntropyI: return "rae";
  }
  return "?";
}

DivergenceKind parse_divergence_kind(std::string_view name) {
  if (name == "kl") return DivergenceKind::KL;
  if (name == "renyi") return DivergenceKind::RenyiD;
  if (name == "dpd") return DivergenceKind::DensityPowerB;
  if (name == "rae") return DivergenceKind::RelAlphaEntropyI;
  throw Error(ErrorCode::InvalidArgument, "unknown divergence kind '" + std::string(name) + "'");
}

double kl(const Distribution& p, const Distribution& q) {
  check_sizes(p, q);
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0) continue;
    if (q[i] == 0.0) {
      throw Error(ErrorCode::DomainError, "KL undefined: Q vanishes where P does not");
    }
    s += p[i] * std::log(p[i] / q[i]);
  }
  return s;
}

double entropy(const Distribution& p) {
  double h = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > 0.0) h -= p[i] * std::log(p[i]);
  }
  return h;
}

double renyi_d(const Distribution& p, const Distribution& q, Alpha alpha) {
  if (alpha.is_one()) return kl(p, q);
  check_sizes(p, q);
  const double a = alpha.value();
  if (a > 1.0) {
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (q[i] == 0.0 && p[i] > 0.0) {
        throw Error(ErrorCode::DomainError, "Renyi divergence infinite: Q vanishes where P does not");
      }
    }
  }
  const double ls = log_power_sum(p.probs(), a, q.probs(), 1.0 - a);
  if (ls == kNegInf) return kInfinite;  // disjoint supports, alpha < 1
  return ls / (a - 1.0);
}

double density_power_b(const Distribution& p, const Distribution& q, Alpha alpha) {
  if (alpha.is_one()) return kl(p, q);
  check_sizes(p, q);
  const double a = alpha.value();
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double pi = p[i];
    const double qi = q[i];
    if (pi == 0.0) {
      s += std::pow(qi, a);
      continue;
    }
    if (qi == 0.0) {
      if (a < 1.0) return kInfinite;
      s += std::pow(pi, a) / (a - 1.0);
      continue;
    }
    if (a == 2.0) {
      s += (pi - qi) * (pi - qi);
      continue;
    }
    const double qa1 = std::pow(qi, a - 1.0);
    s += (std::pow(pi, a) - a * pi * qa1 + (a - 1.0) * qa1 * qi) / (a - 1.0);
  }
  return s;
}

double rel_alpha_entropy_i(const Distribution& p, const Distribution& q, Alpha alpha) {
  if (alpha.is_one()) return kl(p, q);
  check_sizes(p, q);
  const double a = alpha.value();
  if (a < 1.0) {
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (q[i] == 0.0 && p[i] > 0.0) {
        throw Error(ErrorCode::DomainError,
                    "relative alpha-entropy infinite: Q vanishes where P does not");
      }
    }
  }
  const Vector ones = Vector::Ones(p.probs().size());
  // Restrict the cross sum to Supp(P) so that Q^(a-1) with Q = 0 is never formed there.
  Vector t(p.probs().size());
  for (Eigen::Index i = 0; i < t.size(); ++i) {
    const double pi = p.probs()(i);
    const double qi = q.probs()(i);
    t(i) = pi > 0.0 ? std::log(pi) + (a - 1.0) * safe_log(qi) : kNegInf;
  }
  const double lcross = log_sum_exp(t);
  if (lcross == kNegInf) {
    throw Error(ErrorCode::DomainError, "relative alpha-entropy infinite: supports are disjoint");
  }
  const double lp = log_power_sum(p.probs(), a, ones, 0.0);
  const double lq = log_power_sum(q.probs(), a, ones, 0.0);
  return a / (1.0 - a) * lcross - lp / (1.0 - a) + lq;
}

double divergence(DivergenceKind kind, const Distribution& p, const Distribution& q,
                  Alpha alpha) {
  switch (kind) {
    case DivergenceKind::KL: return kl(p, q);
    case DivergenceKind::RenyiD: return renyi_d(p, q, alpha);
    case DivergenceKind::DensityPowerB: return density_power_b(p, q, alpha);
    case DivergenceKind::RelAlphaEntropyI: return rel_alpha_entropy_i(p, q, alpha);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown divergence kind");
}

}  // namespace divproj
