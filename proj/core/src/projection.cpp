#include "divproj/projection.hpp"

#include "divproj/divergences.hpp"
#include "divproj/linear_program.hpp"

#include <Eigen/Cholesky>
#include <Eigen/QR>

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

void require_kind(const FamilySpec& spec, FamilyKind kind, const char* what) {
  if (spec.kind() != kind) {
    throw Error(ErrorCode::InvalidArgument, std::string(what) + " needs a " + to_string(kind) +
                                                " family, got " + to_string(spec.kind()));
  }
}

// ---------------------------------------------------------------------------
// Dual Newton for min sum_x phi_x(p_x) s.t. A p = b, p >= 0, where
// phi_x(p) = (p^α - α p c_x)/(α-1) and c = Q^(α-1) for B_α. At α = 2 with an
// arbitrary c this is the Euclidean projection of c onto the polytope.
//
// Stationarity gives p = [c + ((α-1)/α) t]_+^(1/(α-1)) with t = A'η; the
// dual g(η) = sum [phi(p) - p t] + η'b is concave and maximized by Newton
// steps with backtracking.
struct DualSolution {
  Vector p;
  Vector eta;
  Vector u;
  int iterations = 0;
  bool converged = false;
};

struct DualEval {
  Vector u;
  Vector p;
  double value;
  bool ok;
};

DualEval dual_eval(const Vector& c, const Matrix& a, const Vector& b, double alpha,
                   const Vector& eta) {
  DualEval ev;
  const Vector t = a.transpose() * eta;
  ev.u = c + ((alpha - 1.0) / alpha) * t;
  ev.p.resize(c.size());
  ev.ok = true;
  double v = eta.dot(b);
  for (Eigen::Index i = 0; i < c.size(); ++i) {
    const double u = ev.u(i);
    double p = 0.0;
    if (alpha > 1.0) {
      p = u > 0.0 ? std::pow(u, 1.0 / (alpha - 1.0)) : 0.0;
    } else {
      if (!(u > 0.0)) {
        ev.ok = false;
        ev.value = -std::numeric_limits<double>::infinity();
        return ev;
      }
      p = std::pow(u, 1.0 / (alpha - 1.0));
    }
    ev.p(i) = p;
    v += (std::pow(p, alpha) - alpha * p * c(i)) / (alpha - 1.0) - p * t(i);
  }
  ev.value = v;
  ev.ok = std::isfinite(v);
  return ev;
}

DualSolution dual_solve(const Vector& c, const Matrix& a, const Vector& b, double alpha,
                        int max_iterations = 300) {
  DualSolution sol;
  sol.eta = Vector::Zero(a.rows());
  DualEval ev = dual_eval(c, a, b, alpha, sol.eta);
  if (!ev.ok) throw Error(ErrorCode::DomainError, "dual start is outside the domain");
  const double tol = 1e-14;
  for (sol.iterations = 0; sol.iterations < max_iterations; ++sol.iterations) {
    const Vector grad = b - a * ev.p;
    const double gnorm = grad.cwiseAbs().maxCoeff();
    if (gnorm <= tol) {
      sol.converged = true;
      break;
    }
    Vector d(c.size());
    for (Eigen::Index i = 0; i < c.size(); ++i) {
      const double u = ev.u(i);
      d(i) = u > 0.0 ? std::pow(u, (2.0 - alpha) / (alpha - 1.0)) / alpha : 0.0;
    }
    const Matrix h = a * d.asDiagonal() * a.transpose();
    Vector step;
    double reg = 0.0;
    const double scale = std::max(1.0, h.diagonal().cwiseAbs().maxCoeff());
    for (int attempt = 0; attempt < 12; ++attempt) {
      Eigen::LDLT<Matrix> ldlt(h + reg * Matrix::Identity(h.rows(), h.cols()));
      if (ldlt.info() == Eigen::Success && ldlt.isPositive()) {
        step = ldlt.solve(grad);
        if (step.allFinite() && (ldlt.vectorD().array() > 1e-14 * scale).all()) break;
      }
      reg = reg == 0.0 ? 1e-12 * scale : reg * 100.0;
      step.resize(0);
    }
    if (step.size() == 0) step = grad;
    const double slope = grad.dot(step);
    double s = 1.0;
    bool accepted = false;
    for (int halving = 0; halving <= 60; ++halving, s *= 0.5) {
      const Vector cand = sol.eta + s * step;
      DualEval ce = dual_eval(c, a, b, alpha, cand);
      if (!ce.ok) continue;
      const bool armijo = ce.value >= ev.value + 1e-4 * s * slope;
      // Near the optimum the dual value no longer resolves progress; accept
      // steps that shrink the constraint residual instead.
      const bool residual_drop =
          gnorm < 1e-6 && (b - a * ce.p).cwiseAbs().maxCoeff() <= 0.5 * gnorm;
      if (armijo || residual_drop) {
        sol.eta = cand;
        ev = std::move(ce);
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      sol.converged = gnorm <= 1e-11;
      break;
    }
  }
  if (!sol.converged) {
    sol.converged = (b - a * ev.p).cwiseAbs().maxCoeff() <= 1e-11;
  }
  sol.p = ev.p;
  sol.u = ev.u;
  return sol;
}

struct Reduced {
  std::vector<Eigen::Index> idx;  // symbols of Supp(L)
  Matrix a;                       // [f_S; 1]
  Vector b;                       // [a; 1]
};

Reduced reduce(const LinearFamilySpec& l) {
  Reduced r;
  for (std::size_t x = 0; x < l.m(); ++x) {
    if (l.support()[x]) r.idx.push_back(static_cast<Eigen::Index>(x));
  }
  const Eigen::Index k = l.f().rows();
  const auto s = static_cast<Eigen::Index>(r.idx.size());
  r.a.resize(k + 1, s);
  for (Eigen::Index j = 0; j < s; ++j) {
    r.a.block(0, j, k, 1) = l.f().col(r.idx[static_cast<std::size_t>(j)]);
    r.a(k, j) = 1.0;
  }
  r.b.resize(k + 1);
  r.b.head(k) = l.a();
  r.b(k) = 1.0;
  return r;
}

Vector scatter(const Reduced& r, const Vector& v, Eigen::Index m) {
  Vector out = Vector::Zero(m);
  for (std::size_t j = 0; j < r.idx.size(); ++j) out(r.idx[j]) = v(static_cast<Eigen::Index>(j));
  return out;
}

// Projected gradient on the polytope; the projection is the dual solver at α = 2.
Vector projected_gradient(const Vector& qs, const Matrix& a, const Vector& b, double alpha) {
  const Vector cq = pow_vec(qs, alpha - 1.0);
  auto objective = [&](const Vector& p) {
    double v = 0.0;
    for (Eigen::Index i = 0; i < p.size(); ++i) {
      v += (std::pow(p(i), alpha) - alpha * p(i) * cq(i)) / (alpha - 1.0);
    }
    return v;
  };
  auto project = [&](const Vector& y) { return dual_solve(y, a, b, 2.0).p; };
  Vector p = project(qs);
  double f = objective(p);
  double step = 1.0;
  for (int it = 0; it < 5000; ++it) {
    Vector grad(p.size());
    for (Eigen::Index i = 0; i < p.size(); ++i) {
      const double pi = std::max(p(i), 1e-300);
      grad(i) = alpha / (alpha - 1.0) * (std::pow(pi, alpha - 1.0) - cq(i));
      if (!std::isfinite(grad(i))) grad(i) = -1e300;
    }
    bool moved = false;
    for (int halving = 0; halving < 60; ++halving, step *= 0.5) {
      const Vector cand = project(p - step * grad);
      const double fc = objective(cand);
      if (std::isfinite(fc) && fc < f) {
        moved = (p - cand).cwiseAbs().maxCoeff() > 1e-16;
        p = cand;
        f = fc;
        break;
      }
    }
    if (!moved) break;
    step *= 2.0;
  }
  return p;
}

ForwardProjectionResult finish(const Distribution& q, const LinearFamilySpec& l, double alpha,
                               const Reduced& r, const Vector& ps, const Vector& eta,
                               int iterations, bool fallback) {
  const Eigen::Index m = static_cast<Eigen::Index>(l.m());
  const Eigen::Index k = l.f().rows();
  ForwardProjectionResult res;
  Vector p = scatter(r, ps, m);
  res.p_star = Distribution::from_probs(p, false);
  res.iterations = iterations;
  res.fallback_used = fallback;
  res.support_mask.resize(static_cast<std::size_t>(m));
  for (Eigen::Index x = 0; x < m; ++x) res.support_mask[static_cast<std::size_t>(x)] = p(x) > 0.0;

  const Vector eta_f = eta.head(k);
  const double eta_0 = eta(k);
  res.theta = -eta_f / alpha;
  res.z = -eta_0 / alpha;
  res.kkt.lambda = eta_f;
  res.kkt.nu = -(eta_0 + eta_f.dot(l.a()));
  res.kkt.mu = Vector::Zero(m);
  if (alpha > 1.0) {
    const Vector t = l.f().transpose() * eta_f + Vector::Constant(m, eta_0);
    for (Eigen::Index x = 0; x < m; ++x) {
      const double qa = std::pow(q.probs()(x), alpha - 1.0);
      const double pa = p(x) > 0.0 ? std::pow(p(x), alpha - 1.0) : 0.0;
      res.kkt.mu(x) = alpha / (alpha - 1.0) * (pa - qa) - t(x);
    }
  }
  res.objective = density_power_b(res.p_star, q, Alpha(alpha));
  return res;
}

}  // namespace

const char* to_string(ProjectionKind kind) {
  switch (kind) {
    case ProjectionKind::IProj: return "iproj";
    case ProjectionKind::BProj: return "bproj";
    case ProjectionKind::IAlphaProj: return "ialpha";
    case ProjectionKind::DAlphaProj: return "dalpha";
  }
  return "?";
}

ProjectionKind parse_projection_kind(std::string_view name) {
  if (name == "iproj") return ProjectionKind::IProj;
  if (name == "bproj") return ProjectionKind::BProj;
  if (name == "ialpha") return ProjectionKind::IAlphaProj;
  if (name == "dalpha") return ProjectionKind::DAlphaProj;
  throw Error(ErrorCode::InvalidArgument, "unknown projection kind '" + std::string(name) + "'");
}

ProjectionKind matched_projection(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::MLE: return ProjectionKind::IProj;
    case EstimatorKind::HellingerD: return ProjectionKind::DAlphaProj;
    case EstimatorKind::BasuB: return ProjectionKind::BProj;
    case EstimatorKind::JonesI: return ProjectionKind::IAlphaProj;
  }
  return ProjectionKind::IProj;
}

FamilyKind matched_family(ProjectionKind kind) {
  switch (kind) {
    case ProjectionKind::IProj: return FamilyKind::Exponential;
    case ProjectionKind::BProj: return FamilyKind::NonNormalizedAlphaPowerLaw;
    case ProjectionKind::IAlphaProj: return FamilyKind::AlphaPowerLaw;
    case ProjectionKind::DAlphaProj: return FamilyKind::AlphaExponential;
  }
  return FamilyKind::Exponential;
}

LinearFamilySpec::LinearFamilySpec(Matrix f, Vector a) : f_(std::move(f)), a_(std::move(a)) {
  if (f_.rows() != a_.size() || f_.rows() < 1 || f_.cols() < 2) {
    throw Error(ErrorCode::InvalidArgument, "linear family needs a k x m matrix and k targets");
  }
  if (!f_.allFinite() || !a_.allFinite()) {
    throw Error(ErrorCode::InvalidArgument, "linear family entries are not finite");
  }
  support_ = linear_family_support(f_, a_);
  if (support_.empty()) {
    throw Error(ErrorCode::Infeasible, "linear family is empty: no distribution meets f P = a");
  }
}

bool LinearFamilySpec::contains(const Distribution& p, double tol) const {
  if (p.size() != m()) return false;
  return (f_ * p.probs() - a_).cwiseAbs().maxCoeff() <= tol;
}

Vector projection_residual(ProjectionKind kind, const FamilySpec& spec, const Vector& theta,
                           const Distribution& emp) {
  if (emp.size() != spec.m()) {
    throw Error(ErrorCode::InvalidArgument, "sample and family sizes differ");
  }
  const double a = spec.alpha().value();
  const Vector p = eval_member(spec, theta).probs();
  const Matrix& f = spec.f();
  const Vector fbar = f * emp.probs();
  switch (kind) {
    case ProjectionKind::IProj:
    case ProjectionKind::BProj: return f * p - fbar;
    case ProjectionKind::IAlphaProj: {
      const Vector qa = pow_vec(spec.q().probs(), a - 1.0);
      return f * p - (p.dot(qa) / emp.probs().dot(qa)) * fbar;
    }
    case ProjectionKind::DAlphaProj: return dalpha_forms(spec, theta, emp).escort;
  }
  return f * p - fbar;
}

DAlphaForms dalpha_forms(const FamilySpec& spec, const Vector& theta, const Distribution& emp) {
  const double a = spec.alpha().value();
  const Vector p = eval_member(spec, theta).probs();
  const Matrix& f = spec.f();
  const Vector q1a = pow_vec(spec.q().probs(), 1.0 - a);
  const Vector pa = pow_vec(p, a);
  const Vector ha = emp_pow(emp.probs(), a);
  DAlphaForms out;
  out.power_mass = pa.sum();
  out.sums = f * pa - (pa.dot(q1a) / ha.dot(q1a)) * (f * ha);
  const Vector pe = pa / pa.sum();
  const Vector he = ha / ha.sum();
  out.escort = f * pe - (pe.dot(q1a) / he.dot(q1a)) * (f * he);
  return out;
}

SolveReport solve_projection_equation(ProjectionKind kind, const FamilySpec& spec,
                                      const SampleData& sample, const Vector& init,
                                      const NewtonOptions& opt) {
  const Distribution& emp = sample.empirical();
  ResidualFn r = [&](const Vector& t) { return projection_residual(kind, spec, t, emp); };
  const NewtonResult nr = solve_system(r, init, opt);
  SolveReport rep;
  rep.theta_star = nr.theta;
  rep.p_star = eval_member(spec, nr.theta);
  rep.residual_norm = nr.residual_inf;
  rep.iterations = static_cast<std::size_t>(nr.iterations);
  rep.trace = nr.trace;
  rep.route = Route::ProjectionEq;
  rep.multistart = nr.multistart;
  if (matched_family(kind) != spec.kind()) rep.note = "unmatched pair, no equivalence guarantee";
  return rep;
}

ForwardProjectionResult forward_b_projection(const Distribution& q, const LinearFamilySpec& l,
                                             Alpha alpha) {
  if (!q.strictly_positive()) {
    throw Error(ErrorCode::DomainError, "forward projection needs a strictly positive Q");
  }
  if (q.size() != l.m()) throw Error(ErrorCode::InvalidArgument, "Q and linear family sizes differ");
  if (alpha.is_one()) {
    throw Error(ErrorCode::InvalidArgument, "forward B-projection needs alpha != 1");
  }
  const double a = alpha.value();
  const Reduced r = reduce(l);
  Vector qs(static_cast<Eigen::Index>(r.idx.size()));
  for (std::size_t j = 0; j < r.idx.size(); ++j) qs(static_cast<Eigen::Index>(j)) = q.probs()(r.idx[j]);
  const Vector c = pow_vec(qs, a - 1.0);

  DualSolution sol = dual_solve(c, r.a, r.b, a);
  if (sol.converged) return finish(q, l, a, r, sol.p, sol.eta, sol.iterations, false);

  // Fallback: primal projected gradient, then recover (θ, Z) by a fit.
  const Vector ps = projected_gradient(qs, r.a, r.b, a);
  if ((r.a * ps - r.b).cwiseAbs().maxCoeff() > 1e-10) {
    Vector best(r.a.rows());
    best.setZero();
    throw NoConvergence("forward projection did not converge", best,
                        (r.a * ps - r.b).cwiseAbs().maxCoeff());
  }
  const Eigen::Index k = l.f().rows();
  Vector eta = Vector::Zero(k + 1);
  ForwardProjectionResult res = finish(q, l, a, r, ps, eta, sol.iterations, true);
  const ForwardFormFit fit = forward_form_residual(q, l, alpha, res.p_star,
                                                   Vector::Zero(k), 0.0);
  eta.head(k) = -a * fit.theta;
  eta(k) = -a * fit.z;
  return finish(q, l, a, r, ps, eta, sol.iterations, true);
}

ForwardFormFit forward_form_residual(const Distribution& q, const LinearFamilySpec& l,
                                     Alpha alpha, const Distribution& p,
                                     const Vector& hint_theta, double hint_z) {
  const double a = alpha.value();
  const Eigen::Index k = l.f().rows();
  const Eigen::Index m = static_cast<Eigen::Index>(l.m());
  std::vector<Eigen::Index> sp;
  for (Eigen::Index x = 0; x < m; ++x) {
    if (p.probs()(x) > 0.0) sp.push_back(x);
  }
  const auto ns = static_cast<Eigen::Index>(sp.size());
  Matrix d(ns, k + 1);
  Vector y(ns);
  for (Eigen::Index j = 0; j < ns; ++j) {
    const Eigen::Index x = sp[static_cast<std::size_t>(j)];
    d(j, 0) = 1.0;
    d.block(j, 1, 1, k) = l.f().col(x).transpose();
    y(j) = (std::pow(p.probs()(x), a - 1.0) - std::pow(q.probs()(x), a - 1.0)) / (1.0 - a);
  }
  Vector beta0(k + 1);
  beta0(0) = hint_z;
  beta0.tail(k) = hint_theta;
  const Vector beta = beta0 + Eigen::CompleteOrthogonalDecomposition<Matrix>(d).solve(y - d * beta0);

  ForwardFormFit fit;
  fit.z = beta(0);
  fit.theta = beta.tail(k);
  double worst = 0.0;
  for (Eigen::Index x = 0; x < m; ++x) {
    double formula = 0.0;
    if (l.support()[static_cast<std::size_t>(x)]) {
      const double u = std::pow(q.probs()(x), a - 1.0) +
                       (1.0 - a) * (fit.z + fit.theta.dot(l.f().col(x)));
      if (a > 1.0) {
        formula = u > 0.0 ? std::pow(u, 1.0 / (a - 1.0)) : 0.0;
      } else {
        formula = u > 0.0 ? std::pow(u, 1.0 / (a - 1.0)) : std::numeric_limits<double>::infinity();
      }
    }
    worst = std::max(worst, std::abs(p.probs()(x) - formula));
  }
  fit.residual = worst;
  return fit;
}

ForwardProjectionResult forward_b_projection(const Distribution& q, const ConvexSetSpec& set,
                                             Alpha alpha) {
  const Eigen::Index ni = set.g.rows();
  if (ni > 16) throw Error(ErrorCode::InvalidArgument, "too many inequality constraints");
  if (set.g.rows() > 0 && set.g.cols() != set.f.cols()) {
    throw Error(ErrorCode::InvalidArgument, "inequality matrix has the wrong width");
  }
  std::optional<ForwardProjectionResult> best;
  Eigen::Index best_mask = 0;
  for (Eigen::Index mask = 0; mask < (Eigen::Index{1} << ni); ++mask) {
    std::vector<Eigen::Index> rows;
    for (Eigen::Index i = 0; i < ni; ++i) {
      if (mask & (Eigen::Index{1} << i)) rows.push_back(i);
    }
    const Eigen::Index k = set.f.rows() + static_cast<Eigen::Index>(rows.size());
    if (k == 0) continue;
    Matrix f(k, set.f.cols());
    Vector a(k);
    f.topRows(set.f.rows()) = set.f;
    a.head(set.f.rows()) = set.a;
    for (std::size_t j = 0; j < rows.size(); ++j) {
      const Eigen::Index r = set.f.rows() + static_cast<Eigen::Index>(j);
      f.row(r) = set.g.row(rows[j]);
      a(r) = set.c(rows[j]);
    }
    std::optional<LinearFamilySpec> l;
    try {
      l.emplace(f, a);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::Infeasible) continue;
      throw;
    }
    ForwardProjectionResult cand;
    try {
      cand = forward_b_projection(q, *l, alpha);
    } catch (const NoConvergence&) {
      continue;
    }
    if (ni > 0 && (set.g * cand.p_star.probs() - set.c).maxCoeff() > 1e-10) continue;
    if (!best || cand.objective < best->objective - 1e-15) {
      best = std::move(cand);
      best_mask = mask;
    }
  }
  if (!best) throw Error(ErrorCode::Infeasible, "convex set is empty");
  // Report θ over all constraint rows, zero for inactive inequalities.
  Vector theta = Vector::Zero(set.f.rows() + ni);
  theta.head(set.f.rows()) = best->theta.head(set.f.rows());
  Eigen::Index j = set.f.rows();
  for (Eigen::Index i = 0; i < ni; ++i) {
    if (best_mask & (Eigen::Index{1} << i)) theta(set.f.rows() + i) = best->theta(j++);
  }
  best->theta = theta;
  return *best;
}

double pythagorean_gap(Alpha alpha, const Distribution& p, const Distribution& p_star,
                       const Distribution& q) {
  return density_power_b(p, q, alpha) - density_power_b(p, p_star, alpha) -
         density_power_b(p_star, q, alpha);
}

ReverseProjectionResult reverse_b_projection(const SampleData& sample, const FamilySpec& spec) {
  return reverse_b_projection(sample.empirical(), spec);
}

ReverseProjectionResult reverse_b_projection(const Distribution& emp, const FamilySpec& spec) {
  require_kind(spec, FamilyKind::NonNormalizedAlphaPowerLaw, "reverse B-projection");
  if (emp.size() != spec.m()) throw Error(ErrorCode::InvalidArgument, "sample and family sizes differ");
  const Vector fbar = spec.f() * emp.probs();
  const LinearFamilySpec lhat(spec.f(), fbar);
  const ForwardProjectionResult fp = forward_b_projection(spec.q(), lhat, spec.alpha());

  ReverseProjectionResult out;
  out.z = fp.z;
  out.membership = fp.p_star.strictly_positive()
                       ? membership_residual(spec, fp.p_star)
                       : std::numeric_limits<double>::infinity();
  out.closure_only = !(out.membership <= 1e-8);
  SolveReport& rep = out.report;
  rep.theta_star = fp.theta;
  rep.p_star = fp.p_star;
  rep.residual_norm = (spec.f() * fp.p_star.probs() - fbar).cwiseAbs().maxCoeff();
  rep.iterations = static_cast<std::size_t>(fp.iterations);
  rep.trace.push_back({fp.theta, rep.residual_norm});
  rep.route = Route::ProjectionEq;
  rep.note = out.closure_only ? "reverse projection attained only on closure"
                              : "forward projection on the sample's linear family";
  return out;
}

Vector phi_map(const FamilySpec& spec, const Vector& theta, const Distribution& emp) {
  require_kind(spec, FamilyKind::AlphaPowerLaw, "phi map");
  const FamilyPoint fp = evaluate(spec, theta);
  const Vector& p = fp.p.probs();
  const Vector ef = spec.f() * p;
  return ef * (emp.probs().dot(fp.bracket) / p.dot(fp.bracket));
}

Vector phi_map_escort_form(const FamilySpec& spec, const Vector& theta, const Distribution& emp) {
  require_kind(spec, FamilyKind::AlphaPowerLaw, "phi map");
  const double a = spec.alpha().value();
  const Vector p = eval_member(spec, theta).probs();
  const Vector ef = spec.f() * p;
  return ef * (emp.probs().dot(pow_vec(p, a - 1.0)) / pow_vec(p, a).sum());
}

Matrix phi_jacobian(const FamilySpec& spec, const Vector& theta, const Distribution& emp) {
  require_kind(spec, FamilyKind::AlphaPowerLaw, "phi jacobian");
  const double a = spec.alpha().value();
  const FamilyPoint fp = evaluate(spec, theta);
  const Vector& p = fp.p.probs();
  const Vector esc = pow_vec(p, a) / pow_vec(p, a).sum();
  const Matrix g = spec.f().array().rowwise() * pow_vec(p, 1.0 - a).transpose().array();
  const Vector mean = g * esc;
  const Matrix centered = g.colwise() - mean;
  const Matrix cov = centered * esc.asDiagonal() * centered.transpose();
  const double w = emp.probs().dot(pow_vec(p, a - 1.0));
  return -std::pow(fp.z, 1.0 - a) * w * cov;
}

Matrix phi_jacobian_exact(const FamilySpec& spec, const Vector& theta, const Distribution& emp) {
  require_kind(spec, FamilyKind::AlphaPowerLaw, "phi jacobian");
  const double a = spec.alpha().value();
  const FamilyPoint fp = evaluate(spec, theta);
  const Vector& p = fp.p.probs();
  const Vector& u = fp.bracket;
  const Matrix& f = spec.f();
  const Eigen::Index k = f.rows();
  const double n = emp.probs().dot(u);
  const double d = p.dot(u);
  const Vector ef = f * p;
  const Vector fbar = f * emp.probs();
  const Matrix fu = f.array().rowwise() / u.transpose().array();  // f_j / u
  const Vector efu = fu * p;
  const Vector phi = ef * (n / d);
  // Cov_P(f_i, f_j / u)
  const Matrix cov = (f.colwise() - ef) * p.asDiagonal() * (fu.colwise() - efu).transpose();
  Matrix j(k, k);
  for (Eigen::Index r = 0; r < k; ++r) {
    for (Eigen::Index c = 0; c < k; ++c) {
      j(r, c) = -cov(r, c) * n / d + ef(r) * (1.0 - a) * fbar(c) / d -
                phi(r) * (-a * ef(c) + d * efu(c)) / d;
    }
  }
  return j;
}

}  // namespace divproj
