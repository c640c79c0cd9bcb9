#include "divproj/newton.hpp"

#include "divproj/parallel.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include <cmath>
#include <limits>
#include <optional>

namespace divproj {
namespace {

bool inadmissible_code(ErrorCode c) {
  return c == ErrorCode::DomainViolation || c == ErrorCode::NormalizerNotFound ||
         c == ErrorCode::DomainError;
}

std::optional<Vector> try_eval(const ResidualFn& r, const Vector& theta) {
  try {
    Vector v = r(theta);
    if (!v.allFinite()) return std::nullopt;
    return v;
  } catch (const Error& e) {
    if (inadmissible_code(e.code())) return std::nullopt;
    throw;
  }
}

double try_value(const ObjectiveFn& fn, const Vector& theta) {
  try {
    const double v = fn(theta);
    return std::isfinite(v) ? v : std::numeric_limits<double>::quiet_NaN();
  } catch (const Error& e) {
    if (inadmissible_code(e.code())) return std::numeric_limits<double>::quiet_NaN();
    throw;
  }
}

Vector solve_linear(const Matrix& a, const Vector& b) {
  Eigen::ColPivHouseholderQR<Matrix> qr(a);
  if (qr.rank() == a.cols()) {
    Vector x = qr.solve(b);
    if (x.allFinite()) return x;
  }
  return Eigen::CompleteOrthogonalDecomposition<Matrix>(a).solve(b);
}

// Iterates this far out are following a residual that only decays at infinity.
constexpr double kDivergedNorm = 1e6;

}  // namespace

const char* to_string(Route route) {
  switch (route) {
    case Route::EstimatingEq: return "estimating_equation";
    case Route::ProjectionEq: return "projection_equation";
    case Route::LikelihoodMax: return "likelihood_max";
    case Route::Oracle: return "oracle";
  }
  return "?";
}

Matrix fd_jacobian(const ResidualFn& r, const Vector& theta, const Vector& r0) {
  const Eigen::Index k = theta.size();
  Matrix j(r0.size(), k);
  for (Eigen::Index c = 0; c < k; ++c) {
    double h = 1e-6 * (1.0 + std::abs(theta(c)));
    bool done = false;
    for (int shrink = 0; shrink <= 3 && !done; ++shrink, h *= 0.1) {
      Vector tp = theta;
      Vector tm = theta;
      tp(c) += h;
      tm(c) -= h;
      auto rp = try_eval(r, tp);
      auto rm = try_eval(r, tm);
      if (rp && rm) {
        j.col(c) = (*rp - *rm) / (2.0 * h);
        done = true;
      } else if (rp) {
        j.col(c) = (*rp - r0) / h;
        done = true;
      } else if (rm) {
        j.col(c) = (r0 - *rm) / h;
        done = true;
      }
    }
    if (!done) {
      throw DomainViolation("finite-difference stencil leaves the admissible region", {});
    }
  }
  return j;
}

namespace {

// A small residual only certifies a root if the Newton correction there is
// small too; residuals that vanish as |θ| grows fail this test.
bool negligible_step(const ResidualFn& r, const Vector& theta, const Vector& rv) {
  try {
    const Vector step = solve_linear(fd_jacobian(r, theta, rv), -rv);
    return step.allFinite() && step.cwiseAbs().maxCoeff() <= 1e-6 * (1.0 + theta.cwiseAbs().maxCoeff());
  } catch (const DomainViolation&) {
    return false;
  }
}

}  // namespace

NewtonResult damped_newton(const ResidualFn& r, const Vector& init, const NewtonOptions& opt) {
  NewtonResult res;
  res.theta = init;
  auto r0 = try_eval(r, init);
  if (!r0) throw DomainViolation("initial parameter is not admissible", {});
  Vector rv = *r0;
  res.trace.push_back({init, rv.norm()});
  for (res.iterations = 0; res.iterations < opt.max_iterations; ++res.iterations) {
    if (rv.cwiseAbs().maxCoeff() <= opt.tolerance) break;
    Matrix jac;
    try {
      jac = fd_jacobian(r, res.theta, rv);
    } catch (const DomainViolation&) {
      break;
    }
    const Vector step = solve_linear(jac, -rv);
    if (!step.allFinite()) break;
    const double f0 = rv.squaredNorm();
    double t = 1.0;
    bool accepted = false;
    for (int halving = 0; halving <= 30; ++halving, t *= 0.5) {
      const Vector cand = res.theta + t * step;
      auto rc = try_eval(r, cand);
      if (rc && rc->squaredNorm() <= (1.0 - 1e-4 * t) * f0) {
        res.theta = cand;
        rv = *rc;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
    res.trace.push_back({res.theta, rv.norm()});
    if (res.theta.cwiseAbs().maxCoeff() > kDivergedNorm) break;
  }
  res.residual_inf = rv.cwiseAbs().maxCoeff();
  res.converged = res.residual_inf <= opt.tolerance && negligible_step(r, res.theta, rv);
  return res;
}

NewtonResult solve_system(const ResidualFn& r, const Vector& init, const NewtonOptions& opt) {
  std::optional<NewtonResult> first;
  if (try_eval(r, init)) {
    first = damped_newton(r, init, opt);
    if (first->converged) return *first;
  }
  if (!opt.multistart) {
    if (!first) throw DomainViolation("initial parameter is not admissible", {});
    throw NoConvergence("Newton iteration did not converge", first->theta, first->residual_inf);
  }

  // Start grids {-s, 0, s}^k at three scales, coarse to fine.
  const Eigen::Index k = init.size();
  const double scales[] = {1.0, 0.3, 0.1};
  std::size_t per_scale = 1;
  for (Eigen::Index i = 0; i < k; ++i) per_scale *= 3;
  const std::size_t count = per_scale * std::size(scales);
  std::vector<std::optional<NewtonResult>> runs(count);
  parallel_for(count, opt.threads, [&](std::size_t idx) {
    Vector start(k);
    std::size_t rest = idx % per_scale;
    const double s = scales[idx / per_scale] * opt.start_scale;
    for (Eigen::Index i = 0; i < k; ++i) {
      start(i) = (static_cast<double>(rest % 3) - 1.0) * s;
      rest /= 3;
    }
    if (!try_eval(r, start)) return;
    runs[idx] = damped_newton(r, start, opt);
  });

  // Deterministic reduction: converged first, then smallest residual, then
  // smallest ||θ||.
  std::optional<NewtonResult> best = first;
  auto better = [](const NewtonResult& a, const NewtonResult& b) {
    if (a.converged != b.converged) return a.converged;
    if (std::abs(a.residual_inf - b.residual_inf) > 1e-12) return a.residual_inf < b.residual_inf;
    return a.theta.norm() < b.theta.norm();
  };
  for (auto& run : runs) {
    if (run && (!best || better(*run, *best))) best = std::move(run);
  }
  if (!best) throw DomainViolation("no admissible starting point", {});
  best->multistart = true;
  if (!best->converged) {
    throw NoConvergence("Newton iteration did not converge from any start", best->theta,
                        best->residual_inf);
  }
  return *best;
}

Vector fd_gradient(const ObjectiveFn& fn, const Vector& theta, double step) {
  const double f0 = try_value(fn, theta);
  Vector g(theta.size());
  for (Eigen::Index c = 0; c < theta.size(); ++c) {
    double h = step * (1.0 + std::abs(theta(c)));
    bool done = false;
    for (int shrink = 0; shrink <= 3 && !done; ++shrink, h *= 0.1) {
      Vector tp = theta;
      Vector tm = theta;
      tp(c) += h;
      tm(c) -= h;
      const double fp = try_value(fn, tp);
      const double fm = try_value(fn, tm);
      if (std::isfinite(fp) && std::isfinite(fm)) {
        g(c) = (fp - fm) / (2.0 * h);
        done = true;
      } else if (std::isfinite(fp) && std::isfinite(f0)) {
        g(c) = (fp - f0) / h;
        done = true;
      } else if (std::isfinite(fm) && std::isfinite(f0)) {
        g(c) = (f0 - fm) / h;
        done = true;
      }
    }
    if (!done) throw DomainViolation("finite-difference stencil leaves the admissible region", {});
  }
  return g;
}

namespace {

Matrix fd_hessian(const ObjectiveFn& fn, const Vector& theta, double step) {
  const Eigen::Index k = theta.size();
  Matrix h(k, k);
  const double f0 = fn(theta);
  Vector hs(k);
  for (Eigen::Index i = 0; i < k; ++i) hs(i) = step * (1.0 + std::abs(theta(i)));
  auto at = [&](Eigen::Index i, double si, Eigen::Index j, double sj) {
    Vector t = theta;
    t(i) += si * hs(i);
    t(j) += sj * hs(j);
    return fn(t);
  };
  for (Eigen::Index i = 0; i < k; ++i) {
    Vector tp = theta;
    Vector tm = theta;
    tp(i) += hs(i);
    tm(i) -= hs(i);
    h(i, i) = (fn(tp) - 2.0 * f0 + fn(tm)) / (hs(i) * hs(i));
    for (Eigen::Index j = 0; j < i; ++j) {
      const double v =
          (at(i, 1, j, 1) - at(i, 1, j, -1) - at(i, -1, j, 1) + at(i, -1, j, -1)) /
          (4.0 * hs(i) * hs(j));
      h(i, j) = v;
      h(j, i) = v;
    }
  }
  return h;
}

}  // namespace

MaximizeResult maximize(const ObjectiveFn& fn, const Vector& init, const MaximizeOptions& opt) {
  // Minimize the negated objective.
  ObjectiveFn neg = [&](const Vector& t) { return -fn(t); };
  MaximizeResult res;
  Vector theta = init;
  double f = try_value(neg, theta);
  if (!std::isfinite(f)) throw DomainViolation("initial parameter is not admissible", {});
  const Eigen::Index k = init.size();
  Vector g = fd_gradient(neg, theta, opt.gradient_step);
  Matrix hinv = Matrix::Identity(k, k);
  res.trace.push_back({theta, g.norm()});

  int it = 0;
  for (; it < opt.max_iterations; ++it) {
    if (g.cwiseAbs().maxCoeff() <= 1e-10) break;
    Vector d = -hinv * g;
    if (d.dot(g) >= 0.0) {
      hinv.setIdentity();
      d = -g;
    }
    double t = 1.0;
    bool accepted = false;
    Vector cand;
    double fc = 0.0;
    for (int halving = 0; halving <= 50; ++halving, t *= 0.5) {
      cand = theta + t * d;
      fc = try_value(neg, cand);
      if (std::isfinite(fc) && fc <= f + 1e-4 * t * g.dot(d)) {
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
    Vector gn;
    try {
      gn = fd_gradient(neg, cand, opt.gradient_step);
    } catch (const DomainViolation&) {
      break;
    }
    const Vector s = cand - theta;
    const Vector y = gn - g;
    const double sy = s.dot(y);
    if (sy > 1e-16) {
      const double rho = 1.0 / sy;
      const Matrix id = Matrix::Identity(k, k);
      hinv = (id - rho * s * y.transpose()) * hinv * (id - rho * y * s.transpose()) +
             rho * s * s.transpose();
    }
    theta = cand;
    f = fc;
    g = gn;
    res.trace.push_back({theta, g.norm()});
  }

  // Newton polish and certificate.
  bool certified = false;
  Matrix hess;
  for (int polish = 0; polish < 20; ++polish, ++it) {
    try {
      hess = fd_hessian(neg, theta, opt.hessian_step);
    } catch (const Error& e) {
      if (!inadmissible_code(e.code())) throw;
      break;
    }
    if (!hess.allFinite()) break;
    Eigen::SelfAdjointEigenSolver<Matrix> es(hess);
    if (es.eigenvalues().minCoeff() < 1e-7) break;
    const Vector step = -hess.ldlt().solve(g);
    const bool small = step.norm() <= 1e-8 * (1.0 + theta.norm());
    double t = 1.0;
    bool moved = false;
    for (int halving = 0; halving <= 30; ++halving, t *= 0.5) {
      const Vector cand = theta + t * step;
      const double fc = try_value(neg, cand);
      if (std::isfinite(fc) && (fc <= f + 1e-4 * t * g.dot(step) || small)) {
        theta = cand;
        f = fc;
        moved = true;
        break;
      }
    }
    if (!moved && step.norm() > 1e-6 * (1.0 + theta.norm())) break;
    g = fd_gradient(neg, theta, opt.gradient_step);
    res.trace.push_back({theta, g.norm()});
    if (small || !moved) {
      certified = true;
      break;
    }
  }
  if (!certified) {
    throw NoConvergence("likelihood maximization has no certified interior maximum", theta,
                        g.cwiseAbs().maxCoeff());
  }
  res.theta = theta;
  res.value = -f;
  res.gradient = -g;
  res.hessian = -hess;
  res.iterations = it;
  return res;
}

}  // namespace divproj
