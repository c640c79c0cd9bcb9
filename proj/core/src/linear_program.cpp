#include "divproj/linear_program.hpp"

#include <cmath>

namespace divproj {
namespace {

constexpr double kPivotEps = 1e-11;
constexpr double kFeasTol = 1e-9;

struct Tableau {
  Matrix t;                       // rows x (cols + 1); last row objective, last column rhs
  std::vector<Eigen::Index> basis;

  Eigen::Index rows() const { return t.rows() - 1; }
  Eigen::Index cols() const { return t.cols() - 1; }

  void pivot(Eigen::Index r, Eigen::Index c) {
    t.row(r) /= t(r, c);
    for (Eigen::Index i = 0; i < t.rows(); ++i) {
      if (i != r && t(i, c) != 0.0) t.row(i) -= t(i, c) * t.row(r);
    }
    basis[static_cast<std::size_t>(r)] = c;
  }

  // Bland's rule over columns [0, allowed). Returns false if unbounded.
  bool run(Eigen::Index allowed) {
    for (int iter = 0; iter < 10000; ++iter) {
      Eigen::Index enter = -1;
      for (Eigen::Index j = 0; j < allowed; ++j) {
        if (t(rows(), j) < -kPivotEps) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return true;
      Eigen::Index leave = -1;
      double best = 0.0;
      for (Eigen::Index i = 0; i < rows(); ++i) {
        if (t(i, enter) > kPivotEps) {
          const double ratio = t(i, cols()) / t(i, enter);
          if (leave < 0 || ratio < best - 1e-14 ||
              (std::abs(ratio - best) <= 1e-14 &&
               basis[static_cast<std::size_t>(i)] < basis[static_cast<std::size_t>(leave)])) {
            leave = i;
            best = ratio;
          }
        }
      }
      if (leave < 0) return false;
      pivot(leave, enter);
    }
    return true;
  }
};

}  // namespace

LpResult solve_lp(const Matrix& a, const Vector& b, const Vector& c) {
  const Eigen::Index m = a.rows();
  const Eigen::Index n = a.cols();
  if (b.size() != m || c.size() != n) {
    throw Error(ErrorCode::InvalidArgument, "LP dimensions do not match");
  }

  Tableau tab;
  tab.t = Matrix::Zero(m + 1, n + m + 1);
  tab.basis.resize(static_cast<std::size_t>(m));
  for (Eigen::Index i = 0; i < m; ++i) {
    const double sign = b(i) < 0.0 ? -1.0 : 1.0;
    tab.t.row(i).head(n) = sign * a.row(i);
    tab.t(i, n + i) = 1.0;
    tab.t(i, n + m) = sign * b(i);
    tab.basis[static_cast<std::size_t>(i)] = n + i;
  }
  for (Eigen::Index i = 0; i < m; ++i) tab.t.row(m) -= tab.t.row(i);
  for (Eigen::Index i = 0; i < m; ++i) tab.t(m, n + i) = 0.0;

  LpResult res;
  tab.run(n + m);
  if (-tab.t(m, n + m) > kFeasTol) {
    res.status = LpStatus::Infeasible;
    return res;
  }

  // Drive artificial variables out of the basis; drop rows that are redundant.
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < m; ++i) {
    if (tab.basis[static_cast<std::size_t>(i)] >= n) {
      Eigen::Index col = -1;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (std::abs(tab.t(i, j)) > 1e-9) {
          col = j;
          break;
        }
      }
      if (col >= 0) {
        tab.pivot(i, col);
      } else {
        continue;
      }
    }
    keep.push_back(i);
  }

  Tableau ph2;
  const auto r = static_cast<Eigen::Index>(keep.size());
  ph2.t = Matrix::Zero(r + 1, n + 1);
  for (Eigen::Index i = 0; i < r; ++i) {
    ph2.t.row(i).head(n) = tab.t.row(keep[static_cast<std::size_t>(i)]).head(n);
    ph2.t(i, n) = tab.t(keep[static_cast<std::size_t>(i)], n + m);
    ph2.basis.push_back(tab.basis[static_cast<std::size_t>(keep[static_cast<std::size_t>(i)])]);
  }
  ph2.t.row(r).head(n) = c.transpose();
  for (Eigen::Index i = 0; i < r; ++i) {
    const Eigen::Index bj = ph2.basis[static_cast<std::size_t>(i)];
    ph2.t.row(r) -= c(bj) * ph2.t.row(i);
  }
  if (!ph2.run(n)) {
    res.status = LpStatus::Unbounded;
    return res;
  }

  res.status = LpStatus::Optimal;
  res.x = Vector::Zero(n);
  for (Eigen::Index i = 0; i < r; ++i) {
    res.x(ph2.basis[static_cast<std::size_t>(i)]) = std::max(0.0, ph2.t(i, n));
  }
  res.objective = c.dot(res.x);
  return res;
}

namespace {

void constraint_system(const Matrix& f, const Vector& target, Matrix& a, Vector& b) {
  if (f.rows() != target.size()) {
    throw Error(ErrorCode::InvalidArgument, "linear family: f has " + std::to_string(f.rows()) +
                                                " rows but target has " +
                                                std::to_string(target.size()) + " entries");
  }
  a.resize(f.rows() + 1, f.cols());
  a.topRows(f.rows()) = f;
  a.row(f.rows()).setOnes();
  b.resize(f.rows() + 1);
  b.head(f.rows()) = target;
  b(f.rows()) = 1.0;
}

}  // namespace

std::optional<Vector> simplex_feasible_point(const Matrix& f, const Vector& target) {
  Matrix a;
  Vector b;
  constraint_system(f, target, a, b);
  LpResult r = solve_lp(a, b, Vector::Zero(f.cols()));
  if (r.status != LpStatus::Optimal) return std::nullopt;
  return r.x;
}

std::vector<bool> linear_family_support(const Matrix& f, const Vector& target) {
  Matrix a;
  Vector b;
  constraint_system(f, target, a, b);
  const Eigen::Index m = f.cols();
  std::vector<bool> support(static_cast<std::size_t>(m), false);
  for (Eigen::Index x = 0; x < m; ++x) {
    if (support[static_cast<std::size_t>(x)]) continue;
    Vector c = Vector::Zero(m);
    c(x) = -1.0;
    LpResult r = solve_lp(a, b, c);
    if (r.status == LpStatus::Infeasible) return {};
    for (Eigen::Index y = 0; y < m; ++y) {
      if (r.x(y) > 1e-10) support[static_cast<std::size_t>(y)] = true;
    }
  }
  return support;
}

}  // namespace divproj
