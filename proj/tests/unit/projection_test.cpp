#include "divproj/oracle.hpp"
#include "divproj/projection.hpp"

#include "expected_values.hpp"
#include "instances.hpp"

#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

namespace divproj {
namespace {

Matrix row(std::initializer_list<double> v) {
  Matrix f(1, static_cast<Eigen::Index>(v.size()));
  Eigen::Index j = 0;
  for (double x : v) f(0, j++) = x;
  return f;
}

Vector vec1(double x) { return Vector::Constant(1, x); }

SampleData counts(std::initializer_list<std::size_t> c) {
  const std::vector<std::size_t> v(c);
  return SampleData::from_counts(v);
}

const Distribution kHalf = Distribution::from_probs({0.5, 0.5});

TEST(ProjectionResidual, IProjZeroAtLogit) {
  const FamilySpec spec(FamilyKind::Exponential, kHalf, row({0, 1}), Alpha(1.0));
  const Vector r = projection_residual(ProjectionKind::IProj, spec, vec1(std::log(7.0 / 3.0)), counts({3, 7}));
  EXPECT_NEAR(r(0), 0.0, 1e-15);
}

TEST(ProjectionResidual, DAlphaFormsAgree) {
  std::mt19937_64 rng(41);
  for (double a : {0.5, 2.0}) {
    const auto spec = testing::random_family(rng, FamilyKind::AlphaExponential, 4, 2, a);
    const Vector th = testing::admissible_theta(rng, spec, 0.5);
    const auto emp = testing::random_simplex(rng, 4);
    const DAlphaForms forms = dalpha_forms(spec, th, emp);
    EXPECT_LT((forms.sums / forms.power_mass - forms.escort).cwiseAbs().maxCoeff(), 1e-12);
    // Reference equal to the empirical measure solves the equation at θ = 0.
    const FamilySpec at_emp(FamilyKind::AlphaExponential, emp, spec.f(), Alpha(a));
    EXPECT_LT(projection_residual(ProjectionKind::DAlphaProj, at_emp, Vector::Zero(2), emp).cwiseAbs().maxCoeff(),
              1e-14);
  }
}

TEST(ProjectionSolve, HandInstances) {
  const FamilySpec exp_spec(FamilyKind::Exponential, kHalf, row({0, 1}), Alpha(1.0));
  EXPECT_NEAR(solve_projection_equation(ProjectionKind::IProj, exp_spec, counts({3, 7}), vec1(0.0)).theta_star(0),
              expected::kLogit07, 1e-9);
  const FamilySpec b_spec(FamilyKind::NonNormalizedAlphaPowerLaw, kHalf, row({0, 1}), Alpha(2.0));
  const auto r = solve_projection_equation(ProjectionKind::BProj, b_spec, counts({4, 6}), vec1(0.0));
  EXPECT_NEAR(r.p_star[1], 0.6, 1e-10);
  EXPECT_EQ(r.route, Route::ProjectionEq);
}

TEST(ProjectionSolve, MatchesEstimatingRoute) {
  std::mt19937_64 rng(42);
  for (auto kind : {EstimatorKind::MLE, EstimatorKind::HellingerD, EstimatorKind::BasuB, EstimatorKind::JonesI}) {
    for (double a : {0.5, 2.0}) {
      const double alpha = kind == EstimatorKind::MLE ? 1.0 : a;
      const auto spec = testing::random_family(rng, matched_family(kind), 3, 1, alpha);
      const Vector th0 = testing::admissible_theta(rng, spec, 0.3);
      const auto s = SampleData::from_counts(testing::rounded_counts(eval_member(spec, th0), 500));
      const Estimator est{kind, Alpha(alpha)};
      const auto eq = solve_estimating_equation(est, spec, s, Vector::Zero(1));
      const auto pr = solve_projection_equation(matched_projection(kind), spec, s, Vector::Zero(1));
      EXPECT_LT((eq.theta_star - pr.theta_star).cwiseAbs().maxCoeff(), 1e-6) << to_string(kind) << " " << a;
      EXPECT_LT(projection_residual(matched_projection(kind), spec, eq.theta_star, s).cwiseAbs().maxCoeff(), 1e-6);
      EXPECT_LT(estimating_residual(est, spec, pr.theta_star, s).cwiseAbs().maxCoeff(), 1e-6);
    }
  }
}

TEST(ProjectionSolve, EscortRelatedSolutions) {
  // Solving the E_α equation and the M(1/α) equation for the escort images
  // gives escort-related solutions.
  std::mt19937_64 rng(43);
  for (double a : {0.5, 2.0}) {
    const auto spec = testing::random_family(rng, FamilyKind::AlphaExponential, 3, 1, a);
    const FamilySpec target = escort_target_spec(spec);
    const Vector th0 = testing::admissible_theta(rng, spec, 0.3);
    const auto s = SampleData::from_counts(testing::rounded_counts(eval_member(spec, th0), 300));
    const auto d = solve_projection_equation(ProjectionKind::DAlphaProj, spec, s, Vector::Zero(1));
    const auto esc_emp = escort(s.empirical(), Alpha(a), true);
    const NewtonResult m = solve_system(
        [&](const Vector& t) { return projection_residual(ProjectionKind::IAlphaProj, target, t, esc_emp); },
        Vector::Zero(1), NewtonOptions{});
    ASSERT_TRUE(m.converged);
    const auto lhs = escort(d.p_star, Alpha(a)).probs();
    const auto rhs = eval_member(target, m.theta).probs();
    EXPECT_LT((lhs - rhs).cwiseAbs().maxCoeff(), 1e-6);
  }
}

TEST(Forward, EuclideanHandCase) {
  const LinearFamilySpec l(row({0, 1, 2}), vec1(1.2));
  const auto r = forward_b_projection(Distribution::uniform(3), l, Alpha(2.0));
  EXPECT_NEAR(r.p_star[0], 7.0 / 30.0, 1e-12);
  EXPECT_NEAR(r.p_star[1], 1.0 / 3.0, 1e-12);
  EXPECT_NEAR(r.p_star[2], 13.0 / 30.0, 1e-12);
}

TEST(Forward, QInsideFamily) {
  const auto q = Distribution::from_probs({0.2, 0.3, 0.5});
  const LinearFamilySpec l(row({0, 1, 2}), vec1(1.3));
  const auto r = forward_b_projection(q, l, Alpha(0.5));
  EXPECT_LT((r.p_star.probs() - q.probs()).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_NEAR(r.objective, 0.0, 1e-14);
}

TEST(Forward, AlphaHalfOracle) {
  const auto q = Distribution::from_probs({0.2, 0.5, 0.3});
  const LinearFamilySpec l(row({0, 1, 2}), vec1(0.85));
  const auto r = forward_b_projection(q, l, Alpha(0.5));
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(r.p_star[i], expected::kForwardHalfP[i], 1e-12);
  EXPECT_NEAR(r.theta(0), expected::kForwardHalfTheta, 1e-9);
  EXPECT_NEAR(r.z, expected::kForwardHalfZ, 1e-9);
}

TEST(Forward, ClampedCaseHasSlackness) {
  // Q puts little mass on the last symbol and the constraint pushes mass away from it.
  const auto q = Distribution::from_probs({0.6, 0.35, 0.05});
  const LinearFamilySpec l(row({0, 1, 2}), vec1(0.2));
  const auto r = forward_b_projection(q, l, Alpha(2.0));
  EXPECT_EQ(r.p_star[2], 0.0);
  EXPECT_FALSE(r.support_mask[2]);
  EXPECT_TRUE(l.contains(r.p_star));
  for (std::size_t i = 0; i < 3; ++i) EXPECT_LE(std::abs(r.kkt.mu(static_cast<Eigen::Index>(i)) * r.p_star[i]), 1e-10);
  EXPECT_GE(r.kkt.mu.minCoeff(), -1e-10);
  const auto fit = forward_form_residual(q, l, Alpha(2.0), r.p_star, r.theta, r.z);
  EXPECT_LE(fit.residual, 1e-8);
}

TEST(Forward, SimplexGridOracle) {
  std::mt19937_64 rng(44);
  for (double a : {0.5, 2.0}) {
    for (int t = 0; t < 5; ++t) {
      const auto q = testing::random_simplex(rng, 3);
      const auto l = testing::random_linear(rng, 3, 1);
      const auto r = forward_b_projection(q, l, Alpha(a));
      const SimplexGrid grid(3, 200);
      const auto o = grid_forward_min(DivergenceKind::DensityPowerB, Alpha(a), q, &l, grid);
      // The grid point is feasible only up to 0.5/d, so compare objectives and points loosely.
      EXPECT_LT((o.p_best.probs() - r.p_star.probs()).cwiseAbs().maxCoeff(), 0.05);
      EXPECT_LE(r.objective, o.value + 1e-2);
      if (a < 1.0) {
        const FamilySpec b(FamilyKind::NonNormalizedAlphaPowerLaw, q, l.f(), Alpha(a));
        EXPECT_LE(membership_residual(b, r.p_star), 1e-8);
      }
    }
  }
}

TEST(Pythagorean, EqualityBelowOneAndAtFullSupport) {
  std::mt19937_64 rng(45);
  for (double a : {0.3, 0.8, 2.0, 3.0}) {
    for (int t = 0; t < 5; ++t) {
      const auto q = testing::random_simplex(rng, 4);
      const auto l = testing::random_linear(rng, 4, 2);
      const auto r = forward_b_projection(q, l, Alpha(a));
      EXPECT_NEAR(pythagorean_gap(Alpha(a), r.p_star, r.p_star, q), 0.0, 1e-14);
      for (int s = 0; s < 5; ++s) {
        const auto p = random_member(l, r.p_star, rng);
        const double gap = pythagorean_gap(Alpha(a), p, r.p_star, q);
        EXPECT_GE(gap, -1e-10);
        if (a < 1.0 || r.p_star.strictly_positive()) EXPECT_LE(std::abs(gap), 1e-9);
      }
    }
  }
}

TEST(Pythagorean, ConvexSetInequality) {
  std::mt19937_64 rng(46);
  for (double a : {0.5, 2.0}) {
    const auto q = testing::random_simplex(rng, 4);
    ConvexSetSpec c{row({1, 0, 0, 0}), vec1(0.4), row({0, 1, 2, 3}), vec1(1.0)};
    const auto r = forward_b_projection(q, c, Alpha(a));
    EXPECT_LE((c.g * r.p_star.probs())(0), 1.0 + 1e-10);
    EXPECT_NEAR((c.f * r.p_star.probs())(0), 0.4, 1e-10);
    const LinearFamilySpec eq_part(c.f, c.a);
    int tested = 0;
    for (int s = 0; s < 200 && tested < 20; ++s) {
      const auto p = random_member(eq_part, r.p_star, rng);
      if ((c.g * p.probs())(0) > 1.0) continue;
      ++tested;
      EXPECT_GE(pythagorean_gap(Alpha(a), p, r.p_star, q), -1e-10);
    }
    EXPECT_GT(tested, 0);
  }
}

TEST(Forward, EveryFamilyMemberHasTheSameProjection) {
  std::mt19937_64 rng(47);
  const auto q = testing::random_simplex(rng, 4);
  const auto l = testing::random_linear(rng, 4, 1);
  const Alpha a(0.5);
  const auto r = forward_b_projection(q, l, a);
  const FamilySpec b(FamilyKind::NonNormalizedAlphaPowerLaw, q, l.f(), a);
  EXPECT_LE(membership_residual(b, r.p_star), 1e-8);
  EXPECT_LT((l.f() * r.p_star.probs() - l.a()).cwiseAbs().maxCoeff(), 1e-10);
  for (int t = 0; t < 5; ++t) {
    const auto other = eval_member(b, testing::admissible_theta(rng, b, 0.5));
    const auto r2 = forward_b_projection(other, l, a);
    EXPECT_LT((r2.p_star.probs() - r.p_star.probs()).cwiseAbs().maxCoeff(), 1e-8);
    const auto p = random_member(l, r.p_star, rng);
    EXPECT_LE(std::abs(pythagorean_gap(a, p, r.p_star, other)), 1e-8);
  }
}

TEST(Forward, InfeasibleFamily) {
  EXPECT_THROW(LinearFamilySpec(row({0, 1, 2}), vec1(3.0)), Error);
}

TEST(Reverse, RecoversGeneratingTheta) {
  std::mt19937_64 rng(48);
  for (double a : {0.5, 2.0}) {
    const auto spec = testing::random_family(rng, FamilyKind::NonNormalizedAlphaPowerLaw, 3, 1, a);
    const Vector th0 = testing::admissible_theta(rng, spec, 0.5);
    const auto p0 = eval_member(spec, th0);
    const auto r = reverse_b_projection(p0, spec);
    EXPECT_FALSE(r.closure_only);
    EXPECT_LT((r.report.theta_star - th0).cwiseAbs().maxCoeff(), 1e-6);
    EXPECT_LT(projection_residual(ProjectionKind::BProj, spec, r.report.theta_star, p0).cwiseAbs().maxCoeff(), 1e-8);
  }
}

TEST(Reverse, AgreesWithGridBelowOne) {
  const FamilySpec spec(FamilyKind::NonNormalizedAlphaPowerLaw, Distribution::from_probs({0.2, 0.3, 0.5}),
                        row({0, 1, 2}), Alpha(0.5));
  const auto s = counts({6, 7, 7});
  const auto r = reverse_b_projection(s, spec);
  const ThetaGrid grid = ThetaGrid::box(1, -2.0, 2.0, 401);
  const auto o = grid_reverse_min(DivergenceKind::DensityPowerB, Alpha(0.5), s.empirical(), spec, grid);
  EXPECT_LE(std::abs(o.theta_best(0) - r.report.theta_star(0)), grid.cell());
}

TEST(Reverse, ClosureOnlyWhenProjectionLeavesSupport) {
  // α = 2: the sample mean forces a clamped forward projection.
  const FamilySpec spec(FamilyKind::NonNormalizedAlphaPowerLaw, Distribution::from_probs({0.6, 0.35, 0.05}),
                        row({0, 1, 2}), Alpha(2.0));
  const auto r = reverse_b_projection(counts({16, 4, 0}), spec);
  EXPECT_TRUE(r.closure_only);
}

TEST(Phi, FormsAgreeAndZeroValue) {
  const FamilySpec spec(FamilyKind::AlphaPowerLaw, Distribution::from_probs({0.2, 0.3, 0.5}), row({0, 1, 2}),
                        Alpha(2.0));
  const auto emp = Distribution::from_probs({0.5, 0.25, 0.25});
  EXPECT_NEAR(phi_map(spec, Vector::Zero(1), emp)(0), expected::kPhiZero2, 1e-14);
  const FamilySpec half(FamilyKind::AlphaPowerLaw, spec.q(), spec.f(), Alpha(0.5));
  EXPECT_NEAR(phi_map(half, Vector::Zero(1), emp)(0), expected::kPhiZeroHalf, 1e-13);
  std::mt19937_64 rng(49);
  for (int t = 0; t < 10; ++t) {
    const Vector th = testing::admissible_theta(rng, spec, 0.5);
    EXPECT_LT((phi_map(spec, th, emp) - phi_map_escort_form(spec, th, emp)).cwiseAbs().maxCoeff(), 1e-12);
  }
  EXPECT_GT(std::abs(phi_map(spec, vec1(0.1), emp)(0) - phi_map(spec, vec1(-0.1), emp)(0)), 1e-6);
}

TEST(Phi, SolutionIsFixedPoint) {
  const FamilySpec spec(FamilyKind::AlphaPowerLaw, Distribution::from_probs({0.2, 0.3, 0.5}), row({0, 1, 2}),
                        Alpha(2.0));
  const auto s = counts({5, 8, 7});
  const auto r = solve_projection_equation(ProjectionKind::IAlphaProj, spec, s, vec1(0.0));
  const double fbar = (spec.f() * s.empirical().probs())(0);
  EXPECT_NEAR(phi_map(spec, r.theta_star, s.empirical())(0), fbar, 1e-8);
}

TEST(Phi, JacobianMatchesDifferencesAndIsNegativeDefinite) {
  std::mt19937_64 rng(50);
  for (double a : {0.5, 2.0}) {
    for (int t = 0; t < 10; ++t) {
      const auto spec = testing::random_family(rng, FamilyKind::AlphaPowerLaw, 4, 2, a);
      const Vector th = testing::admissible_theta(rng, spec, 0.5);
      const auto emp = testing::random_simplex(rng, 4);
      const Matrix exact = phi_jacobian_exact(spec, th, emp);
      for (Eigen::Index j = 0; j < 2; ++j) {
        Vector hi = th, lo = th;
        hi(j) += 1e-6;
        lo(j) -= 1e-6;
        const Vector fd = (phi_map(spec, hi, emp) - phi_map(spec, lo, emp)) / 2e-6;
        EXPECT_LT((fd - exact.col(j)).cwiseAbs().maxCoeff(), 1e-6);
      }
      // At the solution (empirical = P_θ) the covariance form is the derivative.
      const auto p = eval_member(spec, th);
      const Matrix cov = phi_jacobian(spec, th, p);
      EXPECT_LT((cov - phi_jacobian_exact(spec, th, p)).cwiseAbs().maxCoeff(), 1e-9);
      EXPECT_LT((cov - cov.transpose()).cwiseAbs().maxCoeff(), 1e-14);
      Eigen::SelfAdjointEigenSolver<Matrix> eig(cov);
      EXPECT_LT(eig.eigenvalues().maxCoeff(), -1e-12);
    }
  }
}

}  // namespace
}  // namespace divproj
