#include "divproj/oracle.hpp"
#include "divproj/sufficiency.hpp"

#include "instances.hpp"

#include <gtest/gtest.h>

namespace divproj {
namespace {

Matrix row(std::initializer_list<double> v) {
  Matrix f(1, static_cast<Eigen::Index>(v.size()));
  Eigen::Index j = 0;
  for (double x : v) f(0, j++) = x;
  return f;
}

std::vector<Vector> grid_points(const ThetaGrid& g) {
  std::vector<Vector> pts;
  for (std::size_t i = 0; i < g.size(); ++i) pts.push_back(g.point(i));
  return pts;
}

const Distribution kHalf = Distribution::from_probs({0.5, 0.5});

TEST(Statistic, MeanOfBernoulli) {
  const SampleData s({0, 1, 1, 0, 1}, 2);
  const auto t1 = sufficient_statistic(FamilyKind::Exponential, s, kHalf, row({0, 1}), Alpha(1.0));
  EXPECT_DOUBLE_EQ(t1.value(0), 0.6);
  const auto t2 = sufficient_statistic(FamilyKind::NonNormalizedAlphaPowerLaw, s, kHalf, row({0, 1}), Alpha(2.0));
  EXPECT_EQ(t1.value, t2.value);
}

TEST(Statistic, UniformReferenceAndAlphaOne) {
  std::mt19937_64 rng(51);
  const auto emp = testing::random_simplex(rng, 4);
  const Matrix f = testing::random_stats(rng, 2, 4);
  const Vector fbar = f * emp.probs();
  const auto t3 = sufficient_statistic(FamilyKind::AlphaPowerLaw, emp, Distribution::uniform(4), f, Alpha(2.0));
  EXPECT_LT((t3.value - fbar / 0.25).cwiseAbs().maxCoeff(), 1e-14);
  const auto t4 = sufficient_statistic(FamilyKind::AlphaExponential, emp, testing::random_simplex(rng, 4), f,
                                       Alpha(1.0));
  EXPECT_LT((t4.value - fbar).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Decomposition, SplitsEveryLikelihood) {
  std::mt19937_64 rng(52);
  for (auto kind : {FamilyKind::Exponential, FamilyKind::AlphaPowerLaw, FamilyKind::NonNormalizedAlphaPowerLaw,
                    FamilyKind::AlphaExponential}) {
    for (double a : {0.5, 2.0}) {
      const auto spec = testing::random_family(rng, kind, 4, 2, a);
      const auto emp = testing::random_simplex(rng, 4);
      const Vector th = testing::admissible_theta(rng, spec, 0.5);
      const LikelihoodSplit split = likelihood_decomposition(spec, th, emp);
      EXPECT_NEAR(split.g + split.h, likelihood(matched_estimator(spec), spec, th, emp), 1e-12) << to_string(kind);
    }
  }
}

TEST(Decomposition, BasuFreePart) {
  std::mt19937_64 rng(53);
  const double a = 2.0;
  const auto spec = testing::random_family(rng, FamilyKind::NonNormalizedAlphaPowerLaw, 3, 1, a);
  const auto emp = testing::random_simplex(rng, 3);
  const double h = a / (a - 1.0) * emp.probs().dot(spec.q().probs().array().pow(a - 1.0).matrix());
  for (int t = 0; t < 5; ++t) {
    const Vector th = testing::admissible_theta(rng, spec, 0.5);
    EXPECT_NEAR(likelihood_decomposition(spec, th, emp).h, h, 1e-12);
  }
}

TEST(Factorization, PermutationAndEqualMeanBernoulli) {
  const FamilySpec spec(FamilyKind::Exponential, kHalf, row({0, 1}), Alpha(1.0));
  const SampleData a({0, 1, 1, 0, 1}, 2);
  const SampleData b({1, 1, 1, 0, 0}, 2);
  const auto r = factorization_check(spec, a.empirical(), b.empirical(), grid_points(ThetaGrid::box(1, -2, 2, 101)));
  EXPECT_TRUE(r.equal_t);
  EXPECT_EQ(r.max_deviation, 0.0);
  EXPECT_TRUE(r.argmax_equal);
}

TEST(Factorization, ConstructedPairsForEveryModel) {
  // Q and f chosen so that different count vectors can share each statistic.
  const Distribution q = Distribution::from_probs({0.2, 0.3, 0.5});
  const Matrix f = row({0, 1, 2});
  for (auto kind : {FamilyKind::Exponential, FamilyKind::AlphaPowerLaw, FamilyKind::NonNormalizedAlphaPowerLaw,
                    FamilyKind::AlphaExponential}) {
    const double a = kind == FamilyKind::Exponential ? 1.0 : 2.0;
    const FamilySpec spec(kind, q, f, Alpha(a));
    const auto pair = find_equal_statistic_pair(kind, q, f, Alpha(a));
    ASSERT_TRUE(pair.has_value()) << to_string(kind);
    const auto sa = SampleData::from_counts(pair->first);
    const auto sb = SampleData::from_counts(pair->second);
    const auto r =
        factorization_check(spec, sa.empirical(), sb.empirical(), grid_points(ThetaGrid::box(1, -0.5, 0.5, 101)));
    EXPECT_TRUE(r.equal_t) << to_string(kind);
    EXPECT_LE(r.max_deviation, 1e-9) << to_string(kind);
    EXPECT_GT(r.grid_points, 10u);
  }
}

TEST(Factorization, UnequalStatisticIsReported) {
  const FamilySpec spec(FamilyKind::Exponential, kHalf, row({0, 1}), Alpha(1.0));
  const SampleData a({0, 1, 1}, 2);
  const SampleData b({0, 0, 1}, 2);
  const auto r = factorization_check(spec, a.empirical(), b.empirical(), grid_points(ThetaGrid::box(1, -1, 1, 11)));
  EXPECT_FALSE(r.equal_t);
  EXPECT_GT(r.max_deviation, 1e-3);
}

}  // namespace
}  // namespace divproj
