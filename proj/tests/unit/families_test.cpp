#include "divproj/families.hpp"

#include "expected_values.hpp"
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

Vector vec1(double x) { return Vector::Constant(1, x); }

const Distribution kHalf = Distribution::from_probs({0.5, 0.5});

TEST(Family, ThetaZeroIsReference) {
  std::mt19937_64 rng(3);
  for (auto kind : {FamilyKind::Exponential, FamilyKind::AlphaPowerLaw, FamilyKind::NonNormalizedAlphaPowerLaw,
                    FamilyKind::AlphaExponential}) {
    const auto spec = testing::random_family(rng, kind, 4, 2, 0.6);
    const FamilyPoint fp = evaluate(spec, Vector::Zero(2));
    EXPECT_LT((fp.p.probs() - spec.q().probs()).cwiseAbs().maxCoeff(), 1e-14) << to_string(kind);
  }
}

TEST(Family, ExponentialLogit) {
  const FamilySpec spec(FamilyKind::Exponential, kHalf, row({0, 1}), Alpha(1.0));
  const auto p = eval_member(spec, vec1(std::log(3.0)));
  EXPECT_NEAR(p[0], 0.25, 1e-15);
  EXPECT_NEAR(p[1], 0.75, 1e-15);
}

TEST(Family, NonNormalizedLinearCase) {
  // At α = 2 the bracket is linear: P = Q - (Z + θ f).
  const FamilySpec spec(FamilyKind::NonNormalizedAlphaPowerLaw, kHalf, row({0, 1}), Alpha(2.0));
  const FamilyPoint fp = evaluate(spec, vec1(0.1));
  EXPECT_NEAR(fp.z, -0.05, 1e-13);
  EXPECT_NEAR(fp.p[0], 0.55, 1e-13);
  EXPECT_NEAR(fp.p[1], 0.45, 1e-13);
  EXPECT_NEAR(normalizer_root(spec, Vector::Zero(1)), 0.0, 1e-15);
}

TEST(Family, NonNormalizedOutOfDomain) {
  const FamilySpec spec(FamilyKind::NonNormalizedAlphaPowerLaw, kHalf, row({0, 1}), Alpha(2.0));
  EXPECT_FALSE(admissible(spec, vec1(2.0)));
  try {
    evaluate(spec, vec1(2.0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_TRUE(e.code() == ErrorCode::DomainViolation || e.code() == ErrorCode::NormalizerNotFound);
  }
}

TEST(Family, NormalizerMassIsOne) {
  std::mt19937_64 rng(8);
  for (double a : {0.3, 0.7, 1.5, 2.0, 3.0}) {
    for (int t = 0; t < 10; ++t) {
      const auto spec = testing::random_family(rng, FamilyKind::NonNormalizedAlphaPowerLaw, 4, 2, a);
      const Vector th = testing::admissible_theta(rng, spec, 1.0);
      const FamilyPoint fp = evaluate(spec, th);
      const Vector u = spec.q().probs().array().pow(a - 1.0) +
                       (1.0 - a) * (fp.z + (th.transpose() * spec.f()).transpose().array());
      EXPECT_NEAR(u.array().pow(1.0 / (a - 1.0)).sum(), 1.0, 1e-12);
    }
  }
}

TEST(Family, PowerLawDomainViolationListsSymbols) {
  const FamilySpec spec(FamilyKind::AlphaPowerLaw, Distribution::from_probs({0.2, 0.3, 0.5}), row({0, 1, 2}),
                        Alpha(2.0));
  // u = Q - θ f = (0.2, 0, -0.1) at θ = 0.3.
  const auto bad = domain_violations(spec, vec1(0.3));
  EXPECT_EQ(bad, (std::vector<std::size_t>{1, 2}));
  try {
    evaluate(spec, vec1(0.3));
    FAIL();
  } catch (const DomainViolation& e) {
    EXPECT_EQ(e.symbols(), bad);
  }
}

TEST(Family, SpecValidation) {
  EXPECT_THROW(FamilySpec(FamilyKind::AlphaPowerLaw, kHalf, row({0, 1}), Alpha(1.0)), Error);
  EXPECT_THROW(FamilySpec(FamilyKind::Exponential, Distribution::from_probs({0.0, 1.0}, false), row({0, 1}),
                          Alpha(1.0)),
               Error);
  Matrix dup(2, 3);
  dup << 1, 2, 3, 2, 4, 6;
  EXPECT_THROW(FamilySpec(FamilyKind::Exponential, Distribution::uniform(3), dup, Alpha(1.0)), Error);
  // Q^(α-1) constant lies in the span of f = 1.
  EXPECT_THROW(FamilySpec(FamilyKind::AlphaPowerLaw, Distribution::uniform(3), row({1, 1, 1}), Alpha(2.0)), Error);
}

TEST(EscortMap, ParameterMapHandValues) {
  EXPECT_NEAR(escort_parameter_map(vec1(1.0), kHalf, Alpha(2.0))(0), expected::kEscortThetaPrimeHalf, 1e-15);
  EXPECT_NEAR(escort_parameter_map(vec1(0.3), Distribution::from_probs({0.25, 0.75}), Alpha(2.0))(0),
              expected::kEscortThetaPrimeQuarter, 1e-15);
  EXPECT_EQ(escort_parameter_map(vec1(0.0), kHalf, Alpha(2.0))(0), 0.0);
}

TEST(EscortMap, HandInstance) {
  const FamilySpec spec(FamilyKind::AlphaExponential, kHalf, row({0, 1}), Alpha(2.0));
  EXPECT_NEAR(eval_member(spec, vec1(0.2))[0], expected::kAlphaExpHalf02[0], 1e-15);
  const EscortImage img = escort_family_map(spec, vec1(0.2));
  const auto target = eval_member(escort_target_spec(spec), img.theta_prime);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_NEAR(img.escort[i], expected::kAlphaExpHalf02Escort[i], 1e-14);
    EXPECT_NEAR(target[i], expected::kEscortTargetHalf02[i], 1e-14);
  }
}

TEST(EscortMap, RandomBijection) {
  std::mt19937_64 rng(21);
  for (double a : {0.5, 2.0, 3.0}) {
    for (int t = 0; t < 15; ++t) {
      const auto spec = testing::random_family(rng, FamilyKind::AlphaExponential, 4, 2, a);
      const Vector th = testing::admissible_theta(rng, spec, 1.0);
      const EscortImage img = escort_family_map(spec, th);
      const auto target = eval_member(escort_target_spec(spec), img.theta_prime);
      EXPECT_LT((img.escort.probs() - target.probs()).cwiseAbs().maxCoeff(), 1e-9);
      const auto [p_back, th_back] = escort_inverse_map(spec, img.theta_prime);
      EXPECT_LT((p_back.probs() - eval_member(spec, th).probs()).cwiseAbs().maxCoeff(), 1e-10);
      EXPECT_LT((th_back - th).cwiseAbs().maxCoeff(), 1e-10);
    }
  }
}

TEST(EscortMap, DistinctThetaDistinctEscorts) {
  const FamilySpec spec(FamilyKind::AlphaExponential, Distribution::from_probs({0.2, 0.3, 0.5}), row({0, 1, 2}),
                        Alpha(0.5));
  const auto a = escort_family_map(spec, vec1(0.1)).escort.probs();
  const auto b = escort_family_map(spec, vec1(0.2)).escort.probs();
  EXPECT_GT((a - b).cwiseAbs().maxCoeff(), 1e-4);
}

TEST(Rebase, SameMembers) {
  std::mt19937_64 rng(4);
  for (auto kind : {FamilyKind::Exponential, FamilyKind::AlphaPowerLaw, FamilyKind::NonNormalizedAlphaPowerLaw,
                    FamilyKind::AlphaExponential}) {
    const auto spec = testing::random_family(rng, kind, 4, 1, 2.0);
    const Vector th0 = testing::admissible_theta(rng, spec, 0.3);
    const FamilySpec rebased = rebase(spec, th0);
    for (int i = -4; i <= 4; ++i) {
      const Vector th = th0 + vec1(0.05 * i);
      if (!admissible(spec, th)) continue;
      const auto p = eval_member(spec, th);
      const auto r = eval_member(rebased, rebased_parameter(spec, th0, th));
      EXPECT_LT((p.probs() - r.probs()).cwiseAbs().maxCoeff(), 1e-9) << to_string(kind);
    }
  }
}

TEST(Membership, MembersFitAndPerturbedDoNot) {
  std::mt19937_64 rng(6);
  for (auto kind : {FamilyKind::Exponential, FamilyKind::AlphaPowerLaw, FamilyKind::NonNormalizedAlphaPowerLaw,
                    FamilyKind::AlphaExponential}) {
    const auto spec = testing::random_family(rng, kind, 4, 1, 0.5);
    const Vector th = testing::admissible_theta(rng, spec, 0.5);
    const auto p = eval_member(spec, th);
    EXPECT_LE(membership_residual(spec, p), 1e-10) << to_string(kind);
    EXPECT_LE(membership_residual(spec, spec.q()), 1e-10);
    Vector shifted = p.probs();
    shifted(0) += 0.05;
    shifted(1) -= 0.05;
    if (shifted.minCoeff() > 0.0) {
      EXPECT_GT(membership_residual(spec, Distribution::from_probs(shifted)), 1e-4) << to_string(kind);
    }
  }
}

TEST(Family, ParseNames) {
  EXPECT_EQ(parse_family_kind("bpow"), FamilyKind::NonNormalizedAlphaPowerLaw);
  EXPECT_EQ(parse_family_kind("alpha_exponential"), FamilyKind::AlphaExponential);
  EXPECT_THROW(parse_family_kind("gauss"), Error);
}

}  // namespace
}  // namespace divproj
