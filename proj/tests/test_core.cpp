#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "lhsphere/core.hpp"
#include "lhsphere/errors.hpp"
#include "support.hpp"

using namespace lhsphere;

TEST(Handedness, VacuumIsRightHanded) {
  const auto h = classify_handedness(Medium{1.0, 1.0});
  EXPECT_EQ(h.classification, HandednessClass::RightHanded);
  EXPECT_EQ(h.beta(), 1);
}

TEST(Handedness, NegativePairIsLeftHanded) {
  const auto h = classify_handedness(Medium{-4.0, -1.05});
  EXPECT_EQ(h.classification, HandednessClass::LeftHanded);
  EXPECT_EQ(h.beta(), -1);
}

TEST(Handedness, MixedSignsHaveNoBeta) {
  const auto h = classify_handedness(Medium{-4.0, 1.05});
  EXPECT_EQ(h.classification, HandednessClass::Mixed);
  EXPECT_THROW(h.beta(), DomainError);
}

TEST(Handedness, UsesRealPartsOnly) {
  EXPECT_TRUE(classify_handedness(Medium{cplx{-4.0, 0.3}, cplx{-1.0, 2.0}}).is_left());
  EXPECT_TRUE(classify_handedness(Medium{cplx{2.0, -5.0}, cplx{1.0, 0.1}}).is_right());
}

TEST(Handedness, StableUnderPositiveScaling) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 200; ++i) {
    const Medium m = testsupport::random_medium(rng);
    const double s = testsupport::uniform(rng, 1e-3, 1e3);
    const double t = testsupport::uniform(rng, 1e-3, 1e3);
    EXPECT_EQ(classify_handedness(m).classification,
              classify_handedness(Medium{m.epsilon() * s, m.mu() * t}).classification);
  }
}

TEST(WaveArgument, Vacuum) { EXPECT_EQ(wave_argument(Medium::vacuum(), 2.0), cplx(2.0, 0.0)); }

TEST(WaveArgument, LeftHandedIsRealPositive) {
  const cplx z = wave_argument(Medium{-4.0, -1.05}, 1.0);
  EXPECT_NEAR(z.real(), std::sqrt(4.2), 1e-15);
  EXPECT_NEAR(z.real(), 2.04939, 1e-5);
  EXPECT_EQ(z.imag(), 0.0);
}

TEST(WaveArgument, PrincipalRootOfNegativeProduct) {
  const cplx z = wave_argument(Medium{-1.0, 1.0}, 1.0);
  EXPECT_NEAR(z.real(), 0.0, 1e-16);
  EXPECT_NEAR(z.imag(), 1.0, 1e-16);
}

TEST(WaveArgument, AnyRealLeftHandedMediumGivesPositiveReal) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 200; ++i) {
    const double e = -testsupport::uniform(rng, 0.01, 50.0);
    const double m = -testsupport::uniform(rng, 0.01, 50.0);
    const cplx z = wave_argument(Medium{e, m}, testsupport::uniform(rng, 0.01, 10.0));
    EXPECT_GT(z.real(), 0.0);
    EXPECT_EQ(z.imag(), 0.0);
  }
}

TEST(WaveArgument, SystemArguments) {
  const SphereSystem sys{Medium{-4.0, -1.05}, Medium{2.0, 2.0}, 0.5};
  const auto w = wave_arguments(sys);
  EXPECT_NEAR(w.z1.real(), 0.5 * std::sqrt(4.2), 1e-15);
  EXPECT_NEAR(w.z2.real(), 1.0, 1e-15);
}

TEST(Medium, RejectsInvalidValues) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const double inf = std::numeric_limits<double>::infinity();
  EXPECT_THROW(Medium(nan, 1.0), DomainError);
  EXPECT_THROW(Medium(1.0, inf), DomainError);
  EXPECT_THROW(Medium(0.0, 1.0), DomainError);
  EXPECT_THROW(Medium(1.0, 0.0), DomainError);
}

TEST(Medium, DualSwapsComponents) {
  const Medium m{cplx{2.0, 0.1}, -3.0};
  EXPECT_EQ(m.dual().epsilon(), m.mu());
  EXPECT_EQ(m.dual().mu(), m.epsilon());
  EXPECT_TRUE(Medium(2.0, -3.0).lossless());
  EXPECT_FALSE(m.lossless());
}

TEST(SphereSystem, RequiresPositiveSize) {
  EXPECT_THROW(SphereSystem(Medium::vacuum(), Medium::vacuum(), 0.0), DomainError);
  EXPECT_THROW(SphereSystem(Medium::vacuum(), Medium::vacuum(), -1.0), DomainError);
  EXPECT_THROW(SphereSystem(Medium::vacuum(), Medium::vacuum(), std::numeric_limits<double>::infinity()),
               DomainError);
  EXPECT_NO_THROW(SphereSystem(Medium::vacuum(), Medium::vacuum(), 1e-6));
}

TEST(AtomSite, RhoMustBeOutside) {
  EXPECT_THROW(AtomSite(0.999, Transition::E1, Orientation::Radial), DomainError);
  EXPECT_NO_THROW(AtomSite(1.0, Transition::M1, Orientation::Tangential));
}
