#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "lhsphere/mie.hpp"
#include "lhsphere/resonance.hpp"
#include "oracle.hpp"
#include "support.hpp"

using namespace lhsphere;
using testsupport::rel_diff;

namespace {

const Medium kVac = Medium::vacuum();
const Medium kLh{-4.0, -1.05};
const Medium kRh{4.0, 1.05};

double max_abs_p8(const Medium& in, double lo, double hi, int points) {
  double best = 0.0;
  for (int i = 1; i <= points; ++i) {
    const double x = lo + (hi - lo) * i / points;
    best = std::max(best, std::abs(mie::p_te(8, SphereSystem{in, kVac, x})));
  }
  return best;
}

}  // namespace

TEST(Mie, TrivialSphereReflectsNothing) {
  for (double x : {0.1, 1.0, 7.5}) {
    const SphereSystem sys{kVac, kVac, x};
    for (int n = 1; n <= 10; ++n) {
      EXPECT_EQ(mie::q_tm(n, sys), cplx(0.0, 0.0));
      EXPECT_EQ(mie::p_te(n, sys), cplx(0.0, 0.0));
    }
  }
}

TEST(Mie, DielectricSphereMatchesOracle) {
  const SphereSystem sys{Medium{4.0, 1.0}, kVac, 1.0};
  const auto ref = oracle::mie(oracle::Pol::TM, 1, 4.0, 1.0, 1.0, 1.0, 1.0);
  EXPECT_LT(rel_diff(mie::q_tm(1, sys), ref[1]), 1e-13);
  // textbook a_1 for m = 2, x = 1 lies on the unitarity circle
  EXPECT_NEAR(std::abs(1.0 - 2.0 * ref[1]), 1.0, 1e-14);
}

TEST(Mie, RandomSystemsMatchOracle) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 25; ++trial) {
    Medium in = testsupport::random_medium(rng);
    if (trial % 5 == 4) in = Medium{cplx{in.epsilon().real(), 0.3}, cplx{in.mu().real(), -0.1}};
    const Medium out{testsupport::uniform(rng, 0.5, 3.0), testsupport::uniform(rng, 0.5, 3.0)};
    const double x = testsupport::uniform(rng, 0.05, 5.0);
    const SphereSystem sys{in, out, x};
    for (const Polarization pol : {Polarization::TM, Polarization::TE}) {
      const auto ref = oracle::mie(pol == Polarization::TM ? oracle::Pol::TM : oracle::Pol::TE, 15, in.epsilon(),
                                   in.mu(), out.epsilon(), out.mu(), x);
      const auto got = mie::coefficients(pol, 15, sys);
      for (int n = 1; n <= 15; ++n) {
        const cplx r = ref[static_cast<std::size_t>(n)];
        const cplx g = got[static_cast<std::size_t>(n) - 1].value;
        EXPECT_LT(std::abs(g - r), 1e-9 * std::abs(r) + 1e-300)
            << to_string(pol) << " n=" << n << " eps1=" << in.epsilon() << " mu1=" << in.mu() << " x=" << x;
      }
    }
  }
}

TEST(Mie, DualityIsExact) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    const SphereSystem sys{testsupport::random_medium(rng), testsupport::random_medium(rng),
                           testsupport::uniform(rng, 0.01, 5.0)};
    const int n = 1 + trial % 12;
    const cplx p = mie::p_te(n, sys);
    const cplx q = mie::q_tm(n, sys.dual());
    EXPECT_EQ(p, q) << trial;
  }
}

TEST(Mie, BranchParity) {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 50; ++trial) {
    const Medium in = testsupport::random_medium(rng);
    const double x = testsupport::uniform(rng, 0.1, 4.0);
    const cplx z1 = wave_argument(in, x);
    const cplx z2 = wave_argument(kVac, x);
    for (const Polarization pol : {Polarization::TM, Polarization::TE}) {
      for (int n = 1; n <= 10; ++n) {
        const auto a = mie::coefficient_at(pol, n, in, kVac, z1, z2).value;
        const auto b = mie::coefficient_at(pol, n, in, kVac, -z1, z2).value;
        EXPECT_LT(rel_diff(a, b), 1e-12) << to_string(pol) << n << " " << in.epsilon() << " " << in.mu();
      }
    }
  }
}

TEST(Mie, LosslessUnitarity) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    const SphereSystem sys{testsupport::random_medium(rng), Medium{testsupport::uniform(rng, 0.2, 4.0), 1.0},
                           testsupport::uniform(rng, 0.05, 10.0)};
    for (const Polarization pol : {Polarization::TM, Polarization::TE}) {
      for (const auto& c : mie::coefficients(pol, 20, sys)) {
        EXPECT_NEAR(std::abs(1.0 - 2.0 * c.value), 1.0, 1e-8) << trial << ' ' << c.n;
      }
    }
  }
}

TEST(Mie, RayleighSlope) {
  for (const Medium& in : {Medium{4.0, 1.0}, Medium{2.0, 3.0}, Medium{-4.0, -1.05}}) {
    for (const Polarization pol : {Polarization::TM, Polarization::TE}) {
      for (int n = 1; n <= 3; ++n) {
        const double a = std::abs(mie::coefficient(pol, n, SphereSystem{in, kVac, 1e-3}).value);
        const double b = std::abs(mie::coefficient(pol, n, SphereSystem{in, kVac, 1e-2}).value);
        const double slope = std::log(b / a) / std::log(10.0);
        // no permeability contrast: the leading x^{2n+1} term of p_n cancels
        const bool no_contrast = pol == Polarization::TE && in.mu() == kVac.mu();
        EXPECT_NEAR(slope, no_contrast ? 2.0 * n + 3.0 : 2.0 * n + 1.0, 0.02) << to_string(pol) << n;
      }
    }
  }
}

TEST(Mie, LeftHandedP8HasNearUnityPeak) {
  // the peak is ~5e-8 wide in ka, so locate it through the denominator root
  const auto est = resonance::asymptotic_z(Polarization::TE, 8, kLh, kVac);
  ASSERT_TRUE(est);
  const auto mode = resonance::find_root(Polarization::TE, 8, kLh, kVac, cplx{est->re_z, 0.0});
  const double x = mode.z_root.real();
  EXPECT_GE(std::abs(mie::p_te(8, SphereSystem{kLh, kVac, x})), 0.9);
  EXPECT_LT(std::abs(x - 1.9930) / 1.9930, 0.15);
  EXPECT_LT(std::abs(mie::p_te(8, SphereSystem{kLh, kVac, x * (1.0 + 1e-5)})), 0.1);
}

TEST(Mie, RightHandedP8HasNoPeakBelow2_5) { EXPECT_LT(max_abs_p8(kRh, 0.0, 2.5, 5000), 0.9); }

TEST(Mie, RightHandedP8PeakAboveWhisperingGalleryEstimate) {
  EXPECT_GE(max_abs_p8(kRh, 3.9, 6.0, 20000), 0.9);
}

TEST(Denominator, VacuumHasNoResonance) {
  EXPECT_GT(std::abs(mie::denominator(Polarization::TM, 1, SphereSystem{kVac, kVac, 1.0})), 0.1);
}

TEST(Denominator, VanishesAtPolishedRoot) {
  const auto est = resonance::asymptotic_z(Polarization::TE, 8, kLh, kVac);
  ASSERT_TRUE(est);
  const auto mode = resonance::find_root(Polarization::TE, 8, kLh, kVac, cplx{est->re_z, 0.0});
  const double scale = mode.scale;
  EXPECT_LT(std::abs(mie::denominator(Polarization::TE, 8, kLh, kVac, mode.z_root)), 1e-10 * scale);
}

TEST(Denominator, RightHandedHasNoRealZero) {
  // lossless RH roots sit below the real axis; |D| stays away from zero on it
  std::vector<double> mags;
  for (int i = 1; i <= 4000; ++i) {
    const double x = 10.0 * i / 4000.0;
    mags.push_back(std::abs(mie::denominator(Polarization::TE, 8, SphereSystem{kRh, kVac, x})));
  }
  for (std::size_t i = 0; i < mags.size(); ++i) EXPECT_GT(mags[i], 0.0);
  const auto mode = resonance::find_root(Polarization::TE, 8, kRh, kVac, cplx{5.57, 0.0});
  EXPECT_LT(mode.z_root.imag(), 0.0);
  const double on_axis = std::abs(mie::denominator(Polarization::TE, 8, kRh, kVac, cplx{mode.z_root.real(), 0.0}));
  EXPECT_GT(on_axis, 1e3 * mode.residual);
}

TEST(Denominator, ResonantFlag) {
  // lossless real-axis coefficients obey |q| <= 1, so the flag needs the
  // complex size parameter of a root
  const auto est = resonance::asymptotic_z(Polarization::TE, 8, kLh, kVac);
  ASSERT_TRUE(est);
  const auto mode = resonance::find_root(Polarization::TE, 8, kLh, kVac, cplx{est->re_z, 0.0});
  const auto at = mie::coefficient_at(Polarization::TE, 8, kLh, kVac, wave_argument(kLh, mode.z_root),
                                      wave_argument(kVac, mode.z_root));
  EXPECT_TRUE(at.resonant);
  EXPECT_FALSE(mie::coefficient(Polarization::TE, 8, SphereSystem{kLh, kVac, mode.z_root.real()}).resonant);
  EXPECT_FALSE(mie::coefficient(Polarization::TE, 8, SphereSystem{kRh, kVac, 1.0}).resonant);
}

TEST(Denominator, RejectsOrderZero) {
  EXPECT_THROW(mie::q_tm(0, SphereSystem{kLh, kVac, 1.0}), DomainError);
}
