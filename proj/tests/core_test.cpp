#include <cmath>
#include <complex>
#include <random>

#include <gtest/gtest.h>

#include "aqc/core.hpp"

namespace aqc {
namespace {

// Poisson cumulative mass summed term by term in long double.
long double poisson_mass_upto(long double mean, std::size_t n_max) {
  long double s = 0.0L;
  for (std::size_t n = 0; n <= n_max; ++n) {
    s += std::exp(-mean + static_cast<long double>(n) * std::log(mean) -
                  std::lgamma(static_cast<long double>(n) + 1.0L));
  }
  return s;
}

TEST(CouplerParams, RejectsInvalidCouplings) {
  EXPECT_THROW(CouplerParams(0, 0, 0), InvalidArgument);
  EXPECT_THROW(CouplerParams(-1, 0, 0), InvalidArgument);
  EXPECT_THROW(CouplerParams(1, NAN, 0), InvalidArgument);
  EXPECT_THROW(CouplerParams(1, 0, INFINITY), InvalidArgument);
  EXPECT_NO_THROW(CouplerParams(0, 0, 2));
}

TEST(CoherentAmplitudes, VacuumAndUnitAmplitude) {
  const auto vac = coherent_amplitudes(0.0, 3);
  ASSERT_EQ(vac.size(), 4u);
  EXPECT_EQ(vac[0], complex(1.0));
  for (int n = 1; n < 4; ++n) EXPECT_EQ(vac[n], complex(0.0));

  const auto c = coherent_amplitudes(1.0, 2);
  const double e = std::exp(-0.5);
  EXPECT_NEAR(c[0].real(), e, 1e-15);
  EXPECT_NEAR(c[1].real(), e, 1e-15);
  EXPECT_NEAR(c[2].real(), e / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(c[2].real(), 0.42888, 1e-5);
}

TEST(CoherentAmplitudes, RejectsNonFinite) {
  EXPECT_THROW(coherent_amplitudes(complex(NAN, 0), 3), InvalidArgument);
  EXPECT_THROW(coherent_field(complex(0, INFINITY)), InvalidArgument);
}

TEST(CoherentAmplitudes, CapturedMassMatchesPoissonSum) {
  const ModeField f = coherent_field(5.0);
  EXPECT_GE(f.captured_mass(), 1.0 - 1e-10);
  const long double ref = poisson_mass_upto(25.0L, f.n_max());
  EXPECT_NEAR(f.captured_mass(), static_cast<double>(ref), 1e-14);
  EXPECT_LE(1.0 - f.captured_mass(), f.tail_bound);
}

TEST(CoherentAmplitudes, RecurrenceMatchesTermwiseFormula) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-3.0 / std::sqrt(2.0), 3.0 / std::sqrt(2.0));
  for (int trial = 0; trial < 200; ++trial) {
    const complex alpha(u(rng), u(rng));
    const auto c = coherent_amplitudes(alpha, 20);
    for (int n = 0; n <= 20; ++n) {
      const complex direct =
          std::exp(-0.5 * std::norm(alpha)) * std::pow(alpha, n) / std::sqrt(std::tgamma(n + 1.0));
      if (std::abs(direct) < 1e-300) continue;
      EXPECT_LE(std::abs(c[n] - direct), 1e-12 * std::abs(direct)) << "alpha=" << alpha << " n=" << n;
    }
  }
}

TEST(CoherentAmplitudes, BrightFieldDoesNotUnderflow) {
  const ModeField f = coherent_field(40.0);
  EXPECT_NEAR(f.captured_mass(), 1.0, 1e-9);
  EXPECT_NEAR(f.mean_photons(), 1600.0, 1e-5);
}

TEST(EvenCoherent, OddTermsVanishAndNormalisation) {
  const ModeField f = even_coherent_field(1.0);
  for (std::size_t n = 1; n < f.amplitudes.size(); n += 2) EXPECT_EQ(f.amplitudes[n], complex(0.0));
  EXPECT_NEAR(f.captured_mass(), 1.0, 1e-10);
  EXPECT_EQ(f.kind, FieldKind::even_coherent);

  for (double a : {0.3, 2.0, 5.0}) {
    EXPECT_NEAR(even_coherent_field(a).captured_mass(), 1.0, 1e-10) << a;
  }
}

TEST(EvenCoherent, GroundAmplitudeMatchesBruteForceNormalisation) {
  // (|1> + |-1>) expanded termwise to n = 60 and normalised directly.
  double norm = 0.0;
  std::vector<double> raw(61);
  for (int n = 0; n <= 60; ++n) {
    raw[n] = (std::pow(1.0, n) + std::pow(-1.0, n)) / std::sqrt(std::tgamma(n + 1.0));
    norm += raw[n] * raw[n];
  }
  const double c0 = raw[0] / std::sqrt(norm);
  // A deep cut keeps the renormalisation over the truncated support negligible.
  const ModeField f = even_coherent_field(1.0, 1e-16);
  EXPECT_NEAR(f.amplitudes[0].real(), c0, 1e-12);
  EXPECT_NEAR(f.amplitudes[0].real(), 0.805018182194592, 1e-12);
  EXPECT_NEAR(f.amplitudes[2].real(), 0.569233815608264, 1e-12);
}

TEST(EvenCoherent, ZeroAmplitudeIsVacuum) {
  const ModeField f = even_coherent_field(0.0);
  EXPECT_EQ(f.kind, FieldKind::vacuum);
  EXPECT_EQ(f.n_max(), 0u);
}

TEST(AutoTruncation, Examples) {
  EXPECT_EQ(auto_truncation(0.0, 1e-10), 0u);
  const std::size_t n = auto_truncation(5.0, 1e-10);
  EXPECT_GE(n, 60u);
  EXPECT_LE(n, 90u);
  // Smallest n with discarded Poisson(25) mass below 1e-10 is 63 (mpmath scan).
  EXPECT_GE(n, 63u);
  EXPECT_LT(1.0L - poisson_mass_upto(25.0L, n), 1e-10L);

  std::size_t deep = 0;
  EXPECT_NO_THROW(deep = auto_truncation(5.0, 1e-30));
  EXPECT_GE(deep, 101u);  // mpmath scan gives 101 as the smallest valid cut
  EXPECT_LE(deep, 4096u);
}

TEST(AutoTruncation, Errors) {
  EXPECT_THROW(auto_truncation(1.0, 0.0), InvalidArgument);
  EXPECT_THROW(auto_truncation(1.0, 1.0), InvalidArgument);
  try {
    auto_truncation(80.0, 1e-10);
    FAIL() << "expected overflow";
  } catch (const TruncationOverflow& e) {
    EXPECT_NE(std::string(e.what()).find("80"), std::string::npos);
  }
}

TEST(AutoTruncation, MonotoneInTolerance) {
  for (double a : {0.5, 1.0, 3.0, 7.5}) {
    std::size_t prev = 0;
    for (double tol = 1e-2; tol > 1e-40; tol *= 1e-3) {
      const std::size_t n = auto_truncation(a, tol);
      EXPECT_GE(n, prev);
      prev = n;
    }
  }
}

TEST(BlockConstants, Examples) {
  auto k = block_constants({1, 1, 0}, {0, 0});
  EXPECT_DOUBLE_EQ(k.omega_plus, 2.0);
  EXPECT_DOUBLE_EQ(k.omega_minus, 0.0);
  EXPECT_DOUBLE_EQ(k.c1, 2.0);
  EXPECT_DOUBLE_EQ(k.c2, 0.0);
  EXPECT_DOUBLE_EQ(k.a_nm, 2.0);

  k = block_constants({0, 0, 2}, {0, 0});
  EXPECT_DOUBLE_EQ(k.omega_plus, 1.0);
  EXPECT_DOUBLE_EQ(k.omega_minus, 1.0);
  EXPECT_DOUBLE_EQ(k.c2, 2.0);
  EXPECT_DOUBLE_EQ(k.c1, 0.0);
  EXPECT_DOUBLE_EQ(k.a_nm, 0.0);

  k = block_constants({1, 2, 3}, {1, 2});
  EXPECT_NEAR(k.a_nm, 14.0, 1e-12);
  EXPECT_NEAR(k.c1, 4.0 * std::sqrt(6.0), 1e-12);
  EXPECT_NEAR(k.c2, 3.0 * std::sqrt(6.0), 1e-12);
  EXPECT_NEAR(k.omega_plus, 6.1072, 5e-5);
  EXPECT_NEAR(k.omega_minus, 4.2074, 5e-5);
}

TEST(BlockConstants, RabiIdentityAndOrdering) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> lam(0.0, 5.0);
  std::uniform_int_distribution<std::size_t> idx(0, 60);
  for (int trial = 0; trial < 2000; ++trial) {
    const CouplerParams p(lam(rng), lam(rng), lam(rng) + 1e-3);
    const BlockIndex b{idx(rng), idx(rng)};
    const BlockConstants k = block_constants(p, b);
    const double lhs = 4.0 * (k.omega_plus * k.omega_plus + k.omega_minus * k.omega_minus);
    const double rhs = 2.0 * k.c2 * k.c2 + 8.0 * k.a_nm;
    EXPECT_LE(std::abs(lhs - rhs), 1e-12 * rhs);
    EXPECT_GE(k.omega_plus, k.omega_minus);
    EXPECT_GE(k.omega_minus, 0.0);
    const double n1 = static_cast<double>(b.n) + 1, m1 = static_cast<double>(b.m) + 1;
    EXPECT_NEAR(k.a_nm, p.lambda1() * p.lambda1() * n1 + p.lambda2() * p.lambda2() * m1,
                1e-12 * (1 + k.a_nm));
  }
}

TEST(CompensatedSum, RecoversSmallTerms) {
  CompensatedSum s;
  s += 1.0;
  for (int i = 0; i < 1000; ++i) s += 1e-17;
  s += -1.0;
  EXPECT_NEAR(s.value(), 1e-14, 1e-20);
}

TEST(CustomField, Validation) {
  EXPECT_THROW(custom_field({}), InvalidArgument);
  EXPECT_THROW(custom_field({1.0, 1.0}), InvalidArgument);
  const ModeField f = custom_field({std::sqrt(0.5), std::sqrt(0.25)});
  EXPECT_NEAR(f.tail_bound, 0.25, 1e-15);
}

}  // namespace
}  // namespace aqc
