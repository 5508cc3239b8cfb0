#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "aqc/closed_form.hpp"

namespace aqc {
namespace {

using std::numbers::pi;

struct Draw {
  CouplerParams params;
  BlockIndex idx;
  double t;
};

Draw random_draw(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> lam(0.0, 5.0);
  std::uniform_int_distribution<std::size_t> nm(0, 30);
  std::uniform_real_distribution<double> time(-50.0, 50.0);
  for (;;) {
    const double l1 = lam(rng), l2 = lam(rng), l3 = lam(rng);
    if (l1 + l2 + l3 == 0.0) continue;
    return {CouplerParams(l1, l2, l3), {nm(rng), nm(rng)}, time(rng)};
  }
}

TEST(BlockHamiltonian, Layout) {
  const Eigen::Matrix4d h = block_hamiltonian({1, 1, 0}, {0, 0});
  for (int i = 0; i < 4; ++i) EXPECT_EQ(h(i, i), 0.0);
  EXPECT_EQ(h(0, 1), 1.0);
  EXPECT_EQ(h(0, 2), 1.0);
  EXPECT_EQ(h(1, 3), 1.0);
  EXPECT_EQ(h(2, 3), 1.0);
  EXPECT_EQ(h(1, 2), 0.0);
  EXPECT_EQ(h(0, 3), 0.0);

  const Eigen::Matrix4d g = block_hamiltonian({1, 2, 3}, {1, 2});
  EXPECT_NEAR(g(1, 2), 3.0 * std::sqrt(6.0), 1e-12);
  EXPECT_NEAR(g(1, 2), 7.3485, 5e-5);
  EXPECT_TRUE(g == g.transpose());
}

TEST(Spectral, Examples) {
  const BlockCoefficients x0 = evolve_block_spectral({1, 2, 3}, {4, 1}, 0.0);
  EXPECT_EQ(x0.x1, complex(1.0));
  EXPECT_EQ(x0.x2, complex(0.0));

  for (double t : {0.3, 7.0, -12.5}) {
    const BlockCoefficients dark = evolve_block_spectral({0, 0, 1.7}, {3, 5}, t);
    EXPECT_NEAR(std::abs(dark.x1 - 1.0), 0.0, 1e-12);
    EXPECT_NEAR(dark.norm_squared() - std::norm(dark.x1), 0.0, 1e-20);
  }

  const BlockCoefficients jcm = evolve_block_spectral({1, 0, 0}, {0, 0}, pi / 2);
  EXPECT_NEAR(std::abs(jcm.x1), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(jcm.x3 - complex(0, -1)), 0.0, 1e-12);
}

TEST(ClosedForm, Examples) {
  const EngineReport r0 = evolve_block_closed({1, 2, 3}, {2, 2}, 0.0);
  EXPECT_EQ(r0.coefficients.x1, complex(1.0));
  EXPECT_EQ(r0.coefficients.x4, complex(0.0));
  EXPECT_EQ(r0.coefficients.x2, complex(0.0));
  EXPECT_EQ(r0.coefficients.x3, complex(0.0));

  for (double t : {0.1, 2.0, 33.0}) {
    const EngineReport dark = evolve_block_closed({0, 0, 2}, {0, 0}, t);
    EXPECT_NEAR(std::abs(dark.coefficients.x1 - 1.0), 0.0, 1e-14);
  }

  const EngineReport r = evolve_block_closed({1, 1, 1}, {2, 3}, 1.7);
  EXPECT_FALSE(r.used_fallback);
  EXPECT_LT(max_abs_difference(r.coefficients, evolve_block_spectral({1, 1, 1}, {2, 3}, 1.7)), 1e-9);
}

TEST(ClosedForm, FallbackManifold) {
  // lambda3^2 A = c1^2 at n = m = 0 with lambda1 = lambda2 = 1: lambda3 = sqrt(2).
  const EngineReport on = evolve_block_closed({1, 1, std::sqrt(2.0)}, {0, 0}, 1.3);
  EXPECT_TRUE(on.used_fallback);
  EXPECT_LT(on.conditioning, kClosedFormFallbackThreshold);
  const BlockCoefficients s = evolve_block_spectral({1, 1, std::sqrt(2.0)}, {0, 0}, 1.3);
  EXPECT_LT(std::abs(on.coefficients.x1 - s.x1), 1e-9);
  EXPECT_LT(std::abs(on.coefficients.x4 - s.x4), 1e-9);
  EXPECT_EQ(on.coefficients.x2, s.x2);

  EXPECT_TRUE(evolve_block_closed({1, 2, 0}, {3, 1}, 2.0).used_fallback);
  EXPECT_TRUE(evolve_block_closed({0, 0, 1}, {3, 1}, 2.0).used_fallback);
  const EngineReport off = evolve_block_closed({1, 2, 3}, {1, 2}, 0.7);
  EXPECT_FALSE(off.used_fallback);
  EXPECT_GT(off.conditioning, 0.5);
}

TEST(ClosedForm, SincSeriesBranchIsContinuous) {
  EXPECT_EQ(sinc(0.0), 1.0);
  EXPECT_NEAR(sinc(0.99e-4), std::sin(0.99e-4) / 0.99e-4, 4e-16);
  EXPECT_NEAR(sinc(1.01e-4), 1.0 - 1.01e-8 * 1.01 / 6.0, 4e-16);
}

TEST(BlockProperties, UnitarityBothEngines) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 1000; ++trial) {
    const Draw d = random_draw(rng);
    EXPECT_NEAR(evolve_block_spectral(d.params, d.idx, d.t).norm_squared(), 1.0, 1e-10);
    EXPECT_NEAR(evolve_block_closed(d.params, d.idx, d.t).coefficients.norm_squared(), 1.0, 1e-10);
  }
}

TEST(BlockProperties, EngineEquivalence) {
  std::mt19937_64 rng(99);
  int off_manifold = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const Draw d = random_draw(rng);
    const EngineReport c = evolve_block_closed(d.params, d.idx, d.t);
    const BlockCoefficients s = evolve_block_spectral(d.params, d.idx, d.t);
    EXPECT_LT(std::abs(c.coefficients.x1 - s.x1), 1e-9);
    EXPECT_LT(std::abs(c.coefficients.x4 - s.x4), 1e-9);
    if (!c.used_fallback) {
      ++off_manifold;
      EXPECT_LT(max_abs_difference(c.coefficients, s), 1e-9);
    }
  }
  EXPECT_GT(off_manifold, 900);
}

TEST(BlockProperties, EigenvalueStructureMatchesRabiFrequencies) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 500; ++trial) {
    const Draw d = random_draw(rng);
    const SpectralPropagator prop(d.params, d.idx);
    const BlockConstants k = block_constants(d.params, d.idx);
    std::array<double, 4> expected = {0.5 * k.c2 + k.omega_plus, 0.5 * k.c2 - k.omega_plus,
                                      -0.5 * k.c2 + k.omega_minus, -0.5 * k.c2 - k.omega_minus};
    std::sort(expected.begin(), expected.end());
    double trace = 0.0;
    for (int i = 0; i < 4; ++i) {
      EXPECT_NEAR(prop.eigenvalues()(i), expected[i], 1e-10);
      trace += prop.eigenvalues()(i);
    }
    EXPECT_NEAR(trace, 0.0, 1e-10);
  }
}

TEST(BlockProperties, EigenvaluesAtEqualCouplings) {
  // lambda1 = lambda2, n = m = 0: {c2/2 +- Omega+, 0, -c2} with Omega- = c2/2.
  const CouplerParams p(0.8, 0.8, 1.9);
  const BlockConstants k = block_constants(p, {0, 0});
  EXPECT_NEAR(k.omega_minus, 0.5 * k.c2, 1e-15);
  std::array<double, 4> expected = {0.5 * k.c2 + k.omega_plus, 0.5 * k.c2 - k.omega_plus, 0.0, -k.c2};
  std::sort(expected.begin(), expected.end());
  const SpectralPropagator prop(p, {0, 0});
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(prop.eigenvalues()(i), expected[i], 1e-12);
}

TEST(BlockProperties, JcmLimit) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> lam(0.1, 5.0), time(-50.0, 50.0);
  std::uniform_int_distribution<std::size_t> nm(0, 30);
  for (int trial = 0; trial < 300; ++trial) {
    const double l1 = lam(rng), t = time(rng);
    const BlockIndex idx{nm(rng), nm(rng)};
    const double phase = l1 * t * std::sqrt(static_cast<double>(idx.n) + 1.0);
    for (const BlockCoefficients& x :
         {evolve_block_spectral({l1, 0, 0}, idx, t), evolve_block_closed({l1, 0, 0}, idx, t).coefficients}) {
      EXPECT_NEAR(std::abs(x.x1 - std::cos(phase)), 0.0, 1e-10);
      EXPECT_NEAR(std::abs(x.x3 - complex(0, -std::sin(phase))), 0.0, 1e-10);
      EXPECT_NEAR(std::abs(x.x2), 0.0, 1e-10);
      EXPECT_NEAR(std::abs(x.x4), 0.0, 1e-10);
    }
  }
}

TEST(BlockProperties, DecoupledJcmLimit) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> lam(0.1, 5.0), time(-50.0, 50.0);
  std::uniform_int_distribution<std::size_t> nm(0, 30);
  for (int trial = 0; trial < 300; ++trial) {
    const double l1 = lam(rng), l2 = lam(rng), t = time(rng);
    const BlockIndex idx{nm(rng), nm(rng)};
    const double p1 = l1 * t * std::sqrt(static_cast<double>(idx.n) + 1.0);
    const double p2 = l2 * t * std::sqrt(static_cast<double>(idx.m) + 1.0);
    const BlockCoefficients s = evolve_block_spectral({l1, l2, 0}, idx, t);
    const BlockCoefficients c = evolve_block_closed({l1, l2, 0}, idx, t).coefficients;
    EXPECT_NEAR(std::abs(s.x1 - std::cos(p1) * std::cos(p2)), 0.0, 1e-9);
    EXPECT_NEAR(std::abs(s.x4 + std::sin(p1) * std::sin(p2)), 0.0, 1e-9);
    EXPECT_NEAR(std::abs(c.x1 - s.x1), 0.0, 1e-9);
    EXPECT_NEAR(std::abs(c.x4 - s.x4), 0.0, 1e-9);
  }
}

TEST(BlockProperties, TimeReversalIsConjugation) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 300; ++trial) {
    const Draw d = random_draw(rng);
    const BlockCoefficients fwd = evolve_block_closed(d.params, d.idx, d.t).coefficients;
    const BlockCoefficients back = evolve_block_closed(d.params, d.idx, -d.t).coefficients;
    const BlockCoefficients sf = evolve_block_spectral(d.params, d.idx, d.t);
    const BlockCoefficients sb = evolve_block_spectral(d.params, d.idx, -d.t);
    for (std::size_t j = 0; j < 4; ++j) {
      EXPECT_NEAR(std::abs(back[j] - std::conj(fwd[j])), 0.0, 1e-9);
      EXPECT_NEAR(std::abs(sb[j] - std::conj(sf[j])), 0.0, 1e-10);
    }
  }
}

TEST(SpecialCases, TwoModeJcm) {
  auto [c, s] = two_mode_jcm_coefficients({4, 7}, 0.0);
  EXPECT_EQ(c, complex(1.0));
  EXPECT_EQ(s, complex(0.0));
  std::tie(c, s) = two_mode_jcm_coefficients({0, 0}, pi / 2);
  EXPECT_NEAR(std::abs(c), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(s - complex(0, -1)), 0.0, 1e-15);
  for (double T : {0.1, 3.3, 17.0}) {
    std::tie(c, s) = two_mode_jcm_coefficients({3, 2}, T);
    EXPECT_NEAR(std::norm(c) + std::norm(s), 1.0, 1e-15);
  }
}

TEST(SpecialCases, BellPhase) {
  EXPECT_EQ(bell_state_coefficients({5, 5}, 0.0), complex(1.0));
  EXPECT_NEAR(std::abs(bell_state_coefficients({3, 0}, pi) - 1.0), 0.0, 1e-14);
  for (double T : {0.2, 9.1, -4.0}) EXPECT_NEAR(std::abs(bell_state_coefficients({2, 6}, T)), 1.0, 1e-15);
}

}  // namespace
}  // namespace aqc
