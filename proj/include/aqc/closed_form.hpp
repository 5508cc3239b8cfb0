#pragma once

// Exact single-block dynamics. Each (n, m) block evolves under
// i dX/dt = M X with M the real symmetric 4x4 coupling matrix below.
// Two engines live here: the spectral engine (eigendecomposition of M) and
// the analytic closed form in terms of the Rabi frequencies omega_plus and
// omega_minus.

#include <cmath>
#include <complex>
#include <optional>
#include <sstream>
#include <utility>

#include <Eigen/Dense>

#include "aqc/core.hpp"

namespace aqc {

inline constexpr double kClosedFormFallbackThreshold = 1e-8;

// Rows/columns ordered (X1, X2, X3, X4).
inline Eigen::Matrix4d block_hamiltonian(const CouplerParams& params, BlockIndex idx) {
  const BlockConstants k = block_constants(params, idx);
  Eigen::Matrix4d h = Eigen::Matrix4d::Zero();
  h(0, 1) = h(1, 0) = k.rate2;
  h(0, 2) = h(2, 0) = k.rate1;
  h(1, 2) = h(2, 1) = k.c2;
  h(1, 3) = h(3, 1) = k.rate1;
  h(2, 3) = h(3, 2) = k.rate2;
  return h;
}

inline BlockCoefficients initial_block_vector(AtomicPreparation atoms) {
  const double r = 1.0 / std::sqrt(2.0);
  switch (atoms) {
    case AtomicPreparation::excited_excited: return {1.0, 0.0, 0.0, 0.0};
    case AtomicPreparation::excited_ground: return {0.0, 1.0, 0.0, 0.0};
    case AtomicPreparation::ground_excited: return {0.0, 0.0, 1.0, 0.0};
    case AtomicPreparation::bell_plus: return {0.0, r, r, 0.0};
  }
  return {};
}

// Cached eigendecomposition of one block; evolving to many times costs four
// complex exponentials per call.
class SpectralPropagator {
 public:
  SpectralPropagator(const CouplerParams& params, BlockIndex idx) {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> solver(block_hamiltonian(params, idx));
    if (solver.info() != Eigen::Success) {
      std::ostringstream os;
      os << "eigensolver did not converge for block (n=" << idx.n << ", m=" << idx.m
         << ") at lambda=(" << params.lambda1() << ", " << params.lambda2() << ", "
         << params.lambda3() << ")";
      throw NumericError(os.str());
    }
    values_ = solver.eigenvalues();
    vectors_ = solver.eigenvectors();
  }

  const Eigen::Vector4d& eigenvalues() const { return values_; }
  const Eigen::Matrix4d& eigenvectors() const { return vectors_; }

  BlockCoefficients evolve(double t, const BlockCoefficients& initial = {}) const {
    if (t == 0.0) return initial;
    complex proj[4];
    for (int k = 0; k < 4; ++k) {
      complex p{};
      for (int j = 0; j < 4; ++j) p += vectors_(j, k) * initial[static_cast<std::size_t>(j)];
      proj[k] = p * std::polar(1.0, -values_(k) * t);
    }
    BlockCoefficients out;
    for (int j = 0; j < 4; ++j) {
      complex s{};
      for (int k = 0; k < 4; ++k) s += vectors_(j, k) * proj[k];
      out[static_cast<std::size_t>(j)] = s;
    }
    return out;
  }

 private:
  Eigen::Vector4d values_;
  Eigen::Matrix4d vectors_;
};

inline BlockCoefficients evolve_block_spectral(const CouplerParams& params, BlockIndex idx,
                                               double t,
                                               const BlockCoefficients& initial = {}) {
  return SpectralPropagator(params, idx).evolve(t, initial);
}

// sin(x)/x with a Taylor branch near zero.
inline double sinc(double x) {
  if (std::abs(x) < 1e-4) {
    const double x2 = x * x;
    return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
  }
  return std::sin(x) / x;
}

struct EngineReport {
  BlockCoefficients coefficients;
  double conditioning = 0.0;  // |c2^2 A - c1^2| / (c2^2 A + c1^2)
  bool used_fallback = false;
};

// Relative size of the c2^2 A - c1^2 denominator carried by the published
// X2/X3 expressions. Zero when both terms vanish.
inline double closed_form_conditioning(const BlockConstants& k) {
  const double a = k.c2 * k.c2 * k.a_nm;
  const double b = k.c1 * k.c1;
  const double scale = a + b;
  return scale > 0.0 ? std::abs(a - b) / scale : 0.0;
}

// Closed form for the |e1, e2> initial state, time t in the same units as the
// couplings. X1 and X4 come straight from the two Rabi branches. X2 and X3
// are built from the symmetric (X2 + X3) and antisymmetric (X2 - X3)
// combinations, which each oscillate on one branch only.
inline BlockCoefficients closed_form_coefficients(const BlockConstants& k, double t) {
  const double half_c2t = 0.5 * k.c2 * t;
  const complex up = std::polar(1.0, half_c2t);     // e^{+i c2 t / 2}
  const complex down = std::polar(1.0, -half_c2t);  // e^{-i c2 t / 2}
  const double cos_m = std::cos(t * k.omega_minus);
  const double cos_p = std::cos(t * k.omega_plus);
  const double sinc_m = sinc(t * k.omega_minus);
  const double sinc_p = sinc(t * k.omega_plus);
  const complex i{0.0, 1.0};

  // (c2 / 2 Omega) sin(t Omega) == (c2 t / 2) sinc(t Omega)
  const complex minus_branch = up * (cos_m - i * half_c2t * sinc_m);
  const complex plus_branch = down * (cos_p + i * half_c2t * sinc_p);

  BlockCoefficients x;
  x.x1 = 0.5 * (minus_branch + plus_branch);
  x.x4 = 0.5 * (plus_branch - minus_branch);

  const complex sym = -i * t * (k.rate1 + k.rate2) * down * sinc_p;
  const complex anti = -i * t * (k.rate2 - k.rate1) * up * sinc_m;
  x.x2 = 0.5 * (sym + anti);
  x.x3 = 0.5 * (sym - anti);
  return x;
}

// Analytic engine with diagnostics. On the degenerate manifold
// c2^2 A = c1^2 (and wherever c2 = 0) X2/X3 are taken from the spectral
// engine and used_fallback is set. Constants are computed once per block.
class ClosedFormEvaluator {
 public:
  ClosedFormEvaluator(const CouplerParams& params, BlockIndex idx)
      : constants_(block_constants(params, idx)),
        conditioning_(closed_form_conditioning(constants_)),
        fallback_(conditioning_ < kClosedFormFallbackThreshold || constants_.c2 == 0.0) {
    if (fallback_) spectral_.emplace(params, idx);
  }

  const BlockConstants& constants() const { return constants_; }
  bool uses_fallback() const { return fallback_; }

  EngineReport evaluate(double t) const {
    EngineReport r{closed_form_coefficients(constants_, t), conditioning_, fallback_};
    if (fallback_) {
      const BlockCoefficients s = spectral_->evolve(t);
      r.coefficients.x2 = s.x2;
      r.coefficients.x3 = s.x3;
    }
    return r;
  }

 private:
  BlockConstants constants_;
  double conditioning_;
  bool fallback_;
  std::optional<SpectralPropagator> spectral_;
};

inline EngineReport evolve_block_closed(const CouplerParams& params, BlockIndex idx, double t) {
  return ClosedFormEvaluator(params, idx).evaluate(t);
}

// Evanescent-only coupler (lambda1 = lambda2 = 0) started in |e1, g2>:
// amplitudes on |e1, g2, n, m+1> and |g1, e2, n+1, m>. T = lambda3 t.
inline std::pair<complex, complex> two_mode_jcm_coefficients(BlockIndex idx, double T) {
  const double theta =
      T * std::sqrt((static_cast<double>(idx.n) + 1.0) * (static_cast<double>(idx.m) + 1.0));
  return {complex{std::cos(theta), 0.0}, complex{0.0, -std::sin(theta)}};
}

// Common phase of both branches for the symmetric Bell input, T = lambda3 t.
inline complex bell_state_coefficients(BlockIndex idx, double T) {
  const double theta =
      T * std::sqrt((static_cast<double>(idx.n) + 1.0) * (static_cast<double>(idx.m) + 1.0));
  return std::polar(1.0, -theta);
}

}  // namespace aqc
