#pragma once

// Independent verification machinery: an adaptive Dormand-Prince 5(4)
// integrator for the block equations, assembly of the full truncated state
// vector, and brute-force expectation values over that state.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "aqc/closed_form.hpp"
#include "aqc/core.hpp"

namespace aqc {

enum class Engine { closed, spectral, rk };

inline std::string_view to_string(Engine e) {
  switch (e) {
    case Engine::closed: return "closed";
    case Engine::spectral: return "spectral";
    case Engine::rk: return "rk";
  }
  return "?";
}

struct IntegratorConfig {
  double rel_tol = 1e-11;
  double abs_tol = 1e-11;
  double max_step = 0.0;  // <= 0 selects 0.1 / (1 + omega_plus) per block

  void validate() const {
    if (!(rel_tol > 0.0 && rel_tol <= 1e-2) || !(abs_tol > 0.0 && abs_tol <= 1e-2)) {
      throw InvalidArgument("integrator tolerances must lie in (0, 1e-2]");
    }
    if (!std::isfinite(max_step)) throw InvalidArgument("max_step must be finite");
  }
};

// Dormand-Prince 5(4) stepping of i dX/dt = M X for one block. The
// integrator can be advanced repeatedly, which lets a sweep walk one
// trajectory through an ordered time grid.
class BlockIntegrator {
 public:
  BlockIntegrator(const CouplerParams& params, BlockIndex idx, const IntegratorConfig& cfg,
                  const BlockCoefficients& initial = {})
      : cfg_(cfg), idx_(idx) {
    cfg.validate();
    const BlockConstants k = block_constants(params, idx);
    a_ = k.rate1;
    b_ = k.rate2;
    c2_ = k.c2;
    max_step_ = cfg.max_step > 0.0 ? cfg.max_step : 0.1 / (1.0 + k.omega_plus);
    step_ = max_step_;
    for (std::size_t j = 0; j < 4; ++j) y_[j] = initial[j];
    k1_ = derivative(y_);
  }

  double time() const { return t_; }
  std::size_t steps() const { return accepted_; }

  BlockCoefficients state() const { return {y_[0], y_[1], y_[2], y_[3]}; }

  BlockCoefficients advance_to(double target) {
    if (!std::isfinite(target)) throw InvalidArgument("integration target time must be finite");
    const double dir = target >= t_ ? 1.0 : -1.0;
    while (t_ != target) {
      const double remaining = std::abs(target - t_);
      double h = std::min({step_, max_step_, remaining});
      if (h < 1e-14 * std::max(1.0, std::abs(t_))) {
        std::ostringstream os;
        os << "step size underflow at t=" << t_ << " in block (n=" << idx_.n << ", m=" << idx_.m
           << ")";
        throw StiffnessError(os.str());
      }
      const bool last = h == remaining;
      const double err = try_step(dir * h);
      if (err <= 1.0) {
        t_ = last ? target : t_ + dir * h;
        y_ = y_new_;
        k1_ = k7_;
        ++accepted_;
      }
      const double factor =
          err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
      step_ = std::min(max_step_, h * factor);
    }
    return state();
  }

 private:
  using Vec = std::array<complex, 4>;

  // -i M y with the block's five couplings written out.
  Vec derivative(const Vec& y) const {
    const complex s0 = b_ * y[1] + a_ * y[2];
    const complex s1 = b_ * y[0] + c2_ * y[2] + a_ * y[3];
    const complex s2 = a_ * y[0] + c2_ * y[1] + b_ * y[3];
    const complex s3 = a_ * y[1] + b_ * y[2];
    return {complex{s0.imag(), -s0.real()}, complex{s1.imag(), -s1.real()},
            complex{s2.imag(), -s2.real()}, complex{s3.imag(), -s3.real()}};
  }

  // Returns the scaled error norm; fills y_new_ and k7_.
  double try_step(double h) {
    const Vec& k1 = k1_;
    Vec y;
    for (std::size_t j = 0; j < 4; ++j) y[j] = y_[j] + h * (1.0 / 5.0) * k1[j];
    const Vec k2 = derivative(y);
    for (std::size_t j = 0; j < 4; ++j) y[j] = y_[j] + h * (3.0 / 40.0 * k1[j] + 9.0 / 40.0 * k2[j]);
    const Vec k3 = derivative(y);
    for (std::size_t j = 0; j < 4; ++j) {
      y[j] = y_[j] + h * (44.0 / 45.0 * k1[j] - 56.0 / 15.0 * k2[j] + 32.0 / 9.0 * k3[j]);
    }
    const Vec k4 = derivative(y);
    for (std::size_t j = 0; j < 4; ++j) {
      y[j] = y_[j] + h * (19372.0 / 6561.0 * k1[j] - 25360.0 / 2187.0 * k2[j] +
                          64448.0 / 6561.0 * k3[j] - 212.0 / 729.0 * k4[j]);
    }
    const Vec k5 = derivative(y);
    for (std::size_t j = 0; j < 4; ++j) {
      y[j] = y_[j] + h * (9017.0 / 3168.0 * k1[j] - 355.0 / 33.0 * k2[j] +
                          46732.0 / 5247.0 * k3[j] + 49.0 / 176.0 * k4[j] -
                          5103.0 / 18656.0 * k5[j]);
    }
    const Vec k6 = derivative(y);
    for (std::size_t j = 0; j < 4; ++j) {
      y_new_[j] = y_[j] + h * (35.0 / 384.0 * k1[j] + 500.0 / 1113.0 * k3[j] +
                               125.0 / 192.0 * k4[j] - 2187.0 / 6784.0 * k5[j] +
                               11.0 / 84.0 * k6[j]);
    }
    k7_ = derivative(y_new_);

    constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                     e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
    double worst = 0.0;
    for (std::size_t j = 0; j < 4; ++j) {
      const complex e =
          h * (e1 * k1[j] + e3 * k3[j] + e4 * k4[j] + e5 * k5[j] + e6 * k6[j] + e7 * k7_[j]);
      const double scale =
          cfg_.abs_tol + cfg_.rel_tol * std::sqrt(std::max(std::norm(y_[j]), std::norm(y_new_[j])));
      worst = std::max(worst, std::sqrt(std::norm(e)) / scale);
    }
    return worst;
  }

  IntegratorConfig cfg_;
  BlockIndex idx_;
  double a_ = 0.0;
  double b_ = 0.0;
  double c2_ = 0.0;
  double max_step_ = 0.0;
  double step_ = 0.0;
  double t_ = 0.0;
  std::size_t accepted_ = 0;
  Vec y_{};
  Vec y_new_{};
  Vec k1_{};
  Vec k7_{};
};

inline BlockCoefficients integrate_block(const CouplerParams& params, BlockIndex idx, double t,
                                         const IntegratorConfig& cfg = {},
                                         const BlockCoefficients& initial = {}) {
  BlockIntegrator integrator(params, idx, cfg, initial);
  return integrator.advance_to(t);
}

struct EngineComparison {
  double closed_vs_spectral = 0.0;
  double spectral_vs_rk = 0.0;
  double closed_vs_rk = 0.0;
  double max_deviation = 0.0;
  double at_time = 0.0;
  bool closed_used_fallback = false;
};

inline EngineComparison compare_engines(const CouplerParams& params, BlockIndex idx,
                                        const std::vector<double>& times,
                                        const IntegratorConfig& cfg = {}) {
  if (times.empty()) throw InvalidArgument("compare_engines needs at least one time");
  const SpectralPropagator spectral(params, idx);
  EngineComparison out;
  for (const double t : times) {
    const EngineReport closed = evolve_block_closed(params, idx, t);
    const BlockCoefficients s = spectral.evolve(t);
    const BlockCoefficients r = integrate_block(params, idx, t, cfg);
    const double cs = max_abs_difference(closed.coefficients, s);
    const double sr = max_abs_difference(s, r);
    const double cr = max_abs_difference(closed.coefficients, r);
    out.closed_vs_spectral = std::max(out.closed_vs_spectral, cs);
    out.spectral_vs_rk = std::max(out.spectral_vs_rk, sr);
    out.closed_vs_rk = std::max(out.closed_vs_rk, cr);
    out.closed_used_fallback = out.closed_used_fallback || closed.used_fallback;
    const double worst = std::max({cs, sr, cr});
    if (worst > out.max_deviation) {
      out.max_deviation = worst;
      out.at_time = t;
    }
  }
  return out;
}

// --- full state -----------------------------------------------------------

enum class Level : char { ground = 'g', excited = 'e' };

struct BasisLabel {
  Level atom1 = Level::excited;
  Level atom2 = Level::excited;
  std::size_t photons1 = 0;
  std::size_t photons2 = 0;

  friend auto operator<=>(const BasisLabel&, const BasisLabel&) = default;
};

struct JointState {
  std::map<BasisLabel, complex> entries;
  double norm_deficit = 0.0;

  complex amplitude(const BasisLabel& label) const {
    const auto it = entries.find(label);
    return it == entries.end() ? complex{} : it->second;
  }
  double norm_squared() const {
    CompensatedSum s;
    for (const auto& [label, a] : entries) s += std::norm(a);
    return s.value();
  }
};

// Atomic preparations other than |e1, e2> are only solved on the
// evanescent-only device.
inline void require_supported(AtomicPreparation atoms, const CouplerParams& params) {
  if (atoms != AtomicPreparation::excited_excited &&
      (params.lambda1() != 0.0 || params.lambda2() != 0.0)) {
    std::ostringstream os;
    os << "atomic preparation '" << to_string(atoms)
       << "' is only supported with lambda1 = lambda2 = 0";
    throw UnsupportedPreparation(os.str());
  }
}

// Block amplitudes for any supported preparation, via the requested engine.
inline BlockCoefficients block_coefficients(const CouplerParams& params, BlockIndex idx, double t,
                                            AtomicPreparation atoms, Engine engine,
                                            const IntegratorConfig& cfg = {}) {
  require_supported(atoms, params);
  switch (engine) {
    case Engine::spectral:
      return evolve_block_spectral(params, idx, t, initial_block_vector(atoms));
    case Engine::rk:
      return integrate_block(params, idx, t, cfg, initial_block_vector(atoms));
    case Engine::closed:
      break;
  }
  const double T = params.lambda3() * t;
  switch (atoms) {
    case AtomicPreparation::excited_excited:
      return evolve_block_closed(params, idx, t).coefficients;
    case AtomicPreparation::excited_ground: {
      const auto [stay, hop] = two_mode_jcm_coefficients(idx, T);
      return {0.0, stay, hop, 0.0};
    }
    case AtomicPreparation::ground_excited: {
      // Mirror image of the excited-ground case with the waveguides swapped.
      const auto [stay, hop] = two_mode_jcm_coefficients({idx.m, idx.n}, T);
      return {0.0, hop, stay, 0.0};
    }
    case AtomicPreparation::bell_plus: {
      const complex phase = bell_state_coefficients(idx, T) / std::sqrt(2.0);
      return {0.0, phase, phase, 0.0};
    }
  }
  return {};
}

// Full truncated wavefunction at time t. Field weights C_n C_m multiply the
// four block states (n, m), (n, m+1), (n+1, m), (n+1, m+1) of each block.
inline JointState assemble_state(const FieldPreparation& field, AtomicPreparation atoms,
                                 const CouplerParams& params, double t, Engine engine,
                                 const IntegratorConfig& cfg = {}) {
  require_supported(atoms, params);
  JointState state;
  for (std::size_t n = 0; n <= field.mode1.n_max(); ++n) {
    for (std::size_t m = 0; m <= field.mode2.n_max(); ++m) {
      const BlockIndex idx{n, m};
      const complex w = field.weight(idx);
      if (w == complex{}) continue;
      const BlockCoefficients x = block_coefficients(params, idx, t, atoms, engine, cfg);
      const BasisLabel labels[4] = {{Level::excited, Level::excited, n, m},
                                    {Level::excited, Level::ground, n, m + 1},
                                    {Level::ground, Level::excited, n + 1, m},
                                    {Level::ground, Level::ground, n + 1, m + 1}};
      for (std::size_t j = 0; j < 4; ++j) {
        const complex a = w * x[j];
        if (a != complex{}) state.entries[labels[j]] += a;
      }
    }
  }
  state.norm_deficit = std::max(0.0, 1.0 - state.norm_squared());
  return state;
}

// Expectation values obtained by direct summation over basis labels.
struct StateMoments {
  double norm = 0.0;
  double sz1 = 0.0;
  double sz2 = 0.0;
  double n1 = 0.0;
  double n2 = 0.0;
  double pairs1 = 0.0;  // <a1^+2 a1^2>
  double pairs2 = 0.0;
};

inline StateMoments state_moments(const JointState& state) {
  CompensatedSum norm, sz1, sz2, n1, n2, f1, f2;
  for (const auto& [label, a] : state.entries) {
    const double p = std::norm(a);
    const double k1 = static_cast<double>(label.photons1);
    const double k2 = static_cast<double>(label.photons2);
    norm += p;
    sz1 += label.atom1 == Level::excited ? p : -p;
    sz2 += label.atom2 == Level::excited ? p : -p;
    n1 += k1 * p;
    n2 += k2 * p;
    f1 += k1 * (k1 - 1.0) * p;
    f2 += k2 * (k2 - 1.0) * p;
  }
  return {norm.value(), sz1.value(), sz2.value(), n1.value(), n2.value(), f1.value(), f2.value()};
}

// Diagonal of the mode-2 reduced density matrix, indexed by photon number.
inline std::vector<double> mode2_populations(const JointState& state) {
  std::vector<double> pop;
  for (const auto& [label, a] : state.entries) {
    if (label.photons2 >= pop.size()) pop.resize(label.photons2 + 1, 0.0);
    pop[label.photons2] += std::norm(a);
  }
  return pop;
}

}  // namespace aqc
