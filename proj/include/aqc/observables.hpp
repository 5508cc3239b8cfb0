#pragma once

// Measured quantities: atomic inversions, photon-number moments, g2, the
// mode-2 reduced density matrix, conservation diagnostics, the linear
// coupler reference and revival detection. All double sums run over blocks
// in lexicographic (n, m) order with compensated summation.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <exception>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "aqc/closed_form.hpp"
#include "aqc/core.hpp"
#include "aqc/oracle.hpp"

namespace aqc {

inline constexpr double kVanishingIntensity = 1e-12;

// Dimensionless time T = scale * t. The scale is lambda1, or lambda3 when
// lambda1 = 0, or lambda2 when both vanish.
struct TimeConvention {
  double scale = 1.0;
  std::string_view name = "lambda1";
};

inline TimeConvention time_convention(const CouplerParams& params) {
  if (params.lambda1() > 0.0) return {params.lambda1(), "lambda1"};
  if (params.lambda3() > 0.0) return {params.lambda3(), "lambda3"};
  return {params.lambda2(), "lambda2"};
}

struct ObservableSample {
  double t_dimensionless = 0.0;
  double sz1 = 0.0;
  double sz2 = 0.0;
  double sz_total = 0.0;
  double n1 = 0.0;
  double n2 = 0.0;
  double g2_1 = std::numeric_limits<double>::quiet_NaN();  // NaN: empty mode
  double g2_2 = std::numeric_limits<double>::quiet_NaN();
  double norm = 0.0;
  double excitation = 0.0;
};

struct Inversions {
  double sz1 = 0.0;
  double sz2 = 0.0;
  double sz_total = 0.0;
};

struct PhotonNumbers {
  double n1 = 0.0;
  double n2 = 0.0;
};

struct Mode2Density {
  double p0 = 0.0;
  double p1 = 0.0;
};

inline double g2_from_moments(double pairs, double mean) {
  if (!(mean > kVanishingIntensity)) return std::numeric_limits<double>::quiet_NaN();
  return pairs / (mean * mean) - 1.0;
}

// Accumulates the per-block contributions of one sample time for the
// |e1, e2> preparation.
class BlockSums {
 public:
  void add(double weight, BlockIndex idx, const BlockCoefficients& x) {
    const double p1 = std::norm(x.x1), p2 = std::norm(x.x2), p3 = std::norm(x.x3),
                 p4 = std::norm(x.x4);
    const double n = static_cast<double>(idx.n);
    const double m = static_cast<double>(idx.m);
    sz1_ += weight * (p1 + p2 - p3 - p4);
    sz2_ += weight * (p1 - p2 + p3 - p4);
    szt_ += weight * (p1 - p4);
    n1_ += weight * (n * (p1 + p2) + (n + 1.0) * (p3 + p4));
    n2_ += weight * (m * (p1 + p3) + (m + 1.0) * (p2 + p4));
    f1_ += weight * (n * (n - 1.0) * (p1 + p2) + (n + 1.0) * n * (p3 + p4));
    f2_ += weight * (m * (m - 1.0) * (p1 + p3) + (m + 1.0) * m * (p2 + p4));
    norm_ += weight * (p1 + p2 + p3 + p4);
  }

  Inversions inversions() const { return {sz1_.value(), sz2_.value(), szt_.value()}; }
  PhotonNumbers photons() const { return {n1_.value(), n2_.value()}; }
  double pairs1() const { return f1_.value(); }
  double pairs2() const { return f2_.value(); }
  double norm() const { return norm_.value(); }

  ObservableSample sample(double T) const {
    ObservableSample s;
    s.t_dimensionless = T;
    s.sz1 = sz1_.value();
    s.sz2 = sz2_.value();
    s.sz_total = szt_.value();
    s.n1 = n1_.value();
    s.n2 = n2_.value();
    s.g2_1 = g2_from_moments(f1_.value(), s.n1);
    s.g2_2 = g2_from_moments(f2_.value(), s.n2);
    s.norm = norm_.value();
    s.excitation = s.n1 + s.n2 + 0.5 * (s.sz1 + s.sz2);
    return s;
  }

 private:
  CompensatedSum sz1_, sz2_, szt_, n1_, n2_, f1_, f2_, norm_;
};

namespace detail {

inline BlockSums block_sums(const FieldPreparation& field, const CouplerParams& params, double t,
                            Engine engine, const IntegratorConfig& cfg) {
  BlockSums sums;
  for (std::size_t n = 0; n <= field.mode1.n_max(); ++n) {
    for (std::size_t m = 0; m <= field.mode2.n_max(); ++m) {
      const BlockIndex idx{n, m};
      const double w = std::norm(field.weight(idx));
      if (w == 0.0) continue;
      sums.add(w, idx,
               block_coefficients(params, idx, t, AtomicPreparation::excited_excited, engine, cfg));
    }
  }
  return sums;
}

}  // namespace detail

inline Inversions atomic_inversions(const FieldPreparation& field, const CouplerParams& params,
                                    double t, Engine engine = Engine::spectral,
                                    const IntegratorConfig& cfg = {}) {
  return detail::block_sums(field, params, t, engine, cfg).inversions();
}

inline PhotonNumbers mean_photon_numbers(const FieldPreparation& field,
                                         const CouplerParams& params, double t,
                                         Engine engine = Engine::spectral,
                                         const IntegratorConfig& cfg = {}) {
  return detail::block_sums(field, params, t, engine, cfg).photons();
}

// g2_j = <a^+2 a^2> / <a^+ a>^2 - 1 for mode 1 or 2.
inline double second_order_correlation(const FieldPreparation& field, const CouplerParams& params,
                                       double t, int mode, Engine engine = Engine::spectral,
                                       const IntegratorConfig& cfg = {}) {
  if (mode != 1 && mode != 2) throw InvalidArgument("mode must be 1 or 2");
  const BlockSums sums = detail::block_sums(field, params, t, engine, cfg);
  const double mean = mode == 1 ? sums.photons().n1 : sums.photons().n2;
  if (!(mean > kVanishingIntensity)) {
    std::ostringstream os;
    os << "mode " << mode << " has vanishing mean photon number " << mean << " at t=" << t;
    throw VanishingIntensity(os.str());
  }
  return g2_from_moments(mode == 1 ? sums.pairs1() : sums.pairs2(), mean);
}

inline double total_excitation(const FieldPreparation& field, const CouplerParams& params, double t,
                               Engine engine = Engine::spectral, const IntegratorConfig& cfg = {}) {
  return detail::block_sums(field, params, t, engine, cfg).sample(0.0).excitation;
}

// Mode-2 populations when mode 2 starts in vacuum and mode 1 carries only
// even photon numbers; mode 2 then holds at most one photon.
inline Mode2Density reduced_density_mode2(const FieldPreparation& field,
                                          const CouplerParams& params, double t,
                                          Engine engine = Engine::spectral,
                                          const IntegratorConfig& cfg = {}) {
  const auto& m2 = field.mode2.amplitudes;
  if (m2.size() != 1 || std::abs(std::norm(m2[0]) - 1.0) > 1e-12) {
    throw InvalidPreparation("reduced_density_mode2 requires mode 2 in vacuum");
  }
  const auto& m1 = field.mode1.amplitudes;
  for (std::size_t n = 1; n < m1.size(); n += 2) {
    if (m1[n] != complex{}) {
      throw InvalidPreparation("reduced_density_mode2 requires mode 1 with only even photon numbers");
    }
  }
  CompensatedSum p0, p1;
  for (std::size_t n = 0; n < m1.size(); n += 2) {
    const double w = std::norm(m1[n]) * std::norm(m2[0]);
    if (w == 0.0) continue;
    const BlockCoefficients x =
        block_coefficients(params, {n, 0}, t, AtomicPreparation::excited_excited, engine, cfg);
    p0 += w * (std::norm(x.x1) + std::norm(x.x3));
    p1 += w * (std::norm(x.x2) + std::norm(x.x4));
  }
  return {p0.value(), p1.value()};
}

// Conventional two-waveguide coupler with input |alpha, 0>, T = lambda t.
inline PhotonNumbers linear_coupler_baseline(complex alpha, double T) {
  const double intensity = std::norm(alpha);
  const double c = std::cos(T);
  const double s = std::sin(T);
  return {intensity * c * c, intensity * s * s};
}

// Observables from an explicit state; works for every atomic preparation.
inline ObservableSample sample_from_state(const JointState& state, double T) {
  const StateMoments mo = state_moments(state);
  ObservableSample s;
  s.t_dimensionless = T;
  s.sz1 = mo.sz1;
  s.sz2 = mo.sz2;
  s.sz_total = 0.5 * (mo.sz1 + mo.sz2);
  s.n1 = mo.n1;
  s.n2 = mo.n2;
  s.g2_1 = g2_from_moments(mo.pairs1, mo.n1);
  s.g2_2 = g2_from_moments(mo.pairs2, mo.n2);
  s.norm = mo.norm;
  s.excitation = s.n1 + s.n2 + 0.5 * (s.sz1 + s.sz2);
  return s;
}

struct SweepOptions {
  Engine engine = Engine::spectral;
  IntegratorConfig integrator{};
  unsigned threads = 1;
};

namespace detail {

// Samples [begin, end) of `times` for the |e1, e2> preparation. Each block
// is set up once; the RK engine walks every grid point from the origin so
// its trajectory does not depend on where the chunk starts.
inline void sweep_chunk_formula(const FieldPreparation& field, const CouplerParams& params,
                                const std::vector<double>& times, std::size_t begin,
                                std::size_t end, const SweepOptions& opt, double scale,
                                std::vector<ObservableSample>& out) {
  std::vector<BlockSums> sums(end - begin);
  const bool rk_walk =
      opt.engine == Engine::rk && std::is_sorted(times.begin(), times.end()) &&
      (times.empty() || times.front() >= 0.0);
  for (std::size_t n = 0; n <= field.mode1.n_max(); ++n) {
    for (std::size_t m = 0; m <= field.mode2.n_max(); ++m) {
      const BlockIndex idx{n, m};
      const double w = std::norm(field.weight(idx));
      if (w == 0.0) continue;
      switch (opt.engine) {
        case Engine::spectral: {
          const SpectralPropagator prop(params, idx);
          for (std::size_t i = begin; i < end; ++i) sums[i - begin].add(w, idx, prop.evolve(times[i]));
          break;
        }
        case Engine::closed: {
          const ClosedFormEvaluator eval(params, idx);
          for (std::size_t i = begin; i < end; ++i) {
            sums[i - begin].add(w, idx, eval.evaluate(times[i]).coefficients);
          }
          break;
        }
        case Engine::rk: {
          if (rk_walk) {
            BlockIntegrator integ(params, idx, opt.integrator);
            for (std::size_t i = 0; i < end; ++i) {
              const BlockCoefficients x = integ.advance_to(times[i]);
              if (i >= begin) sums[i - begin].add(w, idx, x);
            }
          } else {
            for (std::size_t i = begin; i < end; ++i) {
              sums[i - begin].add(w, idx, integrate_block(params, idx, times[i], opt.integrator));
            }
          }
          break;
        }
      }
    }
  }
  for (std::size_t i = begin; i < end; ++i) out[i] = sums[i - begin].sample(scale * times[i]);
}

}  // namespace detail

// Observable time series at physical times `times`. Output is bit-identical
// for any thread count: every sample sums its blocks in the same order.
inline std::vector<ObservableSample> sweep_observables(const FieldPreparation& field,
                                                       AtomicPreparation atoms,
                                                       const CouplerParams& params,
                                                       const std::vector<double>& times,
                                                       const SweepOptions& opt = {}) {
  require_supported(atoms, params);
  opt.integrator.validate();
  std::vector<ObservableSample> out(times.size());
  const double scale = time_convention(params).scale;
  const std::size_t workers =
      std::max<std::size_t>(1, std::min<std::size_t>(opt.threads, times.size()));

  auto run = [&](std::size_t begin, std::size_t end) {
    if (atoms == AtomicPreparation::excited_excited) {
      detail::sweep_chunk_formula(field, params, times, begin, end, opt, scale, out);
    } else {
      for (std::size_t i = begin; i < end; ++i) {
        out[i] = sample_from_state(
            assemble_state(field, atoms, params, times[i], opt.engine, opt.integrator),
            scale * times[i]);
      }
    }
  };

  if (workers == 1) {
    run(0, times.size());
    return out;
  }
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> pool;
    const std::size_t per = (times.size() + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
      const std::size_t begin = std::min(times.size(), w * per);
      const std::size_t end = std::min(times.size(), begin + per);
      pool.emplace_back([&, w, begin, end] {
        try {
          run(begin, end);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

enum class InversionKind { sz1, sz2, sz_total };

// First revival after the initial collapse. A window of width 2 pi slides
// one sample at a time; once its standard deviation has dropped below 25%
// of the initial window's, the first excursion back above 50% marks the
// revival and the window centre with the largest deviation inside that
// excursion is returned.
inline std::optional<double> revival_time_estimate(const std::vector<ObservableSample>& series,
                                                   InversionKind which) {
  if (series.size() < 2) throw TooSparseSeries("revival detection needs at least two samples");
  const double dt = series[1].t_dimensionless - series[0].t_dimensionless;
  if (!(dt > 0.0) || 1.0 / dt < 20.0 * (1.0 - 1e-9)) {
    throw TooSparseSeries("revival detection needs at least 20 samples per unit T");
  }
  for (std::size_t i = 1; i < series.size(); ++i) {
    const double step = series[i].t_dimensionless - series[i - 1].t_dimensionless;
    if (std::abs(step - dt) > 1e-6 * dt) {
      throw TooSparseSeries("revival detection needs uniformly spaced samples");
    }
  }

  std::vector<double> signal(series.size());
  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& s = series[i];
    signal[i] = which == InversionKind::sz1 ? s.sz1 : which == InversionKind::sz2 ? s.sz2 : s.sz_total;
  }
  const auto width = static_cast<std::size_t>(std::lround(2.0 * std::numbers::pi / dt)) + 1;
  if (width > signal.size()) return std::nullopt;

  auto window_std = [&](std::size_t start) {
    CompensatedSum sum, sq;
    for (std::size_t i = start; i < start + width; ++i) sum += signal[i];
    const double mean = sum.value() / static_cast<double>(width);
    for (std::size_t i = start; i < start + width; ++i) sq += (signal[i] - mean) * (signal[i] - mean);
    return std::sqrt(sq.value() / static_cast<double>(width));
  };

  const std::size_t windows = signal.size() - width + 1;
  const double initial = window_std(0);
  bool collapsed = false;
  std::optional<std::size_t> best;
  double best_std = 0.0;
  for (std::size_t w = 0; w < windows; ++w) {
    const double s = window_std(w);
    if (!collapsed) {
      collapsed = s < 0.25 * initial;
      continue;
    }
    if (s > 0.5 * initial) {
      if (!best || s > best_std) {
        best = w;
        best_std = s;
      }
    } else if (best) {
      break;
    }
  }
  if (!best) return std::nullopt;
  return series[*best + width / 2].t_dimensionless;
}

}  // namespace aqc
