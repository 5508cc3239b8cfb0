#pragma once

// Built-in suite of limiting cases with known answers.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "aqc/closed_form.hpp"
#include "aqc/csv.hpp"
#include "aqc/observables.hpp"
#include "aqc/oracle.hpp"

namespace aqc {

struct LimitCase {
  std::string name;
  bool passed = false;
  std::string summary;
};

// Upper bound on |alpha|^2 minus the truncated mean photon number of a
// coherent mode. The discarded mean is |alpha|^2 P(N >= n_max), and the
// truncated mean plus one bounds |alpha|^2.
inline double coherent_mean_deficit_bound(const ModeField& f) {
  const double last = std::norm(f.amplitudes.back());
  return (f.mean_photons() + 1.0) * (f.tail_bound + last);
}

// Bound on |alpha|^2 + |beta|^2 + 1 minus the initial excitation of a truncated
// coherent pair. Each mode's mean is scaled by the other mode's retained mass.
inline double excitation_offset_bound(const FieldPreparation& f) {
  const double intensity = f.mode1.mean_photons() + f.mode2.mean_photons() + 3.0;
  return coherent_mean_deficit_bound(f.mode1) + coherent_mean_deficit_bound(f.mode2) +
         intensity * f.tail_bound() + 1e-12;
}

namespace detail {

inline std::vector<double> uniform_grid(double tmax, std::size_t samples) {
  std::vector<double> t(samples);
  for (std::size_t i = 0; i < samples; ++i) {
    t[i] = tmax * static_cast<double>(i) / static_cast<double>(samples - 1);
  }
  return t;
}

inline std::string metric(std::string_view label, double value) {
  return std::string(label) + "=" + format_number(value, 4);
}

inline LimitCase bounded(std::string name, std::string_view label, double value, double tol) {
  return {std::move(name), value < tol, metric(label, value) + " (tol " + format_number(tol, 4) + ")"};
}

}  // namespace detail

inline LimitCase limit_jcm() {
  const CouplerParams p(1.0, 0.0, 0.0);
  double worst = 0.0;
  for (std::size_t n = 0; n <= 30; n += 3) {
    for (double t = 0.0; t <= 20.0; t += 0.37) {
      const double w = t * std::sqrt(static_cast<double>(n) + 1.0);
      for (Engine e : {Engine::closed, Engine::spectral}) {
        const BlockCoefficients x = block_coefficients(p, {n, 2}, t, AtomicPreparation::excited_excited, e);
        worst = std::max({worst, std::abs(x.x1 - std::cos(w)),
                          std::abs(x.x3 - complex(0.0, -std::sin(w))), std::abs(x.x2), std::abs(x.x4)});
      }
    }
  }
  return detail::bounded("jcm", "max_dev", worst, 1e-10);
}

inline LimitCase limit_decoupled_jcm() {
  const CouplerParams p(1.3, 0.7, 0.0);
  double worst = 0.0;
  for (std::size_t n = 0; n <= 20; n += 4) {
    for (std::size_t m = 0; m <= 20; m += 5) {
      for (double t = 0.0; t <= 20.0; t += 0.53) {
        const double w1 = p.lambda1() * t * std::sqrt(static_cast<double>(n) + 1.0);
        const double w2 = p.lambda2() * t * std::sqrt(static_cast<double>(m) + 1.0);
        const BlockCoefficients x = evolve_block_spectral(p, {n, m}, t);
        worst = std::max({worst, std::abs(x.x1 - std::cos(w1) * std::cos(w2)),
                          std::abs(x.x4 + std::sin(w1) * std::sin(w2))});
      }
    }
  }
  return detail::bounded("decoupled-jcm", "max_dev", worst, 1e-9);
}

// Deep truncation so the retained mass does not mask the unit inversions.
inline LimitCase limit_dark_state() {
  const FieldPreparation f{coherent_field(2.0, 1e-15), coherent_field(2.0, 1e-15)};
  const auto series = sweep_observables(f, AtomicPreparation::excited_excited, {0.0, 0.0, 1.0},
                                        detail::uniform_grid(50.0, 201));
  double worst = 0.0;
  for (const auto& s : series) {
    worst = std::max({worst, std::abs(s.sz1 - 1.0), std::abs(s.sz2 - 1.0)});
  }
  return detail::bounded("dark-state", "max|sz-1|", worst, 1e-10);
}

inline LimitCase limit_two_mode_jcm() {
  const CouplerParams p(0.0, 0.0, 1.0);
  double worst = 0.0;
  for (std::size_t n = 0; n <= 20; n += 4) {
    for (std::size_t m = 0; m <= 20; m += 5) {
      for (double t = 0.0; t <= 20.0; t += 0.61) {
        const auto [stay, hop] = two_mode_jcm_coefficients({n, m}, t);
        const BlockCoefficients x =
            block_coefficients(p, {n, m}, t, AtomicPreparation::excited_ground, Engine::spectral);
        worst = std::max({worst, std::abs(x.x2 - stay), std::abs(x.x3 - hop), std::abs(x.x1),
                          std::abs(x.x4)});
      }
    }
  }
  return detail::bounded("two-mode-jcm", "max_dev", worst, 1e-10);
}

inline LimitCase limit_bell_trapping() {
  const FieldPreparation f{coherent_field(2.0), coherent_field(1.5)};
  const auto series = sweep_observables(f, AtomicPreparation::bell_plus, {0.0, 0.0, 1.0},
                                        detail::uniform_grid(50.0, 201));
  double worst = 0.0;
  for (const auto& s : series) worst = std::max({worst, std::abs(s.sz1), std::abs(s.sz2)});
  return detail::bounded("bell-trapping", "max|sz|", worst, 1e-10);
}

// With beta = 0 mode 1 never drops below its initial intensity, while the
// linear coupler empties it at T = pi/2.
inline LimitCase limit_linear_coupler_contrast() {
  const double alpha = 2.0;
  const FieldPreparation f{coherent_field(alpha), vacuum_field()};
  const auto series = sweep_observables(f, AtomicPreparation::excited_excited, {1.0, 1.0, 0.6},
                                        detail::uniform_grid(50.0, 501));
  double min_n1 = series.front().n1;
  for (const auto& s : series) min_n1 = std::min(min_n1, s.n1);
  const double intensity = alpha * alpha;
  const double floor = intensity - coherent_mean_deficit_bound(f.mode1) - 1e-12;
  const double baseline = linear_coupler_baseline(alpha, std::numbers::pi / 2).n1;
  const bool ok = min_n1 >= series.front().n1 - 1e-12 && min_n1 >= floor && baseline < 1e-12;
  return {"linear-coupler-contrast", ok,
          detail::metric("min_n1", min_n1) + " |alpha|^2=" + format_number(intensity, 4) +
              " " + detail::metric("baseline_min_n1", baseline)};
}

inline LimitCase limit_excitation_conservation() {
  const FieldPreparation f{coherent_field(2.0), coherent_field(1.5)};
  const auto series = sweep_observables(f, AtomicPreparation::excited_excited, {1.0, 2.0, 3.0},
                                        detail::uniform_grid(50.0, 201));
  double drift = 0.0;
  for (const auto& s : series) drift = std::max(drift, std::abs(s.excitation - series.front().excitation));
  const double expected = 4.0 + 2.25 + 1.0;
  const double offset = std::abs(series.front().excitation - expected);
  const double slack = excitation_offset_bound(f);
  return {"excitation-conservation", drift < 1e-9 && offset <= slack,
          detail::metric("max_drift", drift) + " " + detail::metric("offset_at_0", offset) +
              " (tol 1e-09, " + format_number(slack, 4) + ")"};
}

inline std::vector<LimitCase> run_limit_suite() {
  return {limit_jcm(),           limit_decoupled_jcm(), limit_dark_state(),
          limit_two_mode_jcm(),  limit_bell_trapping(), limit_linear_coupler_contrast(),
          limit_excitation_conservation()};
}

}  // namespace aqc
