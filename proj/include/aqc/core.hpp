#pragma once

// Domain types shared by every engine: coupling constants, the (n, m) block
// index with its derived frequencies, and truncated photon-number amplitude
// sequences for the two waveguide modes.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "aqc/error.hpp"

namespace aqc {

using complex = std::complex<double>;

inline constexpr double kDefaultTailTol = 1e-10;
inline constexpr std::size_t kTruncationCap = 4096;

// Neumaier's variant of Kahan summation. All double sums over blocks go
// through this in a fixed order so results are reproducible.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  CompensatedSum& operator+=(double x) {
    add(x);
    return *this;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

// The device: on-site atom-field couplings of the two waveguides and the
// evanescent cross coupling. Rates are in inverse time units.
class CouplerParams {
 public:
  CouplerParams(double lambda1, double lambda2, double lambda3)
      : lambda1_(lambda1), lambda2_(lambda2), lambda3_(lambda3) {
    const double v[3] = {lambda1, lambda2, lambda3};
    for (int i = 0; i < 3; ++i) {
      if (!std::isfinite(v[i]) || v[i] < 0.0) {
        std::ostringstream os;
        os << "lambda" << (i + 1) << " must be finite and non-negative, got " << v[i];
        throw InvalidArgument(os.str());
      }
    }
    if (lambda1 == 0.0 && lambda2 == 0.0 && lambda3 == 0.0) {
      throw InvalidArgument("at least one coupling constant must be non-zero");
    }
  }

  double lambda1() const { return lambda1_; }
  double lambda2() const { return lambda2_; }
  double lambda3() const { return lambda3_; }

  // The same device with the two waveguides exchanged.
  CouplerParams mirrored() const { return {lambda2_, lambda1_, lambda3_}; }

  friend bool operator==(const CouplerParams&, const CouplerParams&) = default;

 private:
  double lambda1_;
  double lambda2_;
  double lambda3_;
};

// Photon numbers (n, m) labelling one invariant four-dimensional subspace.
struct BlockIndex {
  std::size_t n = 0;
  std::size_t m = 0;

  friend auto operator<=>(const BlockIndex&, const BlockIndex&) = default;
};

struct BlockConstants {
  double rate1 = 0.0;  // lambda1 sqrt(n+1)
  double rate2 = 0.0;  // lambda2 sqrt(m+1)
  double a_nm = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
  double omega_plus = 0.0;
  double omega_minus = 0.0;
};

inline BlockConstants block_constants(const CouplerParams& params, BlockIndex idx) {
  const double sn = std::sqrt(static_cast<double>(idx.n) + 1.0);
  const double sm = std::sqrt(static_cast<double>(idx.m) + 1.0);
  BlockConstants k;
  k.rate1 = params.lambda1() * sn;
  k.rate2 = params.lambda2() * sm;
  k.a_nm = k.rate1 * k.rate1 + k.rate2 * k.rate2;
  k.c1 = 2.0 * k.rate1 * k.rate2;
  k.c2 = params.lambda3() * sn * sm;
  const double sum = k.rate1 + k.rate2;
  const double diff = k.rate1 - k.rate2;
  k.omega_plus = 0.5 * std::sqrt(k.c2 * k.c2 + 4.0 * sum * sum);
  k.omega_minus = 0.5 * std::sqrt(k.c2 * k.c2 + 4.0 * diff * diff);
  return k;
}

// Amplitudes of one block in the fixed basis order
// (|e1 e2, n, m>, |e1 g2, n, m+1>, |g1 e2, n+1, m>, |g1 g2, n+1, m+1>).
struct BlockCoefficients {
  complex x1{1.0, 0.0};
  complex x2{};
  complex x3{};
  complex x4{};

  double norm_squared() const {
    return std::norm(x1) + std::norm(x2) + std::norm(x3) + std::norm(x4);
  }
  complex& operator[](std::size_t j) {
    return j == 0 ? x1 : j == 1 ? x2 : j == 2 ? x3 : x4;
  }
  const complex& operator[](std::size_t j) const {
    return j == 0 ? x1 : j == 1 ? x2 : j == 2 ? x3 : x4;
  }
};

inline double max_abs_difference(const BlockCoefficients& a, const BlockCoefficients& b) {
  double d = 0.0;
  for (std::size_t j = 0; j < 4; ++j) d = std::max(d, std::abs(a[j] - b[j]));
  return d;
}

enum class FieldKind { coherent, even_coherent, vacuum, custom };

inline std::string_view to_string(FieldKind k) {
  switch (k) {
    case FieldKind::coherent: return "coherent";
    case FieldKind::even_coherent: return "even-coherent";
    case FieldKind::vacuum: return "vacuum";
    case FieldKind::custom: return "custom";
  }
  return "?";
}

enum class AtomicPreparation { excited_excited, excited_ground, ground_excited, bell_plus };

inline std::string_view to_string(AtomicPreparation a) {
  switch (a) {
    case AtomicPreparation::excited_excited: return "ee";
    case AtomicPreparation::excited_ground: return "eg";
    case AtomicPreparation::ground_excited: return "ge";
    case AtomicPreparation::bell_plus: return "bell";
  }
  return "?";
}

namespace detail {

inline void require_finite(complex alpha, std::string_view what) {
  if (!std::isfinite(alpha.real()) || !std::isfinite(alpha.imag())) {
    throw InvalidArgument(std::string(what) + " must be finite");
  }
}

// Upper bound on sum_{k > n} p_k for a Poisson distribution of the given
// mean. Uses the geometric majorant p_{k+1}/p_k = mean/(k+1) <= mean/(n+2),
// valid once n + 2 > mean; returns +inf before that.
inline double poisson_tail_bound(double mean, std::size_t n) {
  if (mean == 0.0) return 0.0;
  const double next = static_cast<double>(n) + 1.0;
  if (next + 1.0 <= mean) return std::numeric_limits<double>::infinity();
  const double log_p = -mean + next * std::log(mean) - std::lgamma(next + 1.0);
  return std::exp(log_p) / (1.0 - mean / (next + 1.0));
}

}  // namespace detail

// Smallest n_max whose discarded coherent-state mass is bounded below
// tail_tol, using the running geometric tail bound.
inline std::size_t auto_truncation(complex alpha, double tail_tol = kDefaultTailTol,
                                   std::size_t cap = kTruncationCap) {
  detail::require_finite(alpha, "alpha");
  if (!(tail_tol > 0.0 && tail_tol < 1.0)) {
    throw InvalidArgument("tail tolerance must lie in (0, 1)");
  }
  const double mean = std::norm(alpha);
  if (mean == 0.0) return 0;
  for (std::size_t n = 0; n <= cap; ++n) {
    if (detail::poisson_tail_bound(mean, n) < tail_tol) return n;
  }
  std::ostringstream os;
  os << "truncation overflow: |alpha| = " << std::abs(alpha) << " needs more than " << cap
     << " photon levels for tail tolerance " << tail_tol;
  throw TruncationOverflow(os.str());
}

// C_n = exp(-|alpha|^2/2) alpha^n / sqrt(n!) for n = 0..n_max, by the
// recurrence C_n = C_{n-1} alpha / sqrt(n). For very bright fields C_0
// underflows, so the same recurrence runs on log-magnitude and phase.
inline std::vector<complex> coherent_amplitudes(complex alpha, std::size_t n_max) {
  detail::require_finite(alpha, "alpha");
  std::vector<complex> c(n_max + 1);
  const double mean = std::norm(alpha);
  if (mean < 600.0) {
    c[0] = std::exp(-0.5 * mean);
    for (std::size_t n = 1; n <= n_max; ++n) {
      c[n] = c[n - 1] * alpha / std::sqrt(static_cast<double>(n));
    }
    return c;
  }
  const double log_r = std::log(std::abs(alpha));
  const double phase = std::arg(alpha);
  double log_mag = -0.5 * mean;
  for (std::size_t n = 0; n <= n_max; ++n) {
    if (n > 0) log_mag += log_r - 0.5 * std::log(static_cast<double>(n));
    c[n] = std::polar(std::exp(log_mag), phase * static_cast<double>(n));
  }
  return c;
}

// Even coherent state (|alpha> + |-alpha>) normalised, odd entries exactly
// zero, renormalised over the truncated support.
inline std::vector<complex> even_coherent_amplitudes(complex alpha, std::size_t n_max) {
  detail::require_finite(alpha, "alpha");
  std::vector<complex> c = coherent_amplitudes(alpha, n_max);
  const double norm_const = 1.0 / std::sqrt(2.0 * (1.0 + std::exp(-2.0 * std::norm(alpha))));
  CompensatedSum total;
  for (std::size_t n = 0; n <= n_max; ++n) {
    if (n % 2 == 1) {
      c[n] = 0.0;
    } else {
      c[n] *= 2.0 * norm_const;
      total += std::norm(c[n]);
    }
  }
  const double scale = 1.0 / std::sqrt(total.value());
  for (auto& v : c) v *= scale;
  return c;
}

// Truncated photon-number amplitudes of one mode.
struct ModeField {
  std::vector<complex> amplitudes{complex{1.0, 0.0}};
  FieldKind kind = FieldKind::vacuum;
  double tail_bound = 0.0;  // bound on 1 - sum |C_n|^2

  std::size_t n_max() const { return amplitudes.size() - 1; }

  double captured_mass() const {
    CompensatedSum s;
    for (const auto& a : amplitudes) s += std::norm(a);
    return s.value();
  }

  double mean_photons() const {
    CompensatedSum s;
    for (std::size_t n = 0; n < amplitudes.size(); ++n) {
      s += static_cast<double>(n) * std::norm(amplitudes[n]);
    }
    return s.value();
  }
};

inline ModeField vacuum_field() { return {}; }

inline ModeField coherent_field(complex alpha, double tail_tol = kDefaultTailTol) {
  if (alpha == complex{}) {
    detail::require_finite(alpha, "alpha");
    return vacuum_field();
  }
  const std::size_t n_max = auto_truncation(alpha, tail_tol);
  ModeField f{coherent_amplitudes(alpha, n_max), FieldKind::coherent, 0.0};
  f.tail_bound = std::max(detail::poisson_tail_bound(std::norm(alpha), n_max),
                          std::max(0.0, 1.0 - f.captured_mass()));
  return f;
}

inline ModeField even_coherent_field(complex alpha, double tail_tol = kDefaultTailTol) {
  detail::require_finite(alpha, "alpha");
  if (alpha == complex{}) return vacuum_field();
  const std::size_t n_max = auto_truncation(alpha, tail_tol);
  ModeField f{even_coherent_amplitudes(alpha, n_max), FieldKind::even_coherent, 0.0};
  // Mass of the untruncated even state beyond n_max is at most twice the
  // coherent tail divided by the even-state normalisation.
  const double even_norm = 1.0 + std::exp(-2.0 * std::norm(alpha));
  f.tail_bound = 2.0 * detail::poisson_tail_bound(std::norm(alpha), n_max) / even_norm;
  return f;
}

inline ModeField custom_field(std::vector<complex> amplitudes) {
  if (amplitudes.empty()) throw InvalidArgument("custom field needs at least one amplitude");
  for (const auto& a : amplitudes) detail::require_finite(a, "field amplitude");
  ModeField f{std::move(amplitudes), FieldKind::custom, 0.0};
  const double mass = f.captured_mass();
  if (mass > 1.0 + 1e-12) {
    throw InvalidArgument("custom field amplitudes carry probability mass above one");
  }
  f.tail_bound = std::max(0.0, 1.0 - mass);
  return f;
}

// Joint field input. The photon-number weights factorise: C_{n,m} = C_n C_m.
struct FieldPreparation {
  ModeField mode1;
  ModeField mode2;

  double tail_bound() const { return mode1.tail_bound + mode2.tail_bound; }
  complex weight(BlockIndex idx) const {
    return mode1.amplitudes[idx.n] * mode2.amplitudes[idx.m];
  }
};

}  // namespace aqc
