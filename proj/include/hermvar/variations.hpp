#ifndef HERMVAR_VARIATIONS_HPP
#define HERMVAR_VARIATIONS_HPP

#include <cmath>
#include <cstddef>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "hermvar/detail/numerics.hpp"
#include "hermvar/error.hpp"
#include "hermvar/fgn.hpp"
#include "hermvar/hermite.hpp"

namespace hermvar {

enum class Regime { Subcritical, Critical, Supercritical };

inline std::string to_string(Regime r) {
  switch (r) {
    case Regime::Subcritical: return "subcritical";
    case Regime::Critical: return "critical";
    case Regime::Supercritical: return "supercritical";
  }
  return "?";
}

/// 1 − 1/(2q): the Hurst value separating Gaussian from Hermite limits.
inline double critical_hurst(int q) { return 1.0 - 1.0 / (2.0 * q); }

inline constexpr double kRegimeTolerance = 1e-12;

inline Regime classify(int q, double h) {
  const double t = critical_hurst(q);
  if (h < t - kRegimeTolerance) return Regime::Subcritical;
  if (h > t + kRegimeTolerance) return Regime::Supercritical;
  return Regime::Critical;
}

/// sum_{k,l<n} rho(k−l)^q = n + 2 sum_{r=1}^{n−1} (n−r) rho(r)^q.
inline double rho_power_double_sum(Hurst h, int q, std::size_t n) {
  detail::CompensatedSum s;
  s.add(static_cast<double>(n));
  for (std::size_t r = 1; r < n; ++r)
    s.add(2.0 * static_cast<double>(n - r) * detail::ipow(rho(h, static_cast<long long>(r)), q));
  return s.value();
}

/// σ_H for the critical case: σ² = 2 q! ((2q−1)(q−1)/(2q²))^q.
inline double sigma_critical(HermiteOrder q) {
  const double qq = q.value();
  const double base = (2.0 * qq - 1.0) * (qq - 1.0) / (2.0 * qq * qq);
  return std::sqrt(2.0 * detail::factorial(q) * detail::ipow(base, q));
}

struct SeriesSigma {
  double sigma = 0.0;
  double sigma2 = 0.0;
  long long cutoff = 0;      // lags 1..cutoff summed directly
  double tail = 0.0;         // asymptotic tail sum_{r>cutoff} rho^q
  double error_bound = 0.0;  // bound on |sigma2 error| from the truncated expansion
};

/// Breuer–Major constant σ² = q! sum_{r∈Z} rho(r)^q, H < 1 − 1/(2q).
///
/// Lags up to a cutoff R are summed directly. The tail uses
/// rho(r) = r^{2H−2} sum_{j>=0} C(2H, 2j+2) r^{−2j}, raised to the q-th power
/// as a series in r^{−2} and summed term by term with Hurwitz zeta. R doubles
/// until the first omitted term of that series is below tol.
inline SeriesSigma sigma_subcritical_series(HermiteOrder q, Hurst h, double tol = 1e-12) {
  if (!(tol > 0.0)) throw std::invalid_argument("sigma_subcritical: tol must be positive");
  const double hv = h.value();
  const double decay = (2.0 - 2.0 * hv) * q.value();
  if (!(decay > 1.0 + 2.0 * q.value() * kRegimeTolerance) || classify(q, hv) != Regime::Subcritical) {
    std::ostringstream os;
    os << "sigma_subcritical: sum of rho^q is non-summable for H=" << hv << " >= 1-1/(2q)=" << critical_hurst(q);
    throw NumericalError(os.str());
  }

  constexpr int kTerms = 10;
  // Coefficients of rho(r) r^{2-2H} in powers of x = r^{-2}.
  std::vector<double> c(kTerms);
  {
    const double p = 2.0 * hv;
    double binom = p * (p - 1.0) / 2.0;
    for (int j = 0; j < kTerms; ++j) {
      c[j] = binom;
      const int k = 2 * j + 2;
      binom *= (p - k) * (p - k - 1.0) / ((k + 1.0) * (k + 2.0));
    }
  }
  std::vector<double> e{1.0};
  for (int i = 0; i < q.value(); ++i) {
    std::vector<double> next(kTerms, 0.0);
    for (std::size_t a = 0; a < e.size(); ++a)
      for (int b = 0; a + b < static_cast<std::size_t>(kTerms); ++b) next[a + b] += e[a] * c[b];
    e = std::move(next);
  }

  const double qfact = detail::factorial(q);
  long long cutoff = 64;
  for (;; cutoff *= 2) {
    const double a = static_cast<double>(cutoff + 1);
    const double omitted =
        std::abs(e[kTerms - 1]) * detail::hurwitz_zeta(decay + 2.0 * (kTerms - 1), a);
    if (2.0 * qfact * omitted < tol || cutoff >= (1LL << 24)) {
      detail::CompensatedSum direct;
      for (long long r = 1; r <= cutoff; ++r) direct.add(detail::ipow(rho(h, r), q));
      detail::CompensatedSum tail;
      for (int j = 0; j + 1 < kTerms; ++j) tail.add(e[j] * detail::hurwitz_zeta(decay + 2.0 * j, a));
      SeriesSigma out;
      out.cutoff = cutoff;
      out.tail = tail.value();
      out.sigma2 = qfact * (1.0 + 2.0 * (direct.value() + out.tail));
      out.error_bound = 2.0 * qfact * omitted + 64.0 * std::numeric_limits<double>::epsilon() * out.sigma2;
      if (!(out.sigma2 > 0.0)) throw NumericalError("sigma_subcritical: nonpositive variance");
      out.sigma = std::sqrt(out.sigma2);
      return out;
    }
  }
}

inline double sigma_subcritical(HermiteOrder q, Hurst h, double tol = 1e-12) {
  return sigma_subcritical_series(q, h, tol).sigma;
}

/// (q, H) with its regime and, for the Gaussian regimes, the normalizing σ.
struct RegimeSpec {
  HermiteOrder q;
  Hurst h;
  Regime regime;
  double threshold;
  double sigma;  // NaN in the supercritical regime

  static RegimeSpec make(HermiteOrder q, Hurst h) {
    const Regime r = classify(q, h.value());
    double sigma = std::numeric_limits<double>::quiet_NaN();
    if (r == Regime::Subcritical) sigma = sigma_subcritical(q, h);
    if (r == Regime::Critical) sigma = sigma_critical(q);
    return RegimeSpec{q, h, r, critical_hurst(q), sigma};
  }

  /// Critical spec with H derived from q exactly.
  static RegimeSpec critical(HermiteOrder q) { return make(q, Hurst(critical_hurst(q))); }
};

/// V_n = sum_k H_q(xi_k).
inline double v_n(HermiteOrder q, const FgnPath& path) {
  if (path.n() == 0) throw std::invalid_argument("v_n: empty path");
  detail::CompensatedSum s;
  for (double x : path.xi) s.add(hermite_eval(q, x));
  return s.value();
}

/// Regime-dependent divisor of V_n.
inline double normalizer(const RegimeSpec& spec, std::size_t n) {
  if (n < 1) throw std::invalid_argument("normalize: n must be >= 1");
  const double nn = static_cast<double>(n);
  switch (spec.regime) {
    case Regime::Subcritical: return spec.sigma * std::sqrt(nn);
    case Regime::Critical:
      if (n < 2) throw std::invalid_argument("normalize: critical regime needs n >= 2 (log n > 0)");
      return spec.sigma * std::sqrt(nn * std::log(nn));
    case Regime::Supercritical: return std::pow(nn, 1.0 - spec.q.value() * (1.0 - spec.h.value()));
  }
  return std::numeric_limits<double>::quiet_NaN();
}

inline double normalize(const RegimeSpec& spec, double vn, std::size_t n) { return vn / normalizer(spec, n); }

struct Statistic {
  double vn;
  double zn;
  std::size_t n;
  RegimeSpec spec;
};

inline Statistic make_statistic(const RegimeSpec& spec, const FgnPath& path) {
  if (!(path.h == spec.h)) throw std::invalid_argument("make_statistic: path Hurst differs from spec");
  const double vn = v_n(spec.q, path);
  return Statistic{vn, normalize(spec, vn, path.n()), path.n(), spec};
}

/// Var(Z_n) = q! sum_{k,l<n} rho(k−l)^q / normalizer(n)^2, in O(n).
inline double variance_zn_exact(const RegimeSpec& spec, std::size_t n) {
  if (n < 2) throw std::invalid_argument("variance_zn_exact: n must be >= 2");
  const double d = normalizer(spec, n);
  return detail::factorial(spec.q) * rho_power_double_sum(spec.h, spec.q, n) / (d * d);
}

}  // namespace hermvar

#endif  // HERMVAR_VARIATIONS_HPP
