#ifndef HERMVAR_DETAIL_NUMERICS_HPP
#define HERMVAR_DETAIL_NUMERICS_HPP

#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

namespace hermvar::detail {

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  CompensatedSum& operator+=(double x) noexcept {
    add(x);
    return *this;
  }
  [[nodiscard]] double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

inline double compensated_sum(std::span<const double> xs) noexcept {
  CompensatedSum s;
  for (double x : xs) s.add(x);
  return s.value();
}

/// Integer power by repeated squaring; exact up to round-off for small n.
inline double ipow(double x, int n) noexcept {
  double r = 1.0;
  unsigned e = static_cast<unsigned>(n < 0 ? -n : n);
  while (e) {
    if (e & 1u) r *= x;
    x *= x;
    e >>= 1u;
  }
  return n < 0 ? 1.0 / r : r;
}

/// (x+1)^p - x^p for x >= 0, without cancellation for large x.
inline double first_difference(double p, double x) {
  if (x < 0.0) throw std::invalid_argument("first_difference: x must be >= 0");
  if (x == 0.0) return 1.0;
  if (x < 1.0) return std::pow(x + 1.0, p) - std::pow(x, p);
  return std::pow(x, p) * std::expm1(p * std::log1p(1.0 / x));
}

/// |x+1|^p - |x|^p for integer x of either sign.
inline double signed_first_difference(double p, long long x) {
  if (x >= 0) return first_difference(p, static_cast<double>(x));
  // |x+1|^p - |x|^p = (-x-1)^p - (-x)^p
  return -first_difference(p, static_cast<double>(-x - 1));
}

/// |r+1|^p - 2|r|^p + |r-1|^p for integer r, p > 0.
///
/// Small lags use the direct form in long double; from r = 8 on the
/// even-order binomial series r^p * 2 * sum_{k>=2, even} C(p,k) r^{-k},
/// which carries no cancellation.
inline double second_difference(double p, long long r) {
  if (r < 0) r = -r;
  if (r == 0) return 2.0;
  if (r < 8) {
    const long double lp = p;
    const long double lr = static_cast<long double>(r);
    return static_cast<double>(std::pow(lr + 1.0L, lp) - 2.0L * std::pow(lr, lp) +
                               std::pow(lr - 1.0L, lp));
  }
  const double x = 1.0 / static_cast<double>(r);
  const double x2 = x * x;
  double binom = p * (p - 1.0) / 2.0;  // C(p, 2)
  double xk = x2;
  double series = 0.0;
  for (int k = 2; k < 200; k += 2) {
    const double term = binom * xk;
    series += term;
    if (std::abs(term) <= 1e-18 * std::abs(series)) break;
    // C(p, k+2) from C(p, k)
    binom *= (p - k) * (p - k - 1.0) / ((k + 1.0) * (k + 2.0));
    xk *= x2;
  }
  return 2.0 * std::pow(static_cast<double>(r), p) * series;
}

/// Gauss–Legendre rule on [0,1] with N nodes (Newton on P_N).
template <std::size_t N>
struct GaussLegendre01 {
  std::array<double, N> nodes{};
  std::array<double, N> weights{};

  GaussLegendre01() {
    constexpr double pi = std::numbers::pi;
    for (std::size_t i = 0; i < (N + 1) / 2; ++i) {
      double z = std::cos(pi * (static_cast<double>(i) + 0.75) / (static_cast<double>(N) + 0.5));
      double dp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = 0.0;
        for (std::size_t j = 1; j <= N; ++j) {
          const double p2 = p1;
          p1 = p0;
          p0 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p2) / static_cast<double>(j);
        }
        dp = static_cast<double>(N) * (z * p0 - p1) / (z * z - 1.0);
        const double dz = p0 / dp;
        z -= dz;
        if (std::abs(dz) < 1e-16) break;
      }
      const double w = 2.0 / ((1.0 - z * z) * dp * dp);
      nodes[i] = 0.5 * (1.0 - z);
      nodes[N - 1 - i] = 0.5 * (1.0 + z);
      weights[i] = weights[N - 1 - i] = 0.5 * w;
    }
  }

  template <class F>
  double integrate(F&& f, double lo = 0.0, double hi = 1.0) const {
    const double h = hi - lo;
    CompensatedSum s;
    for (std::size_t i = 0; i < N; ++i) s.add(weights[i] * f(lo + h * nodes[i]));
    return h * s.value();
  }
};

inline const GaussLegendre01<64>& gauss_legendre_64() {
  static const GaussLegendre01<64> rule;
  return rule;
}

inline const GaussLegendre01<16>& gauss_legendre_16() {
  static const GaussLegendre01<16> rule;
  return rule;
}

/// Composite Gauss–Legendre on [0,1] with dyadic panels refined toward both
/// endpoints; for integrands with algebraic endpoint singularities.
template <class F>
double integrate_graded(F&& f, int levels = 52) {
  const auto& rule = gauss_legendre_16();
  CompensatedSum s;
  // [0, 1/2] refined toward 0 and [1/2, 1] refined toward 1.
  for (int k = 1; k <= levels; ++k) {
    const double hi = std::ldexp(1.0, -k);
    const double lo = k == levels ? 0.0 : std::ldexp(1.0, -k - 1);
    s.add(rule.integrate(f, lo, hi));
    s.add(rule.integrate(f, 1.0 - hi, 1.0 - lo));
  }
  return s.value();
}

/// Hurwitz zeta sum_{k>=0} (a+k)^{-s}, s > 1, a >= 1, by Euler–Maclaurin.
inline double hurwitz_zeta(double s, double a) {
  if (!(s > 1.0)) throw std::invalid_argument("hurwitz_zeta: s must exceed 1");
  constexpr int kDirect = 16;
  CompensatedSum sum;
  for (int k = 0; k < kDirect; ++k) sum.add(std::pow(a + k, -s));
  const double x = a + kDirect;
  sum.add(std::pow(x, 1.0 - s) / (s - 1.0));
  sum.add(0.5 * std::pow(x, -s));
  // B_{2j}/(2j)!
  static constexpr std::array<double, 8> b2j_over_fact = {
      1.0 / 12.0,          -1.0 / 720.0,        1.0 / 30240.0,        -1.0 / 1209600.0,
      1.0 / 47900160.0,    -691.0 / 1307674368000.0, 1.0 / 74724249600.0,
      -3617.0 / 10670622842880000.0};
  double rising = s;  // s (s+1) ... (s+2j-2)
  double xpow = std::pow(x, -s - 1.0);
  for (std::size_t j = 0; j < b2j_over_fact.size(); ++j) {
    sum.add(b2j_over_fact[j] * rising * xpow);
    rising *= (s + 2.0 * j + 1.0) * (s + 2.0 * j + 2.0);
    xpow /= x * x;
  }
  return sum.value();
}

inline double factorial(int n) {
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

}  // namespace hermvar::detail

#endif  // HERMVAR_DETAIL_NUMERICS_HPP
