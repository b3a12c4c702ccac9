#ifndef HERMVAR_DISTANCES_HPP
#define HERMVAR_DISTANCES_HPP

#include <boost/math/distributions/normal.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <utility>
#include <vector>

#include "hermvar/detail/numerics.hpp"
#include "hermvar/fgn.hpp"
#include "hermvar/hermite.hpp"
#include "hermvar/kernel_norms.hpp"
#include "hermvar/montecarlo.hpp"
#include "hermvar/variations.hpp"

namespace hermvar {

inline double standard_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

namespace detail {

inline std::vector<double> sorted_copy(const std::vector<double>& v) {
  std::vector<double> s(v);
  std::stable_sort(s.begin(), s.end());
  return s;
}

inline void require_sample(const SampleSet& s, const char* who) {
  if (s.values.empty()) throw std::invalid_argument(std::string(who) + ": empty sample");
  for (double v : s.values)
    if (!std::isfinite(v)) throw std::invalid_argument(std::string(who) + ": non-finite sample value");
}

}  // namespace detail

/// One-sample Kolmogorov–Smirnov statistic sup_x |F_emp(x) − cdf(x)|.
inline double ks_distance(const SampleSet& s, const std::function<double(double)>& cdf) {
  detail::require_sample(s, "ks_distance");
  const auto x = detail::sorted_copy(s.values);
  const double m = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = cdf(x[i]);
    d = std::max({d, (static_cast<double>(i) + 1.0) / m - f, f - static_cast<double>(i) / m});
  }
  return std::clamp(d, 0.0, 1.0);
}

/// Two-sample Kolmogorov–Smirnov statistic sup_x |F_a(x) − F_b(x)|.
inline double ks_two_sample(const SampleSet& a, const SampleSet& b) {
  detail::require_sample(a, "ks_two_sample");
  detail::require_sample(b, "ks_two_sample");
  const auto x = detail::sorted_copy(a.values);
  const auto y = detail::sorted_copy(b.values);
  const double na = static_cast<double>(x.size()), nb = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double t = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == t) ++i;
    while (j < y.size() && y[j] == t) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

/// Asymptotic p-value of a KS statistic with effective size n_eff
/// (n for one sample, n m/(n+m) for two), with Stephens' correction.
inline double ks_pvalue(double d, double n_eff) {
  const double sq = std::sqrt(n_eff);
  const double lambda = (sq + 0.12 + 0.11 / sq) * d;
  if (lambda < 0.2) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 ? 1.0 : -1.0) * term;
    if (term < 1e-16) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

/// W1 between equal-size samples via the quantile coupling.
inline double wasserstein1(const SampleSet& s, const SampleSet& t) {
  detail::require_sample(s, "wasserstein1");
  detail::require_sample(t, "wasserstein1");
  if (s.values.size() != t.values.size()) {
    std::ostringstream os;
    os << "wasserstein1: size mismatch (" << s.values.size() << " vs " << t.values.size() << ")";
    throw std::invalid_argument(os.str());
  }
  const auto x = detail::sorted_copy(s.values);
  const auto y = detail::sorted_copy(t.values);
  detail::CompensatedSum acc;
  for (std::size_t i = 0; i < x.size(); ++i) acc.add(std::abs(x[i] - y[i]));
  return acc.value() / static_cast<double>(x.size());
}

inline double standard_normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("standard_normal_quantile: p must be in (0,1)");
  return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

/// W1 distance to N(0,1), using the midpoint quantiles of the reference law.
inline double wasserstein1_normal(const SampleSet& s) {
  SampleSet ref{std::vector<double>(s.values.size()), s.meta};
  const double m = static_cast<double>(s.values.size());
  for (std::size_t i = 0; i < s.values.size(); ++i)
    ref.values[i] = standard_normal_quantile((static_cast<double>(i) + 0.5) / m);
  return wasserstein1(s, ref);
}

struct CoupledL2 {
  double mean = 0.0;
  double se = 0.0;
  std::size_t batch = 0;
};

/// Monte Carlo E|S_n − S_N|²: each path is sampled at resolution N and
/// aggregated to n, so both statistics come from the same fBm.
inline CoupledL2 coupled_l2(HermiteOrder q, Hurst h, std::size_t n, std::size_t big_n, std::size_t batch, Seed seed,
                            unsigned threads = default_threads(),
                            SamplerMethod method = SamplerMethod::Circulant) {
  detail::require_supercritical(q, h, "coupled_l2");
  if (n < 1 || big_n % n != 0) {
    std::ostringstream os;
    os << "coupled_l2: n=" << n << " does not divide N=" << big_n;
    throw std::invalid_argument(os.str());
  }
  if (batch < 2) throw std::invalid_argument("coupled_l2: batch must be >= 2");
  if (n == big_n) return {0.0, 0.0, batch};
  const RegimeSpec spec = RegimeSpec::make(q, h);
  const FgnSampler sampler(h, big_n, method);
  const double norm_fine = normalizer(spec, big_n);
  const double norm_coarse = normalizer(spec, n);
  std::vector<double> sq(batch);
  parallel_for(batch, threads, [&](std::size_t i) {
    const FgnPath fine = sampler.sample(seed.with_stream(i));
    const FgnPath coarse = aggregate(fine, big_n / n);
    const double diff = v_n(q, coarse) / norm_coarse - v_n(q, fine) / norm_fine;
    sq[i] = diff * diff;
  });
  const auto s = summarize(sq);
  return {s.mean, s.se, batch};
}

struct RatePoint {
  double log_n;
  double log_y;
};

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  double stderr_slope = 0.0;
  std::vector<RatePoint> points;
};

/// Ordinary least squares of log y on log n.
inline RateFit rate_fit(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 3) throw std::invalid_argument("rate_fit: needs at least 3 points");
  RateFit fit;
  for (const auto& [n, y] : points) {
    if (!(n > 0.0)) throw std::invalid_argument("rate_fit: n must be positive");
    if (!(y > 0.0)) {
      std::ostringstream os;
      os << "rate_fit: nonpositive y=" << y << " at n=" << n;
      throw std::invalid_argument(os.str());
    }
    fit.points.push_back({std::log(n), std::log(y)});
  }
  const double m = static_cast<double>(fit.points.size());
  double mx = 0.0, my = 0.0;
  for (const auto& p : fit.points) {
    mx += p.log_n;
    my += p.log_y;
  }
  mx /= m;
  my /= m;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (const auto& p : fit.points) {
    sxx += (p.log_n - mx) * (p.log_n - mx);
    sxy += (p.log_n - mx) * (p.log_y - my);
    syy += (p.log_y - my) * (p.log_y - my);
  }
  if (!(sxx > 0.0)) throw std::invalid_argument("rate_fit: all n are equal");
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ssr = 0.0;
  for (const auto& p : fit.points) {
    const double e = p.log_y - (fit.intercept + fit.slope * p.log_n);
    ssr += e * e;
  }
  fit.r2 = syy > 0.0 ? std::clamp(1.0 - ssr / syy, 0.0, 1.0) : 1.0;
  fit.stderr_slope = std::sqrt(ssr / (m - 2.0) / sxx);
  return fit;
}

}  // namespace hermvar

#endif  // HERMVAR_DISTANCES_HPP
