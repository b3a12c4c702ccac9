#ifndef HERMVAR_MALLIAVIN_HPP
#define HERMVAR_MALLIAVIN_HPP

#include <cmath>
#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "hermvar/detail/fft.hpp"
#include "hermvar/detail/numerics.hpp"
#include "hermvar/fgn.hpp"
#include "hermvar/hermite.hpp"
#include "hermvar/montecarlo.hpp"
#include "hermvar/variations.hpp"

namespace hermvar {

/// q with H = 1 − 1/(2q) and σ_H² of the critical normalization.
struct CriticalSpec {
  HermiteOrder q;
  Hurst h;
  double sigma2;

  explicit CriticalSpec(HermiteOrder order)
      : q(order), h(critical_hurst(order)), sigma2(detail::ipow(sigma_critical(order), 2)) {}

  [[nodiscard]] RegimeSpec regime() const { return RegimeSpec::make(q, h); }
};

namespace detail {

inline void require_n2(std::size_t n, const char* who) {
  if (n < 2) {
    std::ostringstream os;
    os << who << ": n must be >= 2 (got " << n << ")";
    throw std::invalid_argument(os.str());
  }
}

}  // namespace detail

/// Var(S_n) = q!/(σ² n log n) sum_{k,l<n} rho(k−l)^q.
inline double variance_sn(const CriticalSpec& spec, std::size_t n) {
  detail::require_n2(n, "variance_sn");
  const double nn = static_cast<double>(n);
  return detail::factorial(spec.q) * rho_power_double_sum(spec.h, spec.q, n) / (spec.sigma2 * nn * std::log(nn));
}

/// 1 − A_{q−1}(n) in its split form
/// 1 − q!/(σ² log n) sum_{|r|<n} rho^q + q!/(σ² n log n) sum_{|r|<n} |r| rho^q.
inline double one_minus_a_top(const CriticalSpec& spec, std::size_t n) {
  detail::require_n2(n, "one_minus_a_top");
  detail::CompensatedSum plain, weighted;
  plain.add(1.0);
  for (std::size_t r = 1; r < n; ++r) {
    const double rq = detail::ipow(rho(spec.h, static_cast<long long>(r)), spec.q);
    plain.add(2.0 * rq);
    weighted.add(2.0 * static_cast<double>(r) * rq);
  }
  const double nn = static_cast<double>(n);
  const double c = detail::factorial(spec.q) / (spec.sigma2 * std::log(nn));
  return 1.0 - c * plain.value() + c * weighted.value() / nn;
}

/// a ↦ sum_{k,l<n} a_k a_l rho(k−l), through the size-2n circulant
/// embedding and Parseval (one real FFT per call). Direct O(n²) for small n.
class ToeplitzQuadraticForm {
 public:
  ToeplitzQuadraticForm(Hurst h, std::size_t n) : n_(n) {
    if (n < 1) throw std::invalid_argument("ToeplitzQuadraticForm: n must be >= 1");
    if (n < kFftThreshold) {
      rho_ = rho_table(h, n);
      return;
    }
    const auto lambda = circulant_eigenvalues(h, n);
    lambda_.assign(lambda.begin(), lambda.begin() + static_cast<std::ptrdiff_t>(n + 1));
    fft_ = std::make_shared<detail::RealFft>(2 * n);
  }

  [[nodiscard]] std::size_t n() const noexcept { return n_; }

  [[nodiscard]] double operator()(std::span<const double> a) const {
    if (a.size() != n_) throw std::invalid_argument("ToeplitzQuadraticForm: size mismatch");
    if (!fft_) {
      double s = 0.0;
      for (std::size_t k = 0; k < n_; ++k) {
        double row = rho_[0] * a[k];
        for (std::size_t l = 0; l < k; ++l) row += 2.0 * rho_[k - l] * a[l];
        s += a[k] * row;
      }
      return s;
    }
    const std::size_t m = 2 * n_;
    std::vector<double> padded(m, 0.0);
    std::copy(a.begin(), a.end(), padded.begin());
    std::vector<std::complex<double>> spec(n_ + 1);
    fft_->execute(padded, spec);
    double s = lambda_[0] * std::norm(spec[0]) + lambda_[n_] * std::norm(spec[n_]);
    for (std::size_t j = 1; j < n_; ++j) s += 2.0 * lambda_[j] * std::norm(spec[j]);
    return s / static_cast<double>(m);
  }

 private:
  static constexpr std::size_t kFftThreshold = 64;
  std::size_t n_;
  std::vector<double> rho_;
  std::vector<double> lambda_;
  std::shared_ptr<const detail::RealFft> fft_;
};

/// Per-path q⁻¹‖DS_n‖² at a fixed resolution:
/// q/(σ² n log n) sum_{k,l} H_{q−1}(xi_k) H_{q−1}(xi_l) rho(k−l).
/// No positivity clamp is applied.
class DsNormEvaluator {
 public:
  DsNormEvaluator(const CriticalSpec& spec, std::size_t n) : spec_(spec), form_(spec.h, n) {
    detail::require_n2(n, "ds_norm_sq");
    const double nn = static_cast<double>(n);
    scale_ = spec.q.value() / (spec.sigma2 * nn * std::log(nn));
  }

  [[nodiscard]] double operator()(const FgnPath& path) const {
    if (!(path.h == spec_.h)) {
      std::ostringstream os;
      os << "ds_norm_sq: path Hurst " << path.h.value() << " differs from spec Hurst " << spec_.h.value();
      throw std::invalid_argument(os.str());
    }
    if (path.n() != form_.n()) throw std::invalid_argument("ds_norm_sq: path resolution differs from evaluator");
    std::vector<double> a(path.n());
    hermite_transform(spec_.q.value() - 1, path.xi, a);
    return scale_ * form_(a);
  }

 private:
  CriticalSpec spec_;
  ToeplitzQuadraticForm form_;
  double scale_;
};

inline double ds_norm_sq(const CriticalSpec& spec, const FgnPath& path) {
  return DsNormEvaluator(spec, path.n())(path);
}

struct BoundEstimate {
  std::size_t n = 0;
  double mean_sq = 0.0;   // MC mean of (1 − q⁻¹‖DS_n‖²)²
  double se = 0.0;
  double tv_bound = 0.0;  // 2 sqrt(mean_sq)
  double mean_ds = 0.0;   // MC mean of q⁻¹‖DS_n‖², as a by-product
  double se_ds = 0.0;
  std::size_t batch = 0;
  Seed seed{};
};

struct BerryOptions {
  unsigned threads = default_threads();
  bool antithetic = false;  // odd indices reuse the negated path of index i−1
  SamplerMethod method = SamplerMethod::Circulant;
};

/// Berry-type bound from an arbitrary path source `source(i) -> FgnPath`.
template <class PathSource>
BoundEstimate berry_estimate_from(const CriticalSpec& spec, std::size_t n, std::size_t batch, Seed seed,
                                  PathSource&& source, unsigned threads = default_threads()) {
  if (batch < 100) {
    std::ostringstream os;
    os << "berry_estimate: batch must be >= 100 (got " << batch << ")";
    throw std::invalid_argument(os.str());
  }
  const DsNormEvaluator ds(spec, n);
  std::vector<double> deficit_sq(batch), ds_values(batch);
  parallel_for(batch, threads, [&](std::size_t i) {
    const double v = ds(source(i));
    ds_values[i] = v;
    deficit_sq[i] = (1.0 - v) * (1.0 - v);
  });
  const auto s = summarize(deficit_sq);
  const auto d = summarize(ds_values);
  return BoundEstimate{n, s.mean, s.se, 2.0 * std::sqrt(s.mean), d.mean, d.se, batch, seed};
}

/// tv_bound = 2 sqrt(E(1 − q⁻¹‖DS_n‖²)²), expectation by Monte Carlo.
inline BoundEstimate berry_estimate(const CriticalSpec& spec, std::size_t n, std::size_t batch, Seed seed,
                                    const BerryOptions& opts = {}) {
  const FgnSampler sampler(spec.h, n, opts.method);
  auto source = [&](std::size_t i) {
    if (opts.antithetic && i % 2 == 1) {
      FgnPath p = sampler.sample(seed.with_stream(i - 1));
      for (double& x : p.xi) x = -x;
      return p;
    }
    return sampler.sample(seed.with_stream(i));
  };
  return berry_estimate_from(spec, n, batch, seed, source, opts.threads);
}

}  // namespace hermvar

#endif  // HERMVAR_MALLIAVIN_HPP
