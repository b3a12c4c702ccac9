#ifndef HERMVAR_FGN_HPP
#define HERMVAR_FGN_HPP

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <iomanip>
#include <locale>
#include <memory>
#include <numbers>
#include <ostream>
#include <random>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "hermvar/detail/fft.hpp"
#include "hermvar/detail/numerics.hpp"
#include "hermvar/error.hpp"
#include "hermvar/rng.hpp"

namespace hermvar {

/// Hurst index, strictly inside (0,1).
class Hurst {
 public:
  explicit Hurst(double value) : value_(value) {
    if (!(value > 0.0 && value < 1.0)) {
      std::ostringstream os;
      os << "Hurst index must satisfy 0<H<1 (got " << value << ")";
      throw std::invalid_argument(os.str());
    }
  }

  [[nodiscard]] double value() const noexcept { return value_; }

  /// Throws unless H > 1/2; several integral representations need it.
  void require_long_memory(const char* who) const {
    if (!(value_ > 0.5)) {
      std::ostringstream os;
      os << who << ": requires H > 1/2 (got " << value_ << ")";
      throw std::invalid_argument(os.str());
    }
  }

  friend bool operator==(const Hurst&, const Hurst&) = default;

 private:
  double value_;
};

/// Autocovariance of standardized fGn: ½(|r+1|^{2H} − 2|r|^{2H} + |r−1|^{2H}).
inline double rho(Hurst h, long long r) { return 0.5 * detail::second_difference(2.0 * h.value(), r); }

/// rho(h, 0..count-1).
inline std::vector<double> rho_table(Hurst h, std::size_t count) {
  std::vector<double> out(count);
  for (std::size_t r = 0; r < count; ++r) out[r] = rho(h, static_cast<long long>(r));
  return out;
}

/// E[(B_b − B_a)(B_d − B_c)] for fBm on [0,1].
inline double increment_cov(Hurst h, double a, double b, double c, double d) {
  if (!(a < b) || !(c < d)) throw std::invalid_argument("increment_cov: intervals must satisfy a<b and c<d");
  const double p = 2.0 * h.value();
  auto f = [p](double x) { return std::pow(std::abs(x), p); };
  return 0.5 * (f(b - c) + f(a - d) - f(b - d) - f(a - c));
}

/// Covariance between a block of m consecutive unit-grid fGn increments
/// starting at lag `offset` and the increment at 0: sum_{i<m} rho(offset+i).
/// Telescoped into two first differences so that large offsets keep precision.
inline double block_cov(Hurst h, long long offset, long long m) {
  if (m < 1) throw std::invalid_argument("block_cov: block length must be >= 1");
  const double p = 2.0 * h.value();
  return 0.5 * (detail::signed_first_difference(p, offset + m - 1) -
                detail::signed_first_difference(p, offset - 1));
}

/// Symmetric Toeplitz matrix with entries rho(k − l).
inline Eigen::MatrixXd covariance_matrix(Hurst h, std::size_t n) {
  if (n < 1) throw std::invalid_argument("covariance_matrix: n must be >= 1");
  const auto r = rho_table(h, n);
  Eigen::MatrixXd cov(n, n);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t l = 0; l < n; ++l) cov(k, l) = r[k > l ? k - l : l - k];
  return cov;
}

/// Standardized fGn increments xi[k] = n^H (B_{(k+1)/n} − B_{k/n}).
struct FgnPath {
  Hurst h;
  std::vector<double> xi;

  [[nodiscard]] std::size_t n() const noexcept { return xi.size(); }
};

enum class SamplerMethod { Cholesky, Circulant };

inline std::string to_string(SamplerMethod m) { return m == SamplerMethod::Cholesky ? "cholesky" : "circulant"; }

inline SamplerMethod parse_sampler_method(const std::string& s) {
  if (s == "cholesky") return SamplerMethod::Cholesky;
  if (s == "circulant") return SamplerMethod::Circulant;
  throw std::invalid_argument("unknown sampler method '" + s + "' (expected cholesky|circulant)");
}

/// Eigenvalues of the size-2n circulant embedding of the fGn covariance.
/// First column: rho(0..n), rho(n-1..1).
inline std::vector<double> circulant_eigenvalues(Hurst h, std::size_t n) {
  const std::size_t m = 2 * n;
  const auto r = rho_table(h, n + 1);
  std::vector<double> col(m);
  for (std::size_t j = 0; j <= n; ++j) col[j] = r[j];
  for (std::size_t j = n + 1; j < m; ++j) col[j] = r[m - j];
  detail::RealFft fft(m);
  std::vector<std::complex<double>> spec(m / 2 + 1);
  fft.execute(col, spec);
  std::vector<double> lambda(m);
  for (std::size_t j = 0; j <= m / 2; ++j) lambda[j] = spec[j].real();
  for (std::size_t j = m / 2 + 1; j < m; ++j) lambda[j] = lambda[m - j];
  return lambda;
}

/// Exact sampler for fGn at a fixed (H, n). Setup is shared read-only;
/// sample() may be called concurrently.
///
/// Cholesky: dense O(n^3) factorization of the Toeplitz covariance.
/// Circulant: Davies–Harte embedding of size 2n, O(n log n) per path; the
/// embedding of fGn is nonnegative definite for every H in (0,1).
class FgnSampler {
 public:
  FgnSampler(Hurst h, std::size_t n, SamplerMethod method = SamplerMethod::Circulant)
      : h_(h), n_(n), method_(method) {
    if (n < 1) throw std::invalid_argument("FgnSampler: n must be >= 1");
    if (method == SamplerMethod::Cholesky)
      setup_cholesky();
    else
      setup_circulant();
  }

  [[nodiscard]] Hurst hurst() const noexcept { return h_; }
  [[nodiscard]] std::size_t n() const noexcept { return n_; }
  [[nodiscard]] SamplerMethod method() const noexcept { return method_; }

  void sample_into(Seed seed, std::span<double> out) const {
    if (out.size() != n_) throw std::invalid_argument("FgnSampler: output size mismatch");
    auto eng = make_engine(seed);
    std::normal_distribution<double> gauss;
    if (method_ == SamplerMethod::Cholesky) {
      Eigen::VectorXd z(static_cast<Eigen::Index>(n_));
      for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = gauss(eng);
      Eigen::VectorXd x = lower_.triangularView<Eigen::Lower>() * z;
      std::copy(x.data(), x.data() + n_, out.begin());
      return;
    }
    const std::size_t m = 2 * n_;
    std::vector<std::complex<double>> w(m), y(m);
    // Hermitian-symmetric complex Gaussian weights make the transform real.
    w[0] = scale_[0] * gauss(eng);
    w[n_] = scale_[n_] * gauss(eng);
    for (std::size_t j = 1; j < n_; ++j) {
      const double a = gauss(eng) * std::numbers::sqrt2 / 2.0;
      const double b = gauss(eng) * std::numbers::sqrt2 / 2.0;
      w[j] = scale_[j] * std::complex<double>(a, b);
      w[m - j] = std::conj(w[j]);
    }
    fft_->execute(w, y);
    for (std::size_t k = 0; k < n_; ++k) out[k] = y[k].real();
  }

  [[nodiscard]] FgnPath sample(Seed seed) const {
    FgnPath p{h_, std::vector<double>(n_)};
    sample_into(seed, p.xi);
    return p;
  }

 private:
  void setup_cholesky() {
    Eigen::LLT<Eigen::MatrixXd> llt(covariance_matrix(h_, n_));
    if (llt.info() != Eigen::Success) {
      std::ostringstream os;
      os << "Cholesky factorization of the fGn covariance failed (H=" << h_.value() << ", n=" << n_ << ")";
      throw NumericalError(os.str());
    }
    lower_ = llt.matrixL();
  }

  void setup_circulant() {
    const std::size_t m = 2 * n_;
    auto lambda = circulant_eigenvalues(h_, n_);
    const double top = *std::max_element(lambda.begin(), lambda.end());
    scale_.resize(m);
    for (std::size_t j = 0; j < m; ++j) {
      double l = lambda[j];
      if (l < 0.0) {
        if (l < -1e-10 * top) {
          std::ostringstream os;
          os << "circulant embedding is not nonnegative definite (H=" << h_.value() << ", n=" << n_
             << ", eigenvalue " << l << ")";
          throw NumericalError(os.str());
        }
        l = 0.0;  // round-off
      }
      scale_[j] = std::sqrt(l / static_cast<double>(m));
    }
    fft_ = std::make_shared<detail::ComplexFft>(m);
  }

  Hurst h_;
  std::size_t n_;
  SamplerMethod method_;
  Eigen::MatrixXd lower_;
  std::vector<double> scale_;
  std::shared_ptr<const detail::ComplexFft> fft_;
};

inline FgnPath sample_fgn(Hurst h, std::size_t n, Seed seed, SamplerMethod method = SamplerMethod::Circulant) {
  return FgnSampler(h, n, method).sample(seed);
}

/// Coarse increments xi'_k = m^{-H} sum_{j<m} xi[k m + j]; same fBm, resolution n/m.
inline FgnPath aggregate(const FgnPath& path, std::size_t m) {
  if (m < 1 || path.n() % m != 0) {
    std::ostringstream os;
    os << "aggregate: block size " << m << " does not divide n=" << path.n();
    throw std::invalid_argument(os.str());
  }
  const std::size_t coarse = path.n() / m;
  const double scale = std::pow(static_cast<double>(m), -path.h.value());
  FgnPath out{path.h, std::vector<double>(coarse)};
  for (std::size_t k = 0; k < coarse; ++k) {
    double s = 0.0;
    for (std::size_t j = 0; j < m; ++j) s += path.xi[k * m + j];
    out.xi[k] = scale * s;
  }
  return out;
}

/// One value per line under a header `xi`, 17 significant digits.
inline void write_csv(std::ostream& os, const FgnPath& path) {
  os << "xi\n";
  std::ostringstream line;
  line.imbue(std::locale::classic());
  line << std::setprecision(17);
  for (double x : path.xi) line << x << '\n';
  os << line.str();
}

}  // namespace hermvar

#endif  // HERMVAR_FGN_HPP
