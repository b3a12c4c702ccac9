#ifndef HERMVAR_KERNEL_NORMS_HPP
#define HERMVAR_KERNEL_NORMS_HPP

#include <cmath>
#include <cstddef>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "hermvar/detail/numerics.hpp"
#include "hermvar/error.hpp"
#include "hermvar/fgn.hpp"
#include "hermvar/hermite.hpp"
#include "hermvar/variations.hpp"

namespace hermvar {

// Kernel integrals over the unit square at integer lag r >= 0:
//   inner_uv     ∫∫ |r+u−v|^{2H−2} du dv
//   middle_term  ∫ dv (∫ du |r+u−v|^{2H−2})^q
//   third_term   ∫∫ |r+u−v|^{2qH−2q} du dv
// Negative lags follow from the symmetry u ↔ 1−u, v ↔ 1−v.

namespace detail {

inline void require_lag(long long r, const char* who) {
  if (r < 0) {
    std::ostringstream os;
    os << who << ": lag must be >= 0 (got " << r << ")";
    throw std::invalid_argument(os.str());
  }
}

inline void require_supercritical(int q, Hurst h, const char* who) {
  if (classify(q, h.value()) != Regime::Supercritical) {
    std::ostringstream os;
    os << who << ": requires H > 1-1/(2q) = " << critical_hurst(q) << " (got q=" << q << ", H=" << h.value()
       << ")";
    throw std::invalid_argument(os.str());
  }
}

}  // namespace detail

inline double inner_uv(Hurst h, long long r) {
  h.require_long_memory("inner_uv");
  detail::require_lag(r, "inner_uv");
  const double p = 2.0 * h.value();
  return detail::second_difference(p, r) / (p * (p - 1.0));
}

/// Outer integral: 64-node Gauss–Legendre for r >= 2, where the integrand is
/// analytic on [0,1]. At r = 0, 1 the inner integral has algebraic endpoint
/// behaviour (v^{2H−1}), so a dyadically graded composite rule is used.
inline double middle_term(int q, Hurst h, long long r) {
  if (q < 1) throw std::invalid_argument("middle_term: q must be >= 1");
  h.require_long_memory("middle_term");
  detail::require_lag(r, "middle_term");
  const double p = 2.0 * h.value() - 1.0;
  if (r == 0) {
    return detail::integrate_graded([p, q](double v) {
      return detail::ipow((std::pow(v, p) + std::pow(1.0 - v, p)) / p, q);
    });
  }
  if (r == 1) {
    return detail::integrate_graded(
        [p, q](double v) { return detail::ipow(detail::first_difference(p, 1.0 - v) / p, q); });
  }
  const double rr = static_cast<double>(r);
  return detail::gauss_legendre_64().integrate(
      [p, q, rr](double v) { return detail::ipow(detail::first_difference(p, rr - v) / p, q); });
}

inline double third_term(int q, Hurst h, long long r) {
  detail::require_supercritical(q, h, "third_term");
  detail::require_lag(r, "third_term");
  const double a = 2.0 * q * h.value() - 2.0 * q;
  return detail::second_difference(a + 2.0, r) / ((a + 1.0) * (a + 2.0));
}

struct BracketTerm {
  long long r;
  double t1;  // inner_uv^q
  double t2;  // middle_term
  double t3;  // third_term
  double bracket;
};

inline BracketTerm bracket(HermiteOrder q, Hurst h, long long r) {
  detail::require_supercritical(q, h, "bracket");
  BracketTerm b{r, detail::ipow(inner_uv(h, r), q), middle_term(q, h, r), third_term(q, h, r), 0.0};
  b.bracket = b.t1 - 2.0 * b.t2 + b.t3;
  return b;
}

/// Lazily grown cache of bracket terms for r = 0, 1, ...; reused across n.
class BracketTable {
 public:
  BracketTable(HermiteOrder q, Hurst h) : q_(q), h_(h) { detail::require_supercritical(q, h, "BracketTable"); }

  [[nodiscard]] HermiteOrder q() const noexcept { return q_; }
  [[nodiscard]] Hurst h() const noexcept { return h_; }

  void ensure(std::size_t count) {
    terms_.reserve(count);
    for (std::size_t r = terms_.size(); r < count; ++r) terms_.push_back(bracket(q_, h_, static_cast<long long>(r)));
  }

  const BracketTerm& at(std::size_t r) {
    ensure(r + 1);
    return terms_[r];
  }

  [[nodiscard]] const std::vector<BracketTerm>& terms() const noexcept { return terms_; }

 private:
  HermiteOrder q_;
  Hurst h_;
  std::vector<BracketTerm> terms_;
};

struct DiscrepancyReport {
  int q;
  double h;
  std::size_t n;
  double delta;       // ‖f_n − f‖² without the q! factor
  double l2_error;    // q! delta = E|S_n − Z|²
  double normalized;  // delta n^{2qH−2q+1}
  std::vector<BracketTerm> terms;
};

/// delta(n) = (H(2H−1))^q n^{2q−2−2qH} sum_{|r|<n} (n−|r|) bracket(r).
inline DiscrepancyReport discrepancy(BracketTable& table, std::size_t n, bool keep_terms = true) {
  if (n < 1) throw std::invalid_argument("discrepancy: n must be >= 1");
  const int q = table.q();
  const double hv = table.h().value();
  table.ensure(n);
  const auto& t = table.terms();
  detail::CompensatedSum s;
  s.add(static_cast<double>(n) * t[0].bracket);
  for (std::size_t r = 1; r < n; ++r) s.add(2.0 * static_cast<double>(n - r) * t[r].bracket);
  const double nn = static_cast<double>(n);
  const double delta =
      detail::ipow(hv * (2.0 * hv - 1.0), q) * std::pow(nn, 2.0 * q - 2.0 - 2.0 * q * hv) * s.value();
  if (delta < -1e-12) {
    std::ostringstream os;
    os << "discrepancy: negative squared norm " << delta << " at n=" << n;
    throw NumericalError(os.str());
  }
  DiscrepancyReport rep{q, hv, n, delta, detail::factorial(q) * delta,
                        delta * std::pow(nn, 2.0 * q * hv - 2.0 * q + 1.0), {}};
  if (keep_terms) rep.terms.assign(t.begin(), t.begin() + static_cast<std::ptrdiff_t>(n));
  return rep;
}

inline DiscrepancyReport discrepancy(HermiteOrder q, Hurst h, std::size_t n) {
  BracketTable table(q, h);
  return discrepancy(table, n);
}

/// ‖f_n‖² (no q!) from lag multiplicities: n^{2q−2−2qH} sum_{k,l} rho(k−l)^q.
inline double fn_norm_sq(HermiteOrder q, Hurst h, std::size_t n) {
  const double nn = static_cast<double>(n);
  return std::pow(nn, 2.0 * q - 2.0 - 2.0 * q * h.value()) * rho_power_double_sum(h, q, n);
}

/// ‖f_n‖² (no q!) from the Gram matrix of the interval indicators:
/// n^{2q−2} sum_{k,l} ⟨1_{[k/n,(k+1)/n]}, 1_{[l/n,(l+1)/n]}⟩^q. O(n²).
inline double fn_norm_sq_gram(HermiteOrder q, Hurst h, std::size_t n) {
  const double nn = static_cast<double>(n);
  detail::CompensatedSum s;
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t l = 0; l < n; ++l)
      s.add(detail::ipow(increment_cov(h, k / nn, (k + 1) / nn, l / nn, (l + 1) / nn), q));
  return std::pow(nn, 2.0 * q - 2.0) * s.value();
}

/// ⟨f_n, f_N⟩ (no q!) for n | N, O(n N).
inline double fn_inner(HermiteOrder q, Hurst h, std::size_t n, std::size_t big_n) {
  if (n < 1 || big_n % n != 0) {
    std::ostringstream os;
    os << "fn_inner: n=" << n << " does not divide N=" << big_n;
    throw std::invalid_argument(os.str());
  }
  const long long m = static_cast<long long>(big_n / n);
  const long long nn = static_cast<long long>(big_n);
  // offset d = k m − j ranges over (−N, N)
  std::vector<double> cov_q(static_cast<std::size_t>(2 * nn));
  for (long long d = -nn + 1; d < nn; ++d)
    cov_q[static_cast<std::size_t>(d + nn)] = detail::ipow(block_cov(h, d, m), q);
  detail::CompensatedSum s;
  for (long long k = 0; k < static_cast<long long>(n); ++k) {
    double row = 0.0;
    for (long long j = 0; j < nn; ++j) row += cov_q[static_cast<std::size_t>(k * m - j + nn)];
    s.add(row);
  }
  const double fine = static_cast<double>(big_n);
  return std::pow(static_cast<double>(n) * fine, q - 1.0) * std::pow(fine, -2.0 * q * h.value()) * s.value();
}

/// Exact E|S_n − S_N|² = q! (‖f_n‖² + ‖f_N‖² − 2⟨f_n, f_N⟩) for nested grids.
inline double cross_gram(HermiteOrder q, Hurst h, std::size_t n, std::size_t big_n) {
  detail::require_supercritical(q, h, "cross_gram");
  if (n < 1 || big_n % n != 0) {
    std::ostringstream os;
    os << "cross_gram: n=" << n << " does not divide N=" << big_n;
    throw std::invalid_argument(os.str());
  }
  if (n == big_n) return 0.0;
  const double a = fn_norm_sq(q, h, n);
  const double b = fn_norm_sq(q, h, big_n);
  const double c = fn_inner(q, h, n, big_n);
  double v = detail::factorial(q) * (a + b - 2.0 * c);
  if (v < 0.0) {
    if (v < -1e-12 * (a + b)) throw NumericalError("cross_gram: negative squared distance");
    v = 0.0;
  }
  return v;
}

/// Variance of the Hermite limit: q! (H(2H−1))^q ∫∫ |u−v|^{2qH−2q}.
inline double hermite_limit_variance(HermiteOrder q, Hurst h) {
  const double hv = h.value();
  return detail::factorial(q) * detail::ipow(hv * (2.0 * hv - 1.0), q) * third_term(q, h, 0);
}

/// Rate n^{1−1/(2q)−H} of the total-variation bound (constant unknown).
inline std::vector<double> tv_rate_curve(HermiteOrder q, Hurst h, const std::vector<std::size_t>& ns) {
  detail::require_supercritical(q, h, "tv_rate_curve");
  const double e = 1.0 - 1.0 / (2.0 * q) - h.value();
  std::vector<double> out;
  out.reserve(ns.size());
  for (auto n : ns) out.push_back(std::pow(static_cast<double>(n), e));
  return out;
}

}  // namespace hermvar

#endif  // HERMVAR_KERNEL_NORMS_HPP
