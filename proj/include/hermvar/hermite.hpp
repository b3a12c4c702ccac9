#ifndef HERMVAR_HERMITE_HPP
#define HERMVAR_HERMITE_HPP

#include <span>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "hermvar/fgn.hpp"

namespace hermvar {

/// Order q of a Hermite variation, 2 <= q <= 16.
class HermiteOrder {
 public:
  static constexpr int kMax = 16;

  explicit HermiteOrder(int q) : q_(q) {
    if (q < 2 || q > kMax) {
      std::ostringstream os;
      os << "Hermite order must satisfy 2<=q<=" << kMax << " (got " << q << ")";
      throw std::invalid_argument(os.str());
    }
  }

  [[nodiscard]] int value() const noexcept { return q_; }
  operator int() const noexcept { return q_; }  // NOLINT(google-explicit-constructor)

 private:
  int q_;
};

/// Probabilists' Hermite polynomial He_q(x), via
/// H_{k+1}(x) = x H_k(x) − k H_{k−1}(x).
inline double hermite_eval(int q, double x) {
  if (q < 0) throw std::invalid_argument("hermite_eval: q must be >= 0");
  if (q == 0) return 1.0;
  double prev = 1.0, cur = x;
  for (int k = 1; k < q; ++k) {
    const double next = x * cur - k * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

inline void hermite_transform(int q, std::span<const double> xs, std::span<double> out) {
  if (out.size() != xs.size()) throw std::invalid_argument("hermite_transform: size mismatch");
  for (std::size_t i = 0; i < xs.size(); ++i) out[i] = hermite_eval(q, xs[i]);
}

inline std::vector<double> hermite_transform(HermiteOrder q, const FgnPath& path) {
  std::vector<double> out(path.n());
  hermite_transform(q.value(), path.xi, out);
  return out;
}

}  // namespace hermvar

#endif  // HERMVAR_HERMITE_HPP
