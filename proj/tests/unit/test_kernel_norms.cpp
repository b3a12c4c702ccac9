#include <gtest/gtest.h>

#include <cmath>

#include "hermvar/distances.hpp"
#include "hermvar/kernel_norms.hpp"
#include "oracles.hpp"

using namespace hermvar;

namespace {

struct Case {
  int q;
  double h;
};

constexpr Case kOracleCases[] = {{2, 0.8}, {2, 0.9}, {3, 0.95}};
constexpr long long kOracleLags[] = {0, 1, 2, 5, 10};

}  // namespace

TEST(InnerUv, ZeroLagClosedForm) {
  EXPECT_NEAR(inner_uv(Hurst(0.75), 0), 1.0 / (0.75 * 0.5), 1e-14);
  EXPECT_NEAR(inner_uv(Hurst(0.75), 0), 2.6666667, 1e-7);
}

TEST(InnerUv, MatchesQuadrature) {
  EXPECT_NEAR(inner_uv(Hurst(0.9), 5), oracle::lag_kernel_square(2 * 0.9 - 2, 5), 1e-8);
  for (auto c : kOracleCases)
    for (long long r : kOracleLags)
      EXPECT_NEAR(inner_uv(Hurst(c.h), r), oracle::lag_kernel_square(2 * c.h - 2, r), 1e-6) << c.h << ' ' << r;
}

TEST(InnerUv, IdentityWithRho) {
  for (double h : {0.55, 0.75, 0.9, 0.99}) {
    for (long long r = 0; r <= 100; ++r)
      EXPECT_NEAR(h * (2 * h - 1) * inner_uv(Hurst(h), r), rho(Hurst(h), r), 1e-12) << h << ' ' << r;
  }
}

TEST(InnerUv, RejectsShortMemory) {
  EXPECT_THROW(inner_uv(Hurst(0.5), 1), std::invalid_argument);
  EXPECT_THROW(inner_uv(Hurst(0.7), -1), std::invalid_argument);
}

TEST(MiddleTerm, FirstOrderReducesToInnerUv) {
  for (double h : {0.6, 0.8, 0.95})
    for (long long r : {0LL, 1LL, 2LL, 9LL, 400LL})
      EXPECT_NEAR(middle_term(1, Hurst(h), r), inner_uv(Hurst(h), r), 1e-12 * inner_uv(Hurst(h), r)) << h << ' ' << r;
}

TEST(MiddleTerm, MatchesNestedQuadrature) {
  EXPECT_NEAR(middle_term(2, Hurst(0.9), 0), oracle::middle_nested(2, 0.9, 0), 1e-8);
  for (auto c : kOracleCases)
    for (long long r : kOracleLags)
      EXPECT_NEAR(middle_term(c.q, Hurst(c.h), r), oracle::middle_nested(c.q, c.h, r), 1e-6) << c.h << ' ' << r;
}

TEST(MiddleTerm, LargeLagAsymptotics) {
  const double a = 2 * 2 * 0.9 - 2 * 2;
  EXPECT_NEAR(middle_term(2, Hurst(0.9), 1000) / std::pow(1000.0, a), 1.0, 0.01);
}

TEST(ThirdTerm, ZeroLagClosedForm) {
  EXPECT_NEAR(third_term(2, Hurst(0.9), 0), 2.0 / (0.6 * 1.6), 1e-13);
  EXPECT_NEAR(third_term(2, Hurst(0.9), 0), 2.0833333, 1e-7);
}

TEST(ThirdTerm, MatchesQuadrature) {
  EXPECT_NEAR(third_term(2, Hurst(0.9), 7), oracle::lag_kernel_square(2 * 2 * 0.9 - 4, 7), 1e-8);
  for (auto c : kOracleCases)
    for (long long r : kOracleLags)
      EXPECT_NEAR(third_term(c.q, Hurst(c.h), r), oracle::lag_kernel_square(2 * c.q * c.h - 2 * c.q, r), 1e-6)
          << c.h << ' ' << r;
}

TEST(ThirdTerm, LargeLagAsymptoticsAndDomain) {
  const double a = 2 * 2 * 0.9 - 2 * 2;
  EXPECT_NEAR(third_term(2, Hurst(0.9), 1000) / std::pow(1000.0, a), 1.0, 0.01);
  EXPECT_THROW(third_term(2, Hurst(0.75), 0), std::invalid_argument);
  EXPECT_THROW(third_term(2, Hurst(0.7), 3), std::invalid_argument);
}

TEST(Bracket, ZeroLagFinitePositive) {
  const auto b = bracket(HermiteOrder(2), Hurst(0.9), 0);
  EXPECT_TRUE(std::isfinite(b.bracket));
  EXPECT_GT(b.bracket, 0.0);
  EXPECT_GT(b.t1, 0.0);
  EXPECT_GT(b.t2, 0.0);
  EXPECT_GT(b.t3, 0.0);
  EXPECT_DOUBLE_EQ(b.bracket, b.t1 - 2 * b.t2 + b.t3);
}

TEST(Bracket, TailDecay) {
  const HermiteOrder q(2);
  const Hurst h(0.9);
  const double expo = 2 * 2 - 2 * 2 * 0.9 + 1;  // r^{2q−2qH+1} |bracket| bounded
  double worst = 0.0;
  for (long long r = 100; r <= 10000; r += 100)
    worst = std::max(worst, std::abs(bracket(q, h, r).bracket) * std::pow(static_cast<double>(r), expo));
  EXPECT_LT(worst, 1.0);
  EXPECT_LT(std::abs(bracket(q, h, 10000).bracket), std::abs(bracket(q, h, 100).bracket));
}

TEST(Bracket, AbsoluteSumConverges) {
  BracketTable table(HermiteOrder(2), Hurst(0.9));
  table.ensure(10001);
  double s3 = 0.0, s4 = 0.0;
  for (std::size_t r = 0; r <= 10000; ++r) {
    const double b = std::abs(table.terms()[r].bracket) * (r == 0 ? 1.0 : 2.0);
    s4 += b;
    if (r <= 1000) s3 += b;
  }
  EXPECT_LT(std::abs(s4 - s3), 0.01 * s4);
}

TEST(Bracket, RejectsNonSupercritical) {
  EXPECT_THROW(bracket(HermiteOrder(2), Hurst(0.75), 1), std::invalid_argument);
  EXPECT_THROW(BracketTable(HermiteOrder(3), Hurst(0.8)), std::invalid_argument);
}

TEST(Discrepancy, NormalizedQuantityStabilizes) {
  BracketTable table(HermiteOrder(2), Hurst(0.9));
  double lo = 1e300, hi = 0.0;
  for (int e = 10; e <= 16; ++e) {
    const auto rep = discrepancy(table, std::size_t{1} << e, false);
    lo = std::min(lo, rep.normalized);
    hi = std::max(hi, rep.normalized);
    EXPECT_DOUBLE_EQ(rep.l2_error, 2.0 * rep.delta);
  }
  EXPECT_LE(hi / lo, 1.1);
}

TEST(Discrepancy, FittedSlopeMatchesExponent) {
  BracketTable table(HermiteOrder(2), Hurst(0.9));
  std::vector<std::pair<double, double>> pts;
  for (int e = 8; e <= 16; ++e) {
    const std::size_t n = std::size_t{1} << e;
    pts.emplace_back(static_cast<double>(n), discrepancy(table, n, false).delta);
  }
  EXPECT_NEAR(rate_fit(pts).slope, 2 * 2 - 1 - 2 * 2 * 0.9, 0.05);
}

TEST(Discrepancy, PositiveAtSmallN) {
  const auto rep = discrepancy(HermiteOrder(2), Hurst(0.95), 64);
  EXPECT_GT(rep.delta, 0.0);
  EXPECT_EQ(rep.terms.size(), 64u);
  EXPECT_EQ(rep.terms[5].r, 5);
}

TEST(Discrepancy, ApproachedByNestedGridDistance) {
  // E|S_n − S_N|² → q! delta(n) as N grows, with a finite-N gap that shrinks
  // like (n/N)^{2qH−2q+1} (n = 32). At N = 2^14 the gap is still about 3%;
  // the 2% window is reached from N = 2^16 on.
  const HermiteOrder q(2);
  const Hurst h(0.9);
  const std::size_t n = 32;
  const double target = discrepancy(q, h, n).l2_error;
  const double decay = 2 * 2 * 0.9 - 2 * 2 + 1;
  double prev_gap = 1.0;
  std::vector<double> scaled;
  for (int e = 12; e <= 18; e += 2) {
    const std::size_t big = std::size_t{1} << e;
    const double gap = 1.0 - cross_gram(q, h, n, big) / target;
    EXPECT_GT(gap, 0.0) << e;
    EXPECT_LT(gap, prev_gap) << e;
    prev_gap = gap;
    scaled.push_back(gap / std::pow(double(n) / double(big), decay));
    if (e >= 16) EXPECT_LT(gap, 0.02) << e;
  }
  for (double s : scaled) EXPECT_NEAR(s / scaled.back(), 1.0, 0.1);
}

TEST(CrossGram, ZeroOnIdenticalGridAndDivisibility) {
  EXPECT_EQ(cross_gram(HermiteOrder(2), Hurst(0.9), 64, 64), 0.0);
  EXPECT_THROW(cross_gram(HermiteOrder(2), Hurst(0.9), 48, 1000), std::invalid_argument);
  EXPECT_THROW(cross_gram(HermiteOrder(2), Hurst(0.7), 4, 16), std::invalid_argument);
}

TEST(CrossGram, LagAndGramFormsOfFnNormAgree) {
  for (auto c : kOracleCases) {
    for (std::size_t n : {1u, 7u, 64u, 512u}) {
      const double lag = fn_norm_sq(HermiteOrder(c.q), Hurst(c.h), n);
      const double gram = fn_norm_sq_gram(HermiteOrder(c.q), Hurst(c.h), n);
      EXPECT_NEAR(lag, gram, 1e-10 * lag) << c.q << ' ' << c.h << ' ' << n;
    }
  }
}

TEST(CrossGram, InnerProductOnSameGridIsNorm) {
  const HermiteOrder q(3);
  const Hurst h(0.95);
  EXPECT_NEAR(fn_inner(q, h, 32, 32), fn_norm_sq(q, h, 32), 1e-12);
}

TEST(CrossGram, InnerProductAgainstDirectIncrementCovariances) {
  // (nN)^{q−1} sum_{k,j} ⟨1_{I_k^n}, 1_{I_j^N}⟩^q straight from increment_cov.
  const HermiteOrder q(2);
  const Hurst h(0.85);
  const std::size_t n = 8, big = 64;
  long double s = 0.0L;
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t j = 0; j < big; ++j)
      s += std::pow(static_cast<long double>(
                        increment_cov(h, double(k) / n, double(k + 1) / n, double(j) / big, double(j + 1) / big)),
                    2);
  const double want = std::pow(double(n * big), q - 1.0) * static_cast<double>(s);
  EXPECT_NEAR(fn_inner(q, h, n, big), want, 1e-10 * want);
}

TEST(TvRateCurve, Values) {
  const auto c = tv_rate_curve(HermiteOrder(2), Hurst(0.9), {16, 32, 64});
  EXPECT_NEAR(c[0], std::pow(16.0, -0.15), 1e-15);
  EXPECT_NEAR(c[0], 0.6598, 1e-4);
  EXPECT_GT(c[0], c[1]);
  EXPECT_GT(c[1], c[2]);
  // Near the threshold the exponent vanishes.
  const auto near = tv_rate_curve(HermiteOrder(2), Hurst(0.75 + 1e-9), {1u << 20});
  EXPECT_NEAR(near[0], 1.0, 1e-7);
  EXPECT_THROW(tv_rate_curve(HermiteOrder(2), Hurst(0.75), {4}), std::invalid_argument);
}

TEST(TvRateCurve, ExponentIsOneOverQTimesHalfDeltaSlope) {
  // TV rate exponent = (1/(2q)) x (slope of log delta): the square root of
  // the L² rate, then the 1/q power of the TV bound.
  const HermiteOrder q(2);
  const Hurst h(0.9);
  BracketTable table(q, h);
  std::vector<std::pair<double, double>> delta_pts, tv_pts;
  std::vector<std::size_t> ns;
  for (int e = 8; e <= 14; ++e) ns.push_back(std::size_t{1} << e);
  const auto curve = tv_rate_curve(q, h, ns);
  for (std::size_t i = 0; i < ns.size(); ++i) {
    delta_pts.emplace_back(double(ns[i]), discrepancy(table, ns[i], false).delta);
    tv_pts.emplace_back(double(ns[i]), curve[i]);
  }
  EXPECT_NEAR(rate_fit(delta_pts).slope / (2.0 * q), rate_fit(tv_pts).slope, 0.01);
}
