#include <gtest/gtest.h>

#include <cmath>

#include "hermvar/distances.hpp"
#include "hermvar/malliavin.hpp"
#include "oracles.hpp"

using namespace hermvar;

namespace {

const CriticalSpec kQ2{HermiteOrder(2)};

}  // namespace

TEST(CriticalSpecType, FieldsFromOrder) {
  EXPECT_DOUBLE_EQ(kQ2.h.value(), 0.75);
  EXPECT_NEAR(kQ2.sigma2, 0.5625, 1e-15);
  const CriticalSpec q3{HermiteOrder(3)};
  EXPECT_NEAR(q3.h.value(), 5.0 / 6.0, 1e-15);
  EXPECT_EQ(q3.regime().regime, Regime::Critical);
}

TEST(VarianceSn, HandSumAtFour) {
  const double r1 = static_cast<double>(oracle::rho(0.75, 1));
  const double r2 = static_cast<double>(oracle::rho(0.75, 2));
  const double r3 = static_cast<double>(oracle::rho(0.75, 3));
  const double sum = 4.0 + 2.0 * (3 * r1 * r1 + 2 * r2 * r2 + r3 * r3);
  const double want = 2.0 * sum / (0.5625 * 4.0 * std::log(4.0));
  EXPECT_NEAR(variance_sn(kQ2, 4), want, 1e-14);
  EXPECT_NEAR(one_minus_a_top(kQ2, 4), 1.0 - want, 1e-14);
}

TEST(VarianceSn, TrendAndLogBound) {
  EXPECT_LT(std::abs(variance_sn(kQ2, 1u << 16) - 1.0), std::abs(variance_sn(kQ2, 1u << 8) - 1.0));
  double prev = 1e300;
  for (int e = 1; e <= 16; ++e) {
    const std::size_t n = std::size_t{1} << e;
    const double scaled = std::abs(variance_sn(kQ2, n) - 1.0) * std::log(static_cast<double>(n));
    EXPECT_LE(scaled, prev) << e;
    prev = scaled;
  }
  EXPECT_LT(prev, 3.5);
  EXPECT_THROW(variance_sn(kQ2, 1), std::invalid_argument);
}

TEST(VarianceSn, MatchesMonteCarlo) {
  const std::size_t n = 512, batch = 10000;
  const auto s = sample_zn(kQ2.regime(), n, batch, {5150, 0});
  std::vector<double> sq(batch);
  for (std::size_t i = 0; i < batch; ++i) sq[i] = s.values[i] * s.values[i];
  const auto m = summarize(sq);
  EXPECT_NEAR(m.mean, variance_sn(kQ2, n), 4.0 * m.se);
}

TEST(OneMinusATop, IdentityWithVariance) {
  for (int q : {2, 3}) {
    const CriticalSpec spec{HermiteOrder(q)};
    for (std::size_t n : {2u, 4u, 64u, 1024u, 4096u})
      EXPECT_NEAR(one_minus_a_top(spec, n), 1.0 - variance_sn(spec, n), 1e-10) << q << ' ' << n;
  }
  EXPECT_THROW(one_minus_a_top(kQ2, 0), std::invalid_argument);
}

TEST(OneMinusATop, BoundedTimesLog) {
  for (int e = 6; e <= 16; ++e) {
    const std::size_t n = std::size_t{1} << e;
    EXPECT_LT(std::abs(one_minus_a_top(kQ2, n)) * std::log(static_cast<double>(n)), 3.5) << e;
  }
}

TEST(DsNormSq, ZeroPath) {
  const FgnPath p{kQ2.h, std::vector<double>(16, 0.0)};
  EXPECT_EQ(ds_norm_sq(kQ2, p), 0.0);
}

TEST(DsNormSq, HandEvaluationAtTwo) {
  const FgnPath p{kQ2.h, {1.0, 1.0}};
  const double r1 = static_cast<double>(oracle::rho(0.75, 1));
  const double want = 2.0 / (0.5625 * 2.0 * std::log(2.0)) * (2.0 + 2.0 * r1);
  EXPECT_NEAR(ds_norm_sq(kQ2, p), want, 1e-14);
}

TEST(DsNormSq, FftFormMatchesDirectDoubleSum) {
  const CriticalSpec q3{HermiteOrder(3)};
  for (std::size_t n : {63u, 64u, 200u, 1024u}) {
    const auto p = sample_fgn(q3.h, n, {12, n});
    long double direct = 0.0L;
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t l = 0; l < n; ++l)
        direct += static_cast<long double>(hermite_eval(2, p.xi[k])) * hermite_eval(2, p.xi[l]) *
                  oracle::rho(q3.h.value(), static_cast<long long>(k) - static_cast<long long>(l));
    const double nn = static_cast<double>(n);
    const double want = 3.0 / (q3.sigma2 * nn * std::log(nn)) * static_cast<double>(direct);
    EXPECT_NEAR(ds_norm_sq(q3, p), want, 1e-11 * std::abs(want)) << n;
  }
}

TEST(DsNormSq, MeanEqualsVarianceOfSn) {
  const std::size_t n = 512, batch = 10000;
  const FgnSampler sampler(kQ2.h, n);
  const DsNormEvaluator ds(kQ2, n);
  std::vector<double> v(batch);
  for (std::size_t i = 0; i < batch; ++i) v[i] = ds(sampler.sample({808, i}));
  const auto m = summarize(v);
  EXPECT_NEAR(m.mean, variance_sn(kQ2, n), 3.0 * m.se);
}

TEST(DsNormSq, Errors) {
  EXPECT_THROW(ds_norm_sq(kQ2, FgnPath{Hurst(0.8), {1.0, 2.0}}), std::invalid_argument);
  EXPECT_THROW(ds_norm_sq(kQ2, FgnPath{kQ2.h, {1.0}}), std::invalid_argument);
  const DsNormEvaluator ds(kQ2, 8);
  EXPECT_THROW((void)ds(FgnPath{kQ2.h, std::vector<double>(9, 0.0)}), std::invalid_argument);
}

TEST(BerryEstimate, DegenerateZeroPaths) {
  const std::size_t n = 32;
  const auto b = berry_estimate_from(kQ2, n, 100, {1, 0},
                                     [&](std::size_t) { return FgnPath{kQ2.h, std::vector<double>(n, 0.0)}; });
  EXPECT_EQ(b.mean_sq, 1.0);
  EXPECT_EQ(b.se, 0.0);
  EXPECT_EQ(b.tv_bound, 2.0);
  EXPECT_EQ(b.batch, 100u);
}

TEST(BerryEstimate, RejectsSmallBatch) {
  EXPECT_THROW(berry_estimate(kQ2, 64, 1, {1, 0}), std::invalid_argument);
  EXPECT_THROW(berry_estimate(kQ2, 64, 99, {1, 0}), std::invalid_argument);
}

TEST(BerryEstimate, DeterministicAndThreadIndependent) {
  BerryOptions one;
  one.threads = 1;
  BerryOptions four;
  four.threads = 4;
  const auto a = berry_estimate(kQ2, 128, 300, {9, 0}, one);
  const auto b = berry_estimate(kQ2, 128, 300, {9, 0}, four);
  EXPECT_EQ(a.mean_sq, b.mean_sq);
  EXPECT_EQ(a.se, b.se);
  EXPECT_EQ(a.tv_bound, b.tv_bound);
  EXPECT_GE(a.mean_sq, 0.0);
  EXPECT_DOUBLE_EQ(a.tv_bound, 2.0 * std::sqrt(a.mean_sq));
}

TEST(BerryEstimate, AntitheticPairsShareTheDeficit) {
  // H_1 is odd, so ‖DS_n‖² is even in the path: antithetic pairs repeat.
  BerryOptions opts;
  opts.antithetic = true;
  const auto b = berry_estimate(kQ2, 64, 200, {3, 0}, opts);
  const FgnSampler sampler(kQ2.h, 64);
  const DsNormEvaluator ds(kQ2, 64);
  std::vector<double> v;
  for (std::size_t i = 0; i < 200; i += 2) {
    const double d = ds(sampler.sample({3, i}));
    v.push_back((1 - d) * (1 - d));
    v.push_back((1 - d) * (1 - d));
  }
  EXPECT_NEAR(b.mean_sq, summarize(v).mean, 1e-12);
}

TEST(BerryEstimate, DecreasingTrendAndRatioWindow) {
  const std::size_t batch = 2000;
  const auto lo = berry_estimate(kQ2, 64, batch, {2024, 0});
  const auto hi = berry_estimate(kQ2, 4096, batch, {2024, 0});
  EXPECT_LT(hi.tv_bound, lo.tv_bound);
  const double ratio = hi.tv_bound / lo.tv_bound;
  EXPECT_GE(ratio, 0.5 * std::sqrt(6.0 / 12.0));
  EXPECT_LE(ratio, 1.0);
}

TEST(BerryEstimate, DominatesKolmogorovDistance) {
  for (std::size_t n : {256u, 1024u}) {
    const std::size_t batch = 10000;
    const auto b = berry_estimate(kQ2, n, 2000, {41, 0});
    const auto z = sample_zn(kQ2.regime(), n, batch, {42, 0});
    const double ks = ks_distance(z, standard_normal_cdf);
    const double ks_se = 0.27 / std::sqrt(static_cast<double>(batch));
    EXPECT_LE(ks, b.tv_bound + 4.0 * ks_se) << n;
  }
}
