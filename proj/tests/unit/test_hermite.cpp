#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "hermvar/hermite.hpp"
#include "hermvar/montecarlo.hpp"
#include "oracles.hpp"

using namespace hermvar;

TEST(HermiteEval, LowOrderClosedForms) {
  EXPECT_DOUBLE_EQ(hermite_eval(2, 2.0), 3.0);
  EXPECT_DOUBLE_EQ(hermite_eval(3, 2.0), 2.0);
  for (double x : {-7.5, -1.0, 0.0, 0.3, 2.0, 9.1}) {
    EXPECT_DOUBLE_EQ(hermite_eval(0, x), 1.0);
    EXPECT_DOUBLE_EQ(hermite_eval(1, x), x);
    EXPECT_NEAR(hermite_eval(2, x), x * x - 1.0, 1e-12 * (1 + x * x));
    EXPECT_NEAR(hermite_eval(3, x), x * x * x - 3.0 * x, 1e-12 * (1 + std::abs(x * x * x)));
  }
}

TEST(HermiteEval, FifthOrderExpansion) {
  const double x = 1.3;
  EXPECT_NEAR(hermite_eval(5, x), std::pow(x, 5) - 10 * std::pow(x, 3) + 15 * x, 1e-12);
}

TEST(HermiteEval, Parity) {
  for (int q = 0; q <= 16; ++q) {
    for (double x = -10.0; x <= 10.0; x += 0.25) {
      const double a = hermite_eval(q, -x);
      const double b = (q % 2 ? -1.0 : 1.0) * hermite_eval(q, x);
      EXPECT_NEAR(a, b, 1e-12 * (1.0 + std::abs(b))) << "q=" << q << " x=" << x;
    }
  }
  EXPECT_THROW(hermite_eval(-1, 0.0), std::invalid_argument);
}

TEST(HermiteOrder, Bounds) {
  EXPECT_THROW(HermiteOrder(1), std::invalid_argument);
  EXPECT_THROW(HermiteOrder(17), std::invalid_argument);
  EXPECT_EQ(HermiteOrder(16).value(), 16);
}

TEST(HermiteTransform, ZeroPath) {
  const FgnPath zeros{Hurst(0.5), std::vector<double>(5, 0.0)};
  for (double v : hermite_transform(HermiteOrder(2), zeros)) EXPECT_DOUBLE_EQ(v, -1.0);
  for (double v : hermite_transform(HermiteOrder(3), zeros)) EXPECT_DOUBLE_EQ(v, 0.0);
}

TEST(HermiteTransform, CenteredUnderStandardNormal) {
  const std::size_t batch = 100000;
  std::mt19937_64 eng(17);
  std::normal_distribution<double> g;
  FgnPath p{Hurst(0.5), std::vector<double>(batch)};
  for (auto& x : p.xi) x = g(eng);
  for (int q : {2, 3, 4, 5}) {
    const auto t = hermite_transform(HermiteOrder(q), p);
    const auto s = summarize(t);
    EXPECT_NEAR(s.mean, 0.0, 4.0 * s.se) << q;
  }
}

TEST(HermiteTransform, OrthogonalityUpToSixthOrder) {
  const std::size_t batch = 100000;
  std::mt19937_64 eng(23);
  std::normal_distribution<double> g;
  std::vector<double> xs(batch);
  for (auto& x : xs) x = g(eng);
  for (int p = 0; p <= 6; ++p) {
    for (int q = 0; q <= 6; ++q) {
      std::vector<double> prod(batch);
      for (std::size_t i = 0; i < batch; ++i) prod[i] = hermite_eval(p, xs[i]) * hermite_eval(q, xs[i]);
      const auto s = summarize(prod);
      const double target = p == q ? oracle::factorial(q) : 0.0;
      EXPECT_NEAR(s.mean, target, 4.0 * s.se + 1e-12) << "p=" << p << " q=" << q;
    }
  }
}
