#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <random>
#include <stdexcept>
#include <vector>

#include "mapleja/maps.hpp"

using mapleja::ConformalMap;

namespace {

// Independent sausage: arcsin Maclaurin coefficients from Gamma functions.
std::complex<double> sausage_oracle(int d, std::complex<double> z) {
  std::complex<double> num = 0.0;
  double den = 0.0;
  for (int i = 0; i <= d; ++i) {
    const double c = std::tgamma(2.0 * i + 1) /
                     (std::pow(4.0, i) * std::pow(std::tgamma(i + 1.0), 2) * (2.0 * i + 1));
    num += c * std::pow(z, 2 * i + 1);
    den += c;
  }
  return num / den;
}

double gain_oracle(int d, double eps) {
  const int samples = 8192;
  auto inside = [&](double r) {
    for (int k = 0; k < samples; ++k) {
      const double th = 2.0 * M_PI * k / samples;
      const std::complex<double> z(0.5 * (r + 1 / r) * std::cos(th), 0.5 * (r - 1 / r) * std::sin(th));
      const auto w = sausage_oracle(d, z);
      const double dx = std::abs(w.real()) > 1 ? std::abs(w.real()) - 1 : 0.0;
      if (std::hypot(dx, w.imag()) > eps) return false;
    }
    return true;
  };
  double lo = 1.0, hi = 100.0;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    (inside(mid) ? lo : hi) = mid;
  }
  return std::log(lo) / std::log(eps + std::sqrt(1 + eps * eps)) - 1.0;
}

std::vector<ConformalMap> all_maps() {
  return {ConformalMap::identity(), ConformalMap::sausage(1), ConformalMap::sausage(3),
          ConformalMap::sausage(9), ConformalMap::sausage(15), ConformalMap::kte(0.2),
          ConformalMap::kte(0.5), ConformalMap::kte(0.9)};
}

}  // namespace

TEST(Maps, SausageOrderOneAtHalf) {
  const auto g = ConformalMap::sausage(1);
  EXPECT_NEAR(g.forward(0.5), sausage_oracle(1, 0.5).real(), 1e-15);
  EXPECT_NEAR(g.forward(0.5), (6 * 0.5 + 0.125) / 7.0, 1e-15);
}

TEST(Maps, SausageMatchesOracle) {
  for (int d : {1, 3, 9, 15})
    for (int k = 0; k <= 50; ++k) {
      const double y = -1.0 + 2.0 * k / 50;
      EXPECT_NEAR(ConformalMap::sausage(d).forward(y), sausage_oracle(d, y).real(), 1e-14);
    }
}

TEST(Maps, EndpointNormalization) {
  EXPECT_EQ(ConformalMap::sausage(9).forward(1.0), 1.0);
  EXPECT_EQ(ConformalMap::sausage(9).forward(-1.0), -1.0);
  EXPECT_EQ(ConformalMap::kte(0.7).forward(1.0), 1.0);
}

TEST(Maps, KteAtHalf) {
  EXPECT_NEAR(ConformalMap::kte(0.5).forward(0.5), std::asin(0.25) / std::asin(0.5), 1e-15);
  EXPECT_NEAR(ConformalMap::kte(0.5).forward(0.5), 0.48258374, 1e-8);
}

TEST(Maps, InverseExamples) {
  EXPECT_EQ(ConformalMap::identity().inverse(0.37), 0.37);
  const auto s9 = ConformalMap::sausage(9);
  EXPECT_NEAR(s9.inverse(s9.forward(0.8)), 0.8, 1e-12);
  const auto s1 = ConformalMap::sausage(1);
  EXPECT_NEAR(s1.inverse(s1.forward(0.5)), 0.5, 1e-6);
  EXPECT_NEAR(s1.inverse((6 * 0.5 + 0.125) / 7.0), 0.5, 1e-6);
}

TEST(Maps, InverseResidual) {
  for (const auto& g : all_maps())
    for (int k = 0; k <= 2000; ++k) {
      const double t = -1.0 + 2.0 * k / 2000;
      EXPECT_LE(std::abs(g.forward(g.inverse(t)) - t), 1e-13);
    }
}

TEST(Maps, DomainErrors) {
  for (const auto& g : all_maps()) {
    EXPECT_THROW(g.forward(1.0001), std::domain_error);
    EXPECT_THROW(g.inverse(-1.5), std::domain_error);
  }
  EXPECT_THROW(ConformalMap::sausage(2), mapleja::ContractError);
  EXPECT_THROW(ConformalMap::kte(1.0), mapleja::ContractError);
}

TEST(Maps, OddnessAndEndpoints) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (const auto& g : all_maps()) {
    EXPECT_EQ(g.forward(1.0), 1.0);
    EXPECT_EQ(g.forward(-1.0), -1.0);
    EXPECT_EQ(g.forward(0.0), 0.0);
    for (int k = 0; k < 1000; ++k) {
      const double y = u(rng);
      EXPECT_LE(std::abs(g.forward(-y) + g.forward(y)), 1e-15);
      EXPECT_LE(std::abs(g.forward(y)), 1.0);
    }
  }
}

TEST(Maps, StrictlyIncreasing) {
  const double h = 1e-6;
  for (const auto& g : all_maps())
    for (int k = 0; k <= 1998; ++k) {
      const double y = -0.999 + k * 0.001;
      EXPECT_GT((g.forward(y + h) - g.forward(y - h)) / (2 * h), 0.0);
      EXPECT_NEAR(g.derivative(y), (g.forward(y + h) - g.forward(y - h)) / (2 * h), 1e-6);
    }
}

TEST(Maps, ComplexContinuationAgreesOnRealAxis) {
  for (const auto& g : all_maps())
    for (int k = 0; k <= 20; ++k) {
      const double y = -1.0 + k * 0.1;
      EXPECT_NEAR(g.forward(std::complex<double>(y, 0.0)).real(), g.forward(y), 1e-14);
    }
  EXPECT_NEAR(std::abs(ConformalMap::sausage(9).forward(std::complex<double>(0.3, 0.4)) -
                       sausage_oracle(9, {0.3, 0.4})),
              0.0, 1e-14);
}

TEST(Gain, IdentityIsZero) {
  for (double eps : {0.01, 0.5, 3.0}) EXPECT_EQ(mapleja::estimate_gain(ConformalMap::identity(), eps), 0.0);
}

TEST(Gain, SausagePositiveAtModerateEps) {
  EXPECT_GT(mapleja::estimate_gain(ConformalMap::sausage(9), 0.3294), 0.0);
}

TEST(Gain, MatchesIndependentBisection) {
  for (double eps : {0.1, 0.3294, 0.7, 10.0})
    EXPECT_NEAR(mapleja::estimate_gain(ConformalMap::sausage(9), eps), gain_oracle(9, eps), 5e-3)
        << "eps=" << eps;
}

TEST(Gain, NoGainForHugeAnalyticityRegion) {
  // A degree-19 polynomial map cannot keep a large ellipse inside a large
  // neighborhood, so the map does not help (the gain is in fact negative).
  EXPECT_LE(mapleja::estimate_gain(ConformalMap::sausage(9), 10.0), 0.05);
}

TEST(Gain, MonotoneNonIncreasing) {
  double prev = 1e300;
  for (int k = 0; k < 20; ++k) {
    const double eps = 0.05 + (2.0 - 0.05) * k / 19.0;
    const double g = mapleja::estimate_gain(ConformalMap::sausage(9), eps);
    EXPECT_LE(g, prev + 0.02) << "eps=" << eps;
    prev = g;
  }
}

TEST(Gain, KteBranchPointLimitsEllipse) {
  const auto g = ConformalMap::kte(0.9);
  // E_r touches the branch point 1/alpha when (r + 1/r)/2 = 1/alpha.
  const double r_branch = 1 / 0.9 + std::sqrt(1 / 0.81 - 1);
  const double gain = mapleja::estimate_gain(g, 5.0);
  EXPECT_LE(gain, std::log(r_branch) / std::log(5.0 + std::sqrt(26.0)) - 1.0 + 1e-9);
}
