#include <doctest.h>

#include <cmath>
#include <limits>
#include <stdexcept>

#include "lpball/rng.hpp"
#include "lpball/scalar_prox.hpp"

using lpball::prox_constants;
using lpball::prox_scalar;
using lpball::ProxBranch;
using lpball::ProxValue;

namespace {

double objective(double x, double y, double mu, double p) {
  return 0.5 * (x - y) * (x - y) + mu / p * std::pow(std::fabs(x), p);
}

double stationarity_residual(double x, double y, double mu, double p) {
  return std::fabs(x - y + mu * std::pow(x, p - 1.0));
}

// Independent root check: plain bisection on x - y + mu*x^(p-1).
double bisect_root(double y, double mu, double p, double lo, double hi) {
  auto f = [&](double x) { return x - y + mu * std::pow(x, p - 1.0); };
  for (int i = 0; i < 200; ++i) {
    const double m = 0.5 * (lo + hi);
    (f(m) > 0.0 ? hi : lo) = m;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("newton_root closed-form cases") {
  CHECK(lpball::newton_root(5.0, 0.0, 3.0) == 5.0);
  // x^2 + x - 2 = (x + 2)(x - 1): positive root 1.
  CHECK(lpball::newton_root(2.0, 1.0, 3.0) == doctest::Approx(1.0).epsilon(1e-13));

  const double z = lpball::newton_root(10.0, 2.0, 0.5);
  CHECK(stationarity_residual(z, 10.0, 2.0, 0.5) <= 1e-12 * 11.0);
  const double m_half = prox_constants(0.5).m_p * std::pow(2.0, 1.0 / 1.5);
  CHECK(z > m_half);
  CHECK(z < 10.0);
  CHECK(z == doctest::Approx(bisect_root(10.0, 2.0, 0.5, m_half, 10.0)).epsilon(1e-12));
}

TEST_CASE("newton_root domain errors") {
  CHECK_THROWS_AS((void)lpball::newton_root(1.0, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS((void)lpball::newton_root(1.0, 1.0, 2.0), std::invalid_argument);
  CHECK_THROWS_AS((void)lpball::newton_root(-1.0, 1.0, 3.0), std::invalid_argument);
  CHECK_THROWS_AS((void)lpball::newton_root(1.0, -1.0, 3.0), std::invalid_argument);
  CHECK_THROWS_AS((void)lpball::newton_root(std::nan(""), 1.0, 3.0), std::invalid_argument);
}

TEST_CASE("prox_scalar pinned examples") {
  ProxValue a = prox_scalar(4.0, 1.0, 2.0);
  CHECK(a.primary == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(a.branch == ProxBranch::Interior);

  CHECK(prox_scalar(3.0, 1.0, 1.0).primary == doctest::Approx(2.0));
  CHECK(prox_scalar(0.5, 1.0, 1.0).primary == 0.0);
  CHECK(prox_scalar(-3.0, 1.0, 1.0).primary == doctest::Approx(-2.0));

  ProxValue z = prox_scalar(1.0, 1.0, 0.5);
  CHECK(z.primary == 0.0);
  CHECK(z.branch == ProxBranch::Zero);
  CHECK_FALSE(z.has_alternate);

  CHECK(prox_scalar(0.0, 3.0, 0.7).primary == 0.0);
  CHECK(prox_scalar(-2.5, 0.0, 0.7).primary == -2.5);
}

TEST_CASE("prox_scalar domain errors") {
  CHECK_THROWS_AS((void)prox_scalar(1.0, -0.5, 2.0), std::invalid_argument);
  CHECK_THROWS_AS((void)prox_scalar(1.0, 1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS((void)prox_scalar(1.0, 1.0, -1.0), std::invalid_argument);
  const double inf = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS((void)prox_scalar(inf, 1.0, 2.0), std::invalid_argument);
}

TEST_CASE("threshold constants at p = 1/2 and limiting behavior") {
  const lpball::ProxConstants c = prox_constants(0.5);
  CHECK(c.m_p == doctest::Approx(0.6299605249474366).epsilon(1e-14));
  CHECK(c.k_p == doctest::Approx(1.5874010519681994).epsilon(1e-14));
  CHECK(c.r_p == doctest::Approx(2.3811015779522993).epsilon(1e-14));
  CHECK(c.m_p > 0.0);
  CHECK(c.m_p < c.k_p);
  CHECK(c.r_p > c.k_p);

  // r_p -> 1 as p -> 1 from below.
  CHECK(prox_constants(0.999999).r_p == doctest::Approx(1.0).epsilon(1e-4));

  // r_p / sqrt(2/p) approaches 1 from above as p -> 0.
  const double ratio_01 = prox_constants(0.1).r_p / std::sqrt(2.0 / 0.1);
  const double ratio_001 = prox_constants(0.01).r_p / std::sqrt(2.0 / 0.01);
  CHECK(std::fabs(ratio_01 - 1.0) < 0.25);
  CHECK(std::fabs(ratio_001 - 1.0) < std::fabs(ratio_01 - 1.0));

  CHECK_THROWS_AS((void)prox_constants(1.0), std::invalid_argument);
  CHECK_THROWS_AS((void)prox_constants(0.0), std::invalid_argument);
}

TEST_CASE("root finder hits kappa_p at the tie input") {
  // At unit weight the nonzero prox branch evaluated at y = r_p equals k_p.
  for (double p : {0.3, 0.5, 0.7, 0.9}) {
    const lpball::ProxConstants c = prox_constants(p);
    CHECK(std::fabs(lpball::newton_root(c.r_p, 1.0, p) - c.k_p) <= 1e-12);
  }
}

TEST_CASE("tie behavior straddling the p < 1 threshold") {
  const lpball::ProxConstants c = prox_constants(0.5);
  // Slightly below the threshold the zero branch wins, slightly above the
  // interior root wins; inside the 1e-12 band both are reported.
  CHECK(prox_scalar(c.r_p * (1.0 - 1e-6), 1.0, 0.5).branch == ProxBranch::Zero);
  ProxValue above = prox_scalar(c.r_p * (1.0 + 1e-6), 1.0, 0.5);
  CHECK(above.branch == ProxBranch::Interior);
  CHECK(above.primary == doctest::Approx(c.k_p).epsilon(1e-4));

  ProxValue tie = prox_scalar(c.r_p, 1.0, 0.5);
  CHECK(tie.branch == ProxBranch::Tie);
  CHECK(tie.has_alternate);
  CHECK(tie.alternate == 0.0);
  CHECK(tie.primary == doctest::Approx(c.k_p).epsilon(1e-9));
  // Both elements achieve the same objective value.
  CHECK(objective(tie.primary, c.r_p, 1.0, 0.5) ==
        doctest::Approx(objective(0.0, c.r_p, 1.0, 0.5)).epsilon(1e-10));
}

TEST_CASE("hard-threshold limit for vanishing p") {
  const double p = 1e-18;
  const double mu = 1.0;
  const double cut = std::sqrt(2.0 * mu / p);
  ProxValue below = prox_scalar(0.5 * cut, mu, p);
  CHECK(below.branch == ProxBranch::HardThresholdLimit);
  CHECK(below.primary == 0.0);
  ProxValue above = prox_scalar(2.0 * cut, mu, p);
  CHECK(above.branch == ProxBranch::HardThresholdLimit);
  CHECK(above.primary == 2.0 * cut);
}

TEST_CASE("stationarity of every nonzero prox over random triples") {
  lpball::SplitMix64 gen(777);
  for (int i = 0; i < 3000; ++i) {
    double p = 5.0 * gen.next_uniform();
    if (std::fabs(p - 1.0) < 1e-9 || std::fabs(p - 2.0) < 1e-9 || p < 1e-6) continue;
    const double y = 100.0 * gen.next_uniform();
    const double mu = i % 97 == 0 ? 0.0 : 100.0 * gen.next_uniform();
    ProxValue v = prox_scalar(y, mu, p);
    CHECK(v.primary >= 0.0);
    CHECK(v.primary <= y);
    if (v.primary > 0.0 && v.branch != ProxBranch::HardThresholdLimit) {
      CHECK(stationarity_residual(v.primary, y, mu, p) <= 1e-10 * (1.0 + y));
    }
  }
}

TEST_CASE("moreau route keeps stationarity accurate under cancellation") {
  // 1 < p < 2 with weight >> input: the conjugate-prox subtraction nearly
  // cancels, which the final polish must absorb.
  for (double mu : {10.0, 100.0, 1e4, 1e6}) {
    for (double y : {0.1, 1.0, 7.3}) {
      ProxValue v = prox_scalar(y, mu, 1.5);
      if (v.primary > 0.0) {
        CHECK(stationarity_residual(v.primary, y, mu, 1.5) <= 1e-10 * (1.0 + y));
      }
    }
  }
  // Deep underflow: the safeguarded closed form takes over.
  ProxValue tiny = prox_scalar(1.0, 1e9, 1.5);
  CHECK(tiny.primary == doctest::Approx(1e-18).epsilon(1e-10));
  CHECK(stationarity_residual(tiny.primary, 1.0, 1e9, 1.5) <= 1e-10 * 2.0);
}

TEST_CASE("prox scaling identity") {
  lpball::SplitMix64 gen(4242);
  int tested = 0;
  while (tested < 400) {
    double p = 5.0 * gen.next_uniform();
    if (p < 0.05 || std::fabs(p - 2.0) < 0.25) continue;
    const double y = 100.0 * gen.next_uniform();
    const double mu = 0.01 + 100.0 * gen.next_uniform();
    const double s = std::pow(mu, 1.0 / (2.0 - p));
    if (!std::isfinite(s) || s == 0.0) continue;
    const double lhs = prox_scalar(y, mu, p).primary;
    const double rhs = s * prox_scalar(y / s, 1.0, p).primary;
    // The scaled call meets an absolute residual tolerance in its own units,
    // so its error bound returns multiplied by s.
    CHECK(std::fabs(lhs - rhs) <= 1e-10 * (1.0 + std::fabs(lhs)) + 1e-14 * (y + s));
    ++tested;
  }
}

TEST_CASE("max prox element is nonincreasing in the weight") {
  for (double p : {0.4, 0.8, 1.3, 2.5, 4.0}) {
    const double y = 3.7;
    double prev = prox_scalar(y, 0.0, p).primary;
    for (double mu = 0.125; mu <= 64.0; mu *= 2.0) {
      const double cur = prox_scalar(y, mu, p).primary;
      CHECK(cur <= prev + 1e-12);
      prev = cur;
    }
  }
}

TEST_CASE("outputs near p = 1 agree with the soft threshold") {
  for (double y = 0.0; y <= 10.0; y += 0.25) {
    const double soft = std::max(0.0, y - 1.0);
    CHECK(std::fabs(prox_scalar(y, 1.0, 0.999).primary - soft) <= 1e-2);
    CHECK(std::fabs(prox_scalar(y, 1.0, 1.001).primary - soft) <= 1e-2);
  }
}
