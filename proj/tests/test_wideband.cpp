#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "lprelay/wideband.hpp"

using namespace lprelay;

namespace {

// I(X; X + Z) for X = +-a equiprobable and circular complex Z of variance s2,
// by trapezoid integration over the real part of Y (the imaginary part carries
// no information).
double bpsk_mi(double a, double s2) {
  const double s = std::sqrt(s2 / 2.0);
  const int n = 40001;
  const double lo = a - 14.0 * s, hi = a + 14.0 * s;
  const double h = (hi - lo) / (n - 1);
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    const double y = lo + h * i;
    const double pdf = std::exp(-0.5 * (y - a) * (y - a) / (s * s)) / (std::sqrt(2.0 * std::numbers::pi) * s);
    const double t = -2.0 * a * y / (s * s);
    const double soft = t > 30.0 ? t : std::log1p(std::exp(t));
    acc += (i == 0 || i == n - 1 ? 0.5 : 1.0) * pdf * soft;
  }
  return std::log(2.0) - h * acc;
}

// E over a uniform phase of log(A + b cos(phi)) = log((A + sqrt(A^2 - b^2)) / 2).
double mean_log_cos(double a, double b) { return std::log(0.5 * (a + std::sqrt(a * a - b * b))); }

}  // namespace

TEST(GaussianScaledMi, HandValuesAndDomain) {
  EXPECT_NEAR(gaussian_scaled_mi(1.0, 1.0, 1.0), std::log(2.0), 1e-15);
  EXPECT_NEAR(gaussian_scaled_mi(3.0, 2.0, 0.5), 0.5 * std::log(4.0), 1e-15);
  EXPECT_DOUBLE_EQ(gaussian_scaled_mi(0.0, 1.0, 10.0), 0.0);
  EXPECT_THROW(gaussian_scaled_mi(1.0, 1.0, 0.0), DomainError);
  EXPECT_THROW(gaussian_scaled_mi(1.0, -1.0, 1.0), DomainError);
  EXPECT_THROW(gaussian_scaled_mi(-1.0, 1.0, 1.0), DomainError);
}

TEST(ConstantPhaseLimit, ConvergesMonotonically) {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> pw(0.1, 5.0);
  for (int t = 0; t < 50; ++t) {
    ChannelVector c{Complex{g(rng), g(rng)}, Complex{g(rng), g(rng)}};
    const double p = pw(rng), n0 = pw(rng);
    const auto cov = aligned_covariance(c, p);
    const auto rep = check_limit_constant_phase(c, cov, n0, default_bandwidths());
    // c^H (P c c^H / |c|^2) c = P |c|^2
    const double target = p * c.norm_sq() / n0;
    EXPECT_NEAR(rep.target, target, 1e-12 * target);
    EXPECT_TRUE(rep.converged);
    EXPECT_LT(rep.abs_err(4), 1e-3 * target);
    for (std::size_t i = 1; i < rep.bandwidths.size(); ++i) EXPECT_LT(rep.abs_err(i), rep.abs_err(i - 1));
    // Below the limit at every bandwidth since log1p(x) < x.
    for (double v : rep.scaled_mi) EXPECT_LT(v, target);
  }
}

TEST(ConstantPhaseLimit, DiagonalInputs) {
  ChannelVector c{Complex{1, 1}, Complex{0, 2}};
  const auto rep = check_limit_constant_phase(c, std::vector<double>{0.5, 0.25}, 1.0, {1e2, 1e6});
  EXPECT_NEAR(rep.target, 2.0 * 0.5 + 4.0 * 0.25, 1e-14);
  EXPECT_NEAR(rep.scaled_mi[0], 1e2 * std::log1p(2.0 / 1e2), 1e-12);
}

TEST(ConstantPhaseLimit, InputErrors) {
  ChannelVector c{Complex{1, 0}, Complex{0, 0}};
  EXPECT_THROW(check_limit_constant_phase(c, HermitianMatrix::diagonal({1, -1}), 1.0, {1.0}), DomainError);
  EXPECT_THROW(check_limit_constant_phase(c, HermitianMatrix::identity(2), 1.0, {10.0, 1.0}), DomainError);
  EXPECT_THROW(check_limit_constant_phase(c, HermitianMatrix::identity(2), 1.0, {}), DomainError);
  EXPECT_THROW(check_limit_constant_phase(c, HermitianMatrix::identity(3), 1.0, {1.0}), DomainError);
}

TEST(PhaseFadingLimit, SingleAntennaIsExact) {
  const auto rep = check_limit_phase_fading({0.7}, std::vector<double>{2.0}, 1.0, {10.0, 1e5}, 3, 1);
  EXPECT_NEAR(rep.scaled_mi[0], 10.0 * std::log1p(0.98 / 10.0), 1e-13);
  EXPECT_NEAR(rep.target, 0.98, 1e-15);
  EXPECT_EQ(rep.std_error, 0.0);
}

TEST(PhaseFadingLimit, CorrelatedInputsMatchClosedFormMean) {
  // Two antennas with correlation s12: the received power is a + b cos(phi) with
  // phi uniform, a = |c1|^2 S11 + |c2|^2 S22, b = 2 |c1||c2||S12|.
  const std::vector<double> mags{1.3, 0.6};
  Eigen::MatrixXcd s(2, 2);
  s << 2.0, Complex{0.6, 0.5}, Complex{0.6, -0.5}, 1.0;
  const HermitianMatrix cov(s);
  const double a = 1.69 * 2.0 + 0.36 * 1.0;
  const double b = 2.0 * 1.3 * 0.6 * std::abs(Complex{0.6, 0.5});
  for (double bw : {1.0, 10.0}) {
    const auto rep = check_limit_phase_fading(mags, cov, 1.0, {bw}, 20000, 5);
    const double exact = bw * mean_log_cos(1.0 + a / bw, b / bw);
    EXPECT_NEAR(rep.scaled_mi[0], exact, 4.0 * rep.std_error + 1e-12) << "bw " << bw;
    EXPECT_GT(rep.std_error, 0.0);
  }
  const auto rep = check_limit_phase_fading(mags, cov, 1.0, default_bandwidths(), 2000, 5);
  EXPECT_NEAR(rep.target, a, 1e-12);
  EXPECT_TRUE(rep.converged);
}

TEST(PhaseFadingLimit, DeterministicForASeed) {
  const std::vector<double> mags{1.0, 0.5, 0.2};
  const auto r1 = check_limit_phase_fading(mags, std::vector<double>{1, 1, 1}, 1.0, {1.0, 10.0}, 100, 42);
  const auto r2 = check_limit_phase_fading(mags, std::vector<double>{1, 1, 1}, 1.0, {1.0, 10.0}, 100, 42);
  EXPECT_EQ(r1.scaled_mi, r2.scaled_mi);
}

TEST(GaussHermite, IntegratesPolynomials) {
  const auto gh = gauss_hermite(20);
  // integral t^{2k} exp(-t^2) = Gamma(k + 1/2)
  for (int k = 0; k < 10; ++k) {
    double s = 0.0;
    for (std::size_t i = 0; i < gh.nodes.size(); ++i) s += gh.weights[i] * std::pow(gh.nodes[i], 2 * k);
    EXPECT_NEAR(s, std::tgamma(k + 0.5), 1e-10 * std::tgamma(k + 0.5));
  }
}

TEST(ConditionalLimits, BpskMatchesIndependentIntegration) {
  // U = X, so I(X;Y) = I(U;Y) and I(X;Y|U) = 0.
  const double amp = 1.0;
  DiscreteJoint j{{{0, {Complex{amp, 0}}, 0.5}, {1, {Complex{-amp, 0}}, 0.5}}};
  ChannelVector c{Complex{1, 0}};
  const std::vector<double> bws{0.5, 2.0, 10.0};
  const auto r = check_conditional_limits(j, c, c, 1.0, bws);
  EXPECT_TRUE(r.quadrature);
  for (std::size_t i = 0; i < bws.size(); ++i) {
    const double ref = bws[i] * bpsk_mi(amp, bws[i]);
    EXPECT_NEAR(r.x_y1.scaled_mi[i], ref, 1e-6 * std::max(ref, 1e-3)) << "bw " << bws[i];
    EXPECT_NEAR(r.u_y1.scaled_mi[i], r.x_y1.scaled_mi[i], 1e-9);
    EXPECT_NEAR(r.x_y1_given_u.scaled_mi[i], 0.0, 1e-12);
  }
  EXPECT_TRUE(r.chain_holds());
}

TEST(ConditionalLimits, TargetsAndConvergence) {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> g;
  for (int t = 0; t < 10; ++t) {
    DiscreteJoint j;
    const int k = 6;
    for (int i = 0; i < k; ++i)
      j.atoms.push_back({i % 3, {Complex{g(rng), g(rng)}, Complex{g(rng), g(rng)}}, 1.0 / k});
    ChannelVector c1{Complex{g(rng), g(rng)}, Complex{g(rng), g(rng)}};
    ChannelVector c2{Complex{g(rng), g(rng)}, Complex{g(rng), g(rng)}};
    const auto r = check_conditional_limits(j, c1, c2, 1.0, default_bandwidths());

    // Variance of c1^H X and its U-conditional average, by direct enumeration.
    auto proj = [&](const DiscreteAtom& a) { return std::conj(c1[0]) * a.x[0] + std::conj(c1[1]) * a.x[1]; };
    Complex mean{};
    for (const auto& a : j.atoms) mean += a.p * proj(a);
    double var = 0.0;
    for (const auto& a : j.atoms) var += a.p * std::norm(proj(a) - mean);
    double cond = 0.0;
    for (int u = 0; u < 3; ++u) {
      double pu = 0.0;
      Complex mu{};
      for (const auto& a : j.atoms)
        if (a.u == u) {
          pu += a.p;
          mu += a.p * proj(a);
        }
      mu /= pu;
      for (const auto& a : j.atoms)
        if (a.u == u) cond += a.p * std::norm(proj(a) - mu);
    }
    EXPECT_NEAR(r.x_y1.target, var, 1e-12 * var);
    EXPECT_NEAR(r.x_y1_given_u.target, cond, 1e-12 * std::max(1.0, cond));
    EXPECT_NEAR(r.u_y1.target, var - cond, 1e-12 * std::max(1.0, var));
    EXPECT_TRUE(r.x_y1.converged);
    EXPECT_TRUE(r.u_y1.converged);
    EXPECT_TRUE(r.x_y1_given_u.converged);
    EXPECT_TRUE(r.x_y2_given_u.converged);
    EXPECT_TRUE(r.chain_holds());
    EXPECT_LT(r.x_y1.abs_err(4), r.x_y1.abs_err(0));
  }
}

TEST(ConditionalLimits, MonteCarloPathForLargeSupport) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> g;
  DiscreteJoint j;
  const int k = 24;
  for (int i = 0; i < k; ++i) j.atoms.push_back({i % 4, {Complex{g(rng), g(rng)}, Complex{g(rng), g(rng)}}, 1.0 / k});
  ChannelVector c{Complex{0.8, 0.1}, Complex{-0.3, 0.5}};
  const auto r = check_conditional_limits(j, c, c, 1.0, {10.0, 1e3, 1e5}, 99);
  EXPECT_FALSE(r.quadrature);
  EXPECT_TRUE(r.chain_holds());
  EXPECT_TRUE(r.x_y1.converged);
  EXPECT_GT(r.x_y1.std_error, 0.0);
  const auto again = check_conditional_limits(j, c, c, 1.0, {10.0, 1e3, 1e5}, 99);
  EXPECT_EQ(r.x_y1.scaled_mi, again.x_y1.scaled_mi);
}

TEST(ConditionalLimits, InputErrors) {
  DiscreteJoint bad{{{0, {Complex{1, 0}}, 0.7}}};
  EXPECT_THROW(check_conditional_limits(bad, ChannelVector{Complex{1, 0}}, ChannelVector{Complex{1, 0}}, 1.0, {1.0}),
               DomainError);
  DiscreteJoint ok{{{0, {Complex{1, 0}}, 1.0}}};
  EXPECT_THROW(check_conditional_limits(ok, unit_vector_at_angle(0), unit_vector_at_angle(0), 1.0, {1.0}),
               DomainError);
}
