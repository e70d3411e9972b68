#pragma once

// Numerical checks of wideband limits: B * I(X; c^H X + Z), Z ~ CN(0, N0 B),
// tends to a second-moment expression divided by N0 as B grows.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "lprelay/channel.hpp"
#include "lprelay/error.hpp"
#include "lprelay/matrix.hpp"

namespace lprelay {

/// B log(1 + signal_var / (N0 B)) in nats/s: the scaled mutual information of a
/// Gaussian input through a complex AWGN channel of bandwidth B.
inline double gaussian_scaled_mi(double signal_var, double noise_psd, double bandwidth) {
  if (!(bandwidth > 0.0) || !std::isfinite(bandwidth)) throw DomainError("gaussian_scaled_mi: bandwidth must be > 0");
  if (!(noise_psd > 0.0) || !std::isfinite(noise_psd)) throw DomainError("gaussian_scaled_mi: noise_psd must be > 0");
  if (!(signal_var >= 0.0) || !std::isfinite(signal_var)) throw DomainError("gaussian_scaled_mi: signal_var must be >= 0");
  return bandwidth * std::log1p(signal_var / (noise_psd * bandwidth));
}

inline std::vector<double> default_bandwidths() { return {1e1, 1e2, 1e3, 1e4, 1e5}; }

struct LimitCheckReport {
  std::vector<double> bandwidths;
  std::vector<double> scaled_mi;
  double target = 0.0;
  bool converged = false;
  double final_abs_err = 0.0;
  double tolerance = 0.0;  // absolute; converged <=> final_abs_err <= tolerance
  double std_error = 0.0;  // Monte-Carlo standard error at the last bandwidth, 0 if deterministic

  double abs_err(std::size_t i) const { return std::abs(scaled_mi.at(i) - target); }
};

namespace detail {

inline void check_bandwidths(const std::vector<double>& bw) {
  if (bw.empty()) throw DomainError("bandwidth list is empty");
  for (std::size_t i = 0; i < bw.size(); ++i) {
    if (!(bw[i] > 0.0)) throw DomainError("bandwidths must be > 0");
    if (i > 0 && !(bw[i] > bw[i - 1])) throw DomainError("bandwidths must be strictly ascending");
  }
}

inline LimitCheckReport finish_report(std::vector<double> bw, std::vector<double> mi, double target, double rel_tol,
                                      double abs_floor = 0.0) {
  LimitCheckReport r;
  r.bandwidths = std::move(bw);
  r.scaled_mi = std::move(mi);
  r.target = target;
  r.final_abs_err = std::abs(r.scaled_mi.back() - target);
  r.tolerance = rel_tol * std::abs(target) + abs_floor;
  r.converged = r.final_abs_err <= r.tolerance;
  return r;
}

// Per-bandwidth RNG substream so results do not depend on evaluation order.
inline std::mt19937_64 substream(std::uint64_t seed, std::size_t index, std::uint64_t salt = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(salt)};
  return std::mt19937_64(seq);
}

}  // namespace detail

/// Rank-one covariance total_power * c c^H / |c|^2; maximises c^H S c subject
/// to tr S = total_power. Zero matrix for a zero channel.
inline HermitianMatrix aligned_covariance(const ChannelVector& c, double total_power) {
  if (c.is_zero()) return HermitianMatrix::zero(c.dim());
  return HermitianMatrix::outer(c, total_power / c.norm_sq());
}

/// Constant channel, Gaussian input with the given covariance. Target is
/// c^H S c / N0.
inline LimitCheckReport check_limit_constant_phase(const ChannelVector& c, const HermitianMatrix& input_cov,
                                                   double noise_psd, const std::vector<double>& bandwidths,
                                                   double rel_tol = 1e-3) {
  if (input_cov.dim() != c.dim()) throw DomainError("check_limit_constant_phase: covariance dimension mismatch");
  if (!is_psd(input_cov)) throw DomainError("check_limit_constant_phase: covariance is not PSD");
  detail::check_bandwidths(bandwidths);
  const double signal = std::max(0.0, input_cov.quad(c));
  std::vector<double> mi;
  for (double b : bandwidths) mi.push_back(gaussian_scaled_mi(signal, noise_psd, b));
  return detail::finish_report(bandwidths, std::move(mi), signal / noise_psd, rel_tol);
}

/// Independent per-antenna inputs with the given variances.
inline LimitCheckReport check_limit_constant_phase(const ChannelVector& c, const std::vector<double>& input_var,
                                                   double noise_psd, const std::vector<double>& bandwidths,
                                                   double rel_tol = 1e-3) {
  if (input_var.size() != c.dim()) throw DomainError("check_limit_constant_phase: variance list does not match dim");
  return check_limit_constant_phase(c, HermitianMatrix::diagonal(input_var), noise_psd, bandwidths, rel_tol);
}

/// Phase fading: c_i = |c_i| e^{j theta_i} with theta_i iid uniform, known at the
/// receiver only. I(X;Y|theta) is estimated by averaging the Gaussian closed
/// form over sampled phase vectors. Each draw is paired with every sign flip of
/// antennas 2..N (antithetic variates), which cancels the cross terms of c^H S c
/// exactly within a draw. Target is sum_i |c_i|^2 S_ii / N0.
inline LimitCheckReport check_limit_phase_fading(const std::vector<double>& c_mags, const HermitianMatrix& input_cov,
                                                 double noise_psd, const std::vector<double>& bandwidths,
                                                 std::size_t num_phase_samples, std::uint64_t rng_seed,
                                                 double rel_tol = 1e-3) {
  const std::size_t n = c_mags.size();
  if (n == 0 || input_cov.dim() != n) throw DomainError("check_limit_phase_fading: dimension mismatch");
  if (n > 16) throw DomainError("check_limit_phase_fading: at most 16 antennas");
  if (num_phase_samples == 0) throw DomainError("check_limit_phase_fading: need at least one phase sample");
  for (double m : c_mags)
    if (!(m >= 0.0) || !std::isfinite(m)) throw DomainError("check_limit_phase_fading: magnitudes must be >= 0");
  if (!is_psd(input_cov)) throw DomainError("check_limit_phase_fading: covariance is not PSD");
  detail::check_bandwidths(bandwidths);

  double target = 0.0;
  for (std::size_t i = 0; i < n; ++i) target += c_mags[i] * c_mags[i] * input_cov(i, i).real();
  target /= noise_psd;

  const std::size_t patterns = std::size_t{1} << (n - 1);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  std::vector<double> mi(bandwidths.size());
  double last_se = 0.0;
  for (std::size_t b = 0; b < bandwidths.size(); ++b) {
    auto rng = detail::substream(rng_seed, b);
    double sum = 0.0;
    double sum_sq = 0.0;
    std::vector<Complex> c(n);
    for (std::size_t s = 0; s < num_phase_samples; ++s) {
      std::vector<double> th(n);
      for (auto& t : th) t = phase(rng);
      double draw = 0.0;
      for (std::size_t pat = 0; pat < patterns; ++pat) {
        for (std::size_t i = 0; i < n; ++i) {
          const double sign = (i > 0 && ((pat >> (i - 1)) & 1u)) ? -1.0 : 1.0;
          c[i] = sign * std::polar(c_mags[i], th[i]);
        }
        const double sig = std::max(0.0, input_cov.quad(ChannelVector(c)));
        draw += gaussian_scaled_mi(sig, noise_psd, bandwidths[b]);
      }
      draw /= static_cast<double>(patterns);
      sum += draw;
      sum_sq += draw * draw;
    }
    const double ns = static_cast<double>(num_phase_samples);
    mi[b] = sum / ns;
    if (num_phase_samples > 1) {
      const double var = std::max(0.0, (sum_sq - ns * mi[b] * mi[b]) / (ns - 1.0));
      last_se = std::sqrt(var / ns);
    }
  }
  auto r = detail::finish_report(bandwidths, std::move(mi), target, rel_tol, 3.0 * last_se);
  r.std_error = last_se;
  return r;
}

/// Independent per-antenna inputs.
inline LimitCheckReport check_limit_phase_fading(const std::vector<double>& c_mags, const std::vector<double>& input_var,
                                                 double noise_psd, const std::vector<double>& bandwidths,
                                                 std::size_t num_phase_samples, std::uint64_t rng_seed,
                                                 double rel_tol = 1e-3) {
  if (input_var.size() != c_mags.size()) throw DomainError("check_limit_phase_fading: variance list does not match");
  return check_limit_phase_fading(c_mags, HermitianMatrix::diagonal(input_var), noise_psd, bandwidths,
                                  num_phase_samples, rng_seed, rel_tol);
}

// ---------------------------------------------------------------------------
// Discrete inputs: (U, X) with finite support, Y = c^H X + Z.

struct DiscreteAtom {
  int u = 0;
  std::vector<Complex> x;
  double p = 0.0;
};

struct DiscreteJoint {
  std::vector<DiscreteAtom> atoms;

  std::size_t dim() const { return atoms.empty() ? 0 : atoms.front().x.size(); }

  void validate() const {
    if (atoms.empty()) throw DomainError("DiscreteJoint: empty support");
    double total = 0.0;
    for (const auto& a : atoms) {
      if (a.x.size() != dim()) throw DomainError("DiscreteJoint: inconsistent X dimension");
      if (!(a.p >= 0.0)) throw DomainError("DiscreteJoint: negative probability");
      total += a.p;
    }
    if (std::abs(total - 1.0) > 1e-9) throw DomainError("DiscreteJoint: distribution is not normalised");
  }
};

/// Gauss-Hermite rule for weight exp(-t^2) via Golub-Welsch.
struct GaussHermite {
  std::vector<double> nodes;
  std::vector<double> weights;
};

inline GaussHermite gauss_hermite(std::size_t n) {
  if (n == 0) throw DomainError("gauss_hermite: need at least one node");
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  Eigen::VectorXd sub(static_cast<Eigen::Index>(n > 1 ? n - 1 : 0));
  for (std::size_t k = 1; k < n; ++k) sub(static_cast<Eigen::Index>(k - 1)) = std::sqrt(0.5 * static_cast<double>(k));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
  GaussHermite gh;
  for (std::size_t i = 0; i < n; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    gh.nodes.push_back(es.eigenvalues()(ii));
    const double v0 = es.eigenvectors()(0, ii);
    gh.weights.push_back(std::sqrt(std::numbers::pi) * v0 * v0);
  }
  return gh;
}

/// Chain-rule decomposition of the scaled mutual informations at each bandwidth.
struct ConditionalLimitReport {
  LimitCheckReport x_y1;          // B I(X;Y1)   -> var[c1^H X] / N0
  LimitCheckReport u_y1;          // B I(U;Y1)   -> (var[c1^H X] - E_U var[c1^H X | U]) / N0
  LimitCheckReport x_y1_given_u;  // B I(X;Y1|U) -> E_U var[c1^H X | U] / N0
  LimitCheckReport x_y2_given_u;  // B I(X;Y2|U) -> E_U var[c2^H X | U] / N0
  std::vector<double> chain_residual;   // |I(X;Y1) - I(U;Y1) - I(X;Y1|U)|, scaled by B
  std::vector<double> chain_tolerance;  // per bandwidth
  bool quadrature = true;               // false: Monte Carlo path

  bool chain_holds() const {
    for (std::size_t i = 0; i < chain_residual.size(); ++i)
      if (chain_residual[i] > chain_tolerance[i]) return false;
    return true;
  }
};

namespace detail {

struct Mixture {
  std::vector<double> w;
  std::vector<Complex> m;
};

struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
};

// log sum_j w_j exp(t_j) for weights summing to 1.
inline double log_mix(const std::vector<double>& w, const std::vector<double>& t) {
  double tmax = -INFINITY;
  double tabs = 0.0;
  for (double v : t) {
    tmax = std::max(tmax, v);
    tabs = std::max(tabs, std::abs(v));
  }
  if (tabs < 0.5) {
    double s = 0.0;
    for (std::size_t j = 0; j < w.size(); ++j) s += w[j] * std::expm1(t[j]);
    return std::log1p(s);
  }
  double s = 0.0;
  for (std::size_t j = 0; j < w.size(); ++j) s += w[j] * std::exp(t[j] - tmax);
  return tmax + std::log(s);
}

// log A(y) - log B(y) at y = center + z, with the common Gaussian factor of the
// noise removed.
inline double log_ratio(const Mixture& a, const Mixture& b, Complex center, Complex z, double sigma2) {
  thread_local std::vector<double> ta, tb;
  ta.resize(a.m.size());
  tb.resize(b.m.size());
  for (std::size_t j = 0; j < a.m.size(); ++j) {
    const Complex d = center - a.m[j];
    ta[j] = -(2.0 * (std::conj(d) * z).real() + std::norm(d)) / sigma2;
  }
  for (std::size_t j = 0; j < b.m.size(); ++j) {
    const Complex d = center - b.m[j];
    tb[j] = -(2.0 * (std::conj(d) * z).real() + std::norm(d)) / sigma2;
  }
  return log_mix(a.w, ta) - log_mix(b.w, tb);
}

// KL(A * CN(0, sigma2) || B * CN(0, sigma2)) by tensor Gauss-Hermite quadrature.
inline double kl_quadrature(const Mixture& a, const Mixture& b, double sigma2, const GaussHermite& gh) {
  const double sigma = std::sqrt(sigma2);
  double kl = 0.0;
  for (std::size_t k = 0; k < a.m.size(); ++k) {
    if (a.w[k] == 0.0) continue;
    double acc = 0.0;
    for (std::size_t i = 0; i < gh.nodes.size(); ++i)
      for (std::size_t l = 0; l < gh.nodes.size(); ++l) {
        const Complex z{sigma * gh.nodes[i], sigma * gh.nodes[l]};
        acc += gh.weights[i] * gh.weights[l] * log_ratio(a, b, a.m[k], z, sigma2);
      }
    kl += a.w[k] * acc / std::numbers::pi;
  }
  return kl;
}

// Same KL by Monte Carlo with four-fold rotational antithetic noise (z, jz, -z, -jz).
inline Estimate kl_monte_carlo(const Mixture& a, const Mixture& b, double sigma2, std::size_t samples,
                               std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, std::sqrt(sigma2 / 2.0));
  std::discrete_distribution<std::size_t> pick(a.w.begin(), a.w.end());
  double sum = 0.0, sum_sq = 0.0;
  for (std::size_t s = 0; s < samples; ++s) {
    const std::size_t k = pick(rng);
    Complex z{gauss(rng), gauss(rng)};
    double v = 0.0;
    for (int r = 0; r < 4; ++r) {
      v += log_ratio(a, b, a.m[k], z, sigma2);
      z *= Complex{0.0, 1.0};
    }
    v /= 4.0;
    sum += v;
    sum_sq += v * v;
  }
  const double ns = static_cast<double>(samples);
  const double mean = sum / ns;
  const double var = std::max(0.0, (sum_sq - ns * mean * mean) / (ns - 1.0));
  return {mean, std::sqrt(var / ns)};
}

inline Complex project(const ChannelVector& c, const std::vector<Complex>& x) {
  Complex s{0.0, 0.0};
  for (std::size_t i = 0; i < x.size(); ++i) s += std::conj(c[i]) * x[i];
  return s;
}

struct Projected {
  Mixture all;                       // P_Y
  std::map<int, double> pu;          // P(U = u)
  std::map<int, Mixture> given_u;    // P_{Y|U=u}
};

inline Projected project_joint(const DiscreteJoint& joint, const ChannelVector& c) {
  Projected out;
  for (const auto& a : joint.atoms) {
    const Complex s = project(c, a.x);
    out.all.w.push_back(a.p);
    out.all.m.push_back(s);
    out.pu[a.u] += a.p;
    out.given_u[a.u].w.push_back(a.p);
    out.given_u[a.u].m.push_back(s);
  }
  for (auto& [u, mix] : out.given_u) {
    const double pu = out.pu[u];
    for (auto& w : mix.w) w = pu > 0.0 ? w / pu : 0.0;
  }
  return out;
}

// Variance of the complex scalar c^H X under mixture weights.
inline double mixture_variance(const Mixture& mix) {
  Complex mean{0.0, 0.0};
  for (std::size_t k = 0; k < mix.m.size(); ++k) mean += mix.w[k] * mix.m[k];
  double v = 0.0;
  for (std::size_t k = 0; k < mix.m.size(); ++k) v += mix.w[k] * std::norm(mix.m[k] - mean);
  return v;
}

struct MiTriple {
  Estimate x_y;
  Estimate u_y;
  Estimate x_y_given_u;
};

class MiEstimator {
 public:
  MiEstimator(bool quadrature, std::size_t mc_samples, std::uint64_t seed)
      : quadrature_(quadrature), mc_samples_(mc_samples), seed_(seed) {}

  Estimate kl(const Mixture& a, const Mixture& b, double sigma2, std::size_t band, std::uint64_t salt) const {
    if (quadrature_) {
      static const GaussHermite gh = gauss_hermite(96);
      return {kl_quadrature(a, b, sigma2, gh), 0.0};
    }
    auto rng = substream(seed_, band, salt);
    return kl_monte_carlo(a, b, sigma2, mc_samples_, rng);
  }

  // Each information quantity gets its own sample stream (salt), so the chain
  // identity is a genuine cross-check on the Monte-Carlo path.
  MiTriple triple(const Projected& y, double sigma2, std::size_t band, std::uint64_t salt_base) const {
    MiTriple t;
    std::uint64_t salt = salt_base;
    double se2 = 0.0;
    for (std::size_t k = 0; k < y.all.m.size(); ++k) {
      if (y.all.w[k] == 0.0) continue;
      auto e = kl(Mixture{{1.0}, {y.all.m[k]}}, y.all, sigma2, band, ++salt);
      t.x_y.value += y.all.w[k] * e.value;
      se2 += y.all.w[k] * y.all.w[k] * e.std_error * e.std_error;
    }
    t.x_y.std_error = std::sqrt(se2);

    se2 = 0.0;
    double se2c = 0.0;
    for (const auto& [u, mix] : y.given_u) {
      const double pu = y.pu.at(u);
      if (pu == 0.0) continue;
      auto e = kl(mix, y.all, sigma2, band, ++salt);
      t.u_y.value += pu * e.value;
      se2 += pu * pu * e.std_error * e.std_error;
      for (std::size_t k = 0; k < mix.m.size(); ++k) {
        if (mix.w[k] == 0.0) continue;
        auto ec = kl(Mixture{{1.0}, {mix.m[k]}}, mix, sigma2, band, ++salt);
        const double wk = pu * mix.w[k];
        t.x_y_given_u.value += wk * ec.value;
        se2c += wk * wk * ec.std_error * ec.std_error;
      }
    }
    t.u_y.std_error = std::sqrt(se2);
    t.x_y_given_u.std_error = std::sqrt(se2c);
    return t;
  }

 private:
  bool quadrature_;
  std::size_t mc_samples_;
  std::uint64_t seed_;
};

}  // namespace detail

/// Verifies the conditional wideband limits for a finite-support (U, X):
///   B I(U;Y1)   -> (var[c1^H X] - var[c1^H X | U]) / N0
///   B I(X;Y2|U) -> var[c2^H X | U] / N0
/// where conditional variances are averaged over U. Supports of at most 16
/// points use 96x96 Gauss-Hermite quadrature; larger supports use Monte Carlo
/// with mc_samples draws per divergence term and a 3-standard-error tolerance.
inline ConditionalLimitReport check_conditional_limits(const DiscreteJoint& joint, const ChannelVector& c1,
                                                       const ChannelVector& c2, double noise_psd,
                                                       const std::vector<double>& bandwidths,
                                                       std::uint64_t rng_seed = 0, double rel_tol = 1e-3,
                                                       std::size_t mc_samples = 20000) {
  joint.validate();
  if (c1.dim() != joint.dim() || c2.dim() != joint.dim())
    throw DomainError("check_conditional_limits: channel dimension does not match X");
  if (!(noise_psd > 0.0)) throw DomainError("check_conditional_limits: noise_psd must be > 0");
  detail::check_bandwidths(bandwidths);

  const auto y1 = detail::project_joint(joint, c1);
  const auto y2 = detail::project_joint(joint, c2);

  const double var1 = detail::mixture_variance(y1.all);
  double cond1 = 0.0, cond2 = 0.0;
  for (const auto& [u, mix] : y1.given_u) cond1 += y1.pu.at(u) * detail::mixture_variance(mix);
  for (const auto& [u, mix] : y2.given_u) cond2 += y2.pu.at(u) * detail::mixture_variance(mix);

  const bool quadrature = joint.atoms.size() <= 16;
  const detail::MiEstimator est(quadrature, mc_samples, rng_seed);

  std::vector<double> x_y1, u_y1, x_y1_u, x_y2_u, resid, tol;
  double se_x = 0, se_u = 0, se_c = 0, se_2 = 0;
  for (std::size_t b = 0; b < bandwidths.size(); ++b) {
    const double bw = bandwidths[b];
    const double sigma2 = noise_psd * bw;
    const auto t1 = est.triple(y1, sigma2, b, 1000);
    const auto t2 = est.triple(y2, sigma2, b, 2000000);
    x_y1.push_back(bw * t1.x_y.value);
    u_y1.push_back(bw * t1.u_y.value);
    x_y1_u.push_back(bw * t1.x_y_given_u.value);
    x_y2_u.push_back(bw * t2.x_y_given_u.value);
    se_x = bw * t1.x_y.std_error;
    se_u = bw * t1.u_y.std_error;
    se_c = bw * t1.x_y_given_u.std_error;
    se_2 = bw * t2.x_y_given_u.std_error;
    resid.push_back(std::abs(x_y1.back() - u_y1.back() - x_y1_u.back()));
    const double scale = std::max({std::abs(x_y1.back()), std::abs(u_y1.back()), std::abs(x_y1_u.back()), 1e-300});
    tol.push_back(quadrature ? 1e-8 * scale : 3.0 * std::sqrt(se_x * se_x + se_u * se_u + se_c * se_c));
  }

  ConditionalLimitReport r;
  r.quadrature = quadrature;
  r.x_y1 = detail::finish_report(bandwidths, std::move(x_y1), var1 / noise_psd, rel_tol, 3.0 * se_x);
  r.u_y1 = detail::finish_report(bandwidths, std::move(u_y1), (var1 - cond1) / noise_psd, rel_tol, 3.0 * se_u);
  r.x_y1_given_u = detail::finish_report(bandwidths, std::move(x_y1_u), cond1 / noise_psd, rel_tol, 3.0 * se_c);
  r.x_y2_given_u = detail::finish_report(bandwidths, std::move(x_y2_u), cond2 / noise_psd, rel_tol, 3.0 * se_2);
  r.x_y1.std_error = se_x;
  r.u_y1.std_error = se_u;
  r.x_y1_given_u.std_error = se_c;
  r.x_y2_given_u.std_error = se_2;
  r.chain_residual = std::move(resid);
  r.chain_tolerance = std::move(tol);
  return r;
}

}  // namespace lprelay
