#pragma once

// Rate regions of the two-relay diamond: source (two antennas) -> relays 2, 3
// -> destination 4. The broadcast cut and the MAC cut are bounded separately.
//
// Rate triples are (R2, R3, R): what relay 2 decodes, what relay 3 decodes, and
// the total message rate.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "lprelay/channel.hpp"
#include "lprelay/error.hpp"

namespace lprelay {

struct RatePoint {
  double r2 = 0.0;
  double r3 = 0.0;
  double r_sum = 0.0;
};

/// Correlation between the two relay inputs, in [0, 1].
class MacCorrelation {
 public:
  explicit MacCorrelation(double rho) : rho_(rho) {
    if (!(rho >= 0.0 && rho <= 1.0)) throw ValidationError("rho", "must lie in [0, 1]");
  }
  double value() const noexcept { return rho_; }

 private:
  double rho_;
};

/// r23: rate relay 2 carries beyond relay 3, r32 the converse, r_sum the total.
struct MacBounds {
  double r23 = 0.0;
  double r32 = 0.0;
  double r_sum = 0.0;
  bool rho_ignored = false;
};

inline MacBounds mac_region_point(const ChannelConfig& cfg, MacCorrelation rho) {
  require(cfg, Topology::TwoRelayDiamond, "mac_region_point");
  const double a = cfg.gain("c42").norm_sq() * cfg.power("P2");
  const double b = cfg.gain("c43").norm_sq() * cfg.power("P3");
  MacBounds m;
  if (cfg.csi() == CsiMode::PhaseFading) {
    m.r23 = a;
    m.r32 = b;
    m.r_sum = a + b;
    m.rho_ignored = rho.value() != 0.0;
    return m;
  }
  const double r = rho.value();
  m.r23 = a * (1.0 - r * r);
  m.r32 = b * (1.0 - r * r);
  m.r_sum = a + b + 2.0 * r * std::sqrt(a * b);
  return m;
}

// ---------------------------------------------------------------------------
// Broadcast cut, phase fading. Antenna k of the source reaches relay j with
// gain c_j1k; each antenna has its own budget.

struct CommonPrivateAllocation {
  double p1c = 0.0, p2c = 0.0;  // common message, antenna 1 and 2
  double p12 = 0.0, p22 = 0.0;  // private to relay 2
  double p13 = 0.0, p23 = 0.0;  // private to relay 3
};

struct BroadcastGains {
  std::array<double, 2> g2{};  // |c21k|^2
  std::array<double, 2> g3{};  // |c31k|^2
  std::array<double, 2> budget{};
};

/// Per-antenna budgets come from P1a/P1b when given, otherwise P1 is split evenly.
inline BroadcastGains broadcast_gains(const ChannelConfig& cfg) {
  require(cfg, Topology::TwoRelayDiamond, "broadcast_gains");
  const auto& c21 = cfg.gain("c21");
  const auto& c31 = cfg.gain("c31");
  BroadcastGains g;
  for (std::size_t k = 0; k < 2; ++k) {
    g.g2[k] = std::norm(c21[k]);
    g.g3[k] = std::norm(c31[k]);
  }
  if (cfg.has_power("P1a")) {
    g.budget = {cfg.power("P1a"), cfg.power("P1b")};
  } else {
    g.budget = {0.5 * cfg.power("P1"), 0.5 * cfg.power("P1")};
  }
  return g;
}

namespace detail {

inline void check_cp_allocation(const BroadcastGains& g, const CommonPrivateAllocation& a, bool allow_negative_common) {
  const double slack0 = 1e-12 * std::max(1.0, g.budget[0]);
  const double slack1 = 1e-12 * std::max(1.0, g.budget[1]);
  for (auto [name, v] : {std::pair{"p12", a.p12}, std::pair{"p22", a.p22}, std::pair{"p13", a.p13},
                         std::pair{"p23", a.p23}}) {
    if (!std::isfinite(v)) throw ValidationError(name, "must be finite");
    if (v < 0.0) throw ValidationError(name, "private power must be >= 0");
  }
  if (!std::isfinite(a.p1c) || !std::isfinite(a.p2c)) throw ValidationError("p_common", "must be finite");
  if (!allow_negative_common) {
    if (a.p1c < 0.0) throw ValidationError("p1c", "common power must be >= 0 for an achievable scheme");
    if (a.p2c < 0.0) throw ValidationError("p2c", "common power must be >= 0 for an achievable scheme");
  }
  if (a.p1c + a.p12 + a.p13 > g.budget[0] + slack0)
    throw ValidationError("antenna1_budget", "p1c + p12 + p13 exceeds the antenna 1 budget");
  if (a.p2c + a.p22 + a.p23 > g.budget[1] + slack1)
    throw ValidationError("antenna2_budget", "p2c + p22 + p23 exceeds the antenna 2 budget");
  if (a.p1c + a.p12 < -slack0) throw ValidationError("p1c+p12", "must be >= 0");
  if (a.p1c + a.p13 < -slack0) throw ValidationError("p1c+p13", "must be >= 0");
  if (a.p2c + a.p22 < -slack1) throw ValidationError("p2c+p22", "must be >= 0");
  if (a.p2c + a.p23 < -slack1) throw ValidationError("p2c+p23", "must be >= 0");
}

}  // namespace detail

struct CommonPrivateRates {
  double rc = 0.0;
  double r2 = 0.0;
  double r3 = 0.0;
  double r_sum1 = 0.0;  // common part as seen by relay 2
  double r_sum2 = 0.0;  // common part as seen by relay 3
  RatePoint point() const { return {r2, r3, std::min(r_sum1, r_sum2)}; }
};

inline CommonPrivateRates bc_rates_raw(const BroadcastGains& g, const CommonPrivateAllocation& a) {
  const double common2 = g.g2[0] * a.p1c + g.g2[1] * a.p2c;
  const double common3 = g.g3[0] * a.p1c + g.g3[1] * a.p2c;
  const double priv2 = g.g2[0] * a.p12 + g.g2[1] * a.p22;
  const double priv3 = g.g3[0] * a.p13 + g.g3[1] * a.p23;
  CommonPrivateRates r;
  r.rc = std::min(common2, common3);
  r.r2 = r.rc + priv2;
  r.r3 = r.rc + priv3;
  r.r_sum1 = common2 + priv2 + priv3;
  r.r_sum2 = common3 + priv2 + priv3;
  return r;
}

/// Achievable common/private rates (all powers nonnegative).
inline CommonPrivateRates bc_common_private_rates(const ChannelConfig& cfg, const CommonPrivateAllocation& alloc) {
  require(cfg, CsiMode::PhaseFading, "bc_common_private_rates");
  const auto g = broadcast_gains(cfg);
  detail::check_cp_allocation(g, alloc, false);
  return bc_rates_raw(g, alloc);
}

/// Outer bound at a (possibly negative-common) allocation: the per-relay bounds
/// and the smaller of the two total-rate bounds.
inline RatePoint bc_outer_raw(const BroadcastGains& g, const CommonPrivateAllocation& a) {
  const double common2 = g.g2[0] * a.p1c + g.g2[1] * a.p2c;
  const double common3 = g.g3[0] * a.p1c + g.g3[1] * a.p2c;
  const double priv2 = g.g2[0] * a.p12 + g.g2[1] * a.p22;
  const double priv3 = g.g3[0] * a.p13 + g.g3[1] * a.p23;
  return {common2 + priv2, common3 + priv3, std::min(common2, common3) + priv2 + priv3};
}

inline RatePoint bc_outer_bound(const ChannelConfig& cfg, const CommonPrivateAllocation& alloc) {
  require(cfg, CsiMode::PhaseFading, "bc_outer_bound");
  const auto g = broadcast_gains(cfg);
  detail::check_cp_allocation(g, alloc, true);
  return bc_outer_raw(g, alloc);
}

struct BroadcastGapReport {
  std::size_t outer_points = 0;
  std::size_t achievable_points = 0;
  double max_gap = 0.0;     // largest support-function deficit of the achievable sweep
  double resolution = 0.0;  // rate change of one grid step on the strongest link
  std::size_t weights = 0;
};

struct BroadcastGridSpec {
  std::size_t points_per_dim = 16;
  std::size_t weight_steps = 8;  // weight simplex resolution
};

namespace detail {

// Visits every grid allocation for one antenna: (pc, p_to2, p_to3).
template <class F>
void antenna_grid(double budget, std::size_t n, bool negative_common, F&& f) {
  const double h = budget / static_cast<double>(n - 1);
  const double hc = negative_common ? 2.0 * budget / static_cast<double>(n - 1) : h;
  const double c0 = negative_common ? -budget : 0.0;
  for (std::size_t ic = 0; ic < n; ++ic) {
    const double pc = c0 + hc * static_cast<double>(ic);
    for (std::size_t i2 = 0; i2 < n; ++i2) {
      const double p2 = h * static_cast<double>(i2);
      if (pc + p2 > budget * (1.0 + 1e-12)) break;
      for (std::size_t i3 = 0; i3 < n; ++i3) {
        const double p3 = h * static_cast<double>(i3);
        if (pc + p2 + p3 > budget * (1.0 + 1e-12)) break;
        if (pc + p2 < 0.0 || pc + p3 < 0.0) continue;
        f(pc, p2, p3);
      }
    }
  }
}

}  // namespace detail

/// Sweeps the outer bound (negative common powers allowed where the
/// constraints permit) and the achievable common/private region on product
/// grids, then compares them through support functions
///   h(w) = max w2 R2 + w3 R3 + w R   over weights on the simplex.
/// Both regions are downward closed, so equal support functions mean equal
/// convex hulls; the report carries the largest outer-minus-achievable deficit.
inline BroadcastGapReport bc_outer_vs_common_private(const ChannelConfig& cfg, const BroadcastGridSpec& spec = {}) {
  require(cfg, Topology::TwoRelayDiamond, "bc_outer_vs_common_private");
  require(cfg, CsiMode::PhaseFading, "bc_outer_vs_common_private");
  if (spec.points_per_dim < 2 || spec.weight_steps < 1) throw DomainError("bc_outer_vs_common_private: grid too small");
  const auto g = broadcast_gains(cfg);
  const std::size_t n = spec.points_per_dim;

  std::vector<std::array<double, 3>> weights;
  const std::size_t m = spec.weight_steps;
  for (std::size_t i = 0; i <= m; ++i)
    for (std::size_t j = 0; i + j <= m; ++j) {
      const double w2 = static_cast<double>(i) / static_cast<double>(m);
      const double w3 = static_cast<double>(j) / static_cast<double>(m);
      weights.push_back({w2, w3, 1.0 - w2 - w3});
    }

  auto sweep = [&](bool outer, std::size_t& count) {
    std::vector<double> support(weights.size(), -std::numeric_limits<double>::infinity());
    std::vector<std::array<double, 3>> ant1;
    detail::antenna_grid(g.budget[0], n, outer, [&](double c, double a2, double a3) { ant1.push_back({c, a2, a3}); });
    std::vector<std::array<double, 3>> ant2;
    detail::antenna_grid(g.budget[1], n, outer, [&](double c, double a2, double a3) { ant2.push_back({c, a2, a3}); });
    for (const auto& x : ant1)
      for (const auto& y : ant2) {
        const CommonPrivateAllocation a{x[0], y[0], x[1], y[1], x[2], y[2]};
        RatePoint p = outer ? bc_outer_raw(g, a) : bc_rates_raw(g, a).point();
        // A relay never decodes more than the whole message.
        p.r2 = std::min(p.r2, p.r_sum);
        p.r3 = std::min(p.r3, p.r_sum);
        ++count;
        for (std::size_t k = 0; k < weights.size(); ++k) {
          const double v = weights[k][0] * p.r2 + weights[k][1] * p.r3 + weights[k][2] * p.r_sum;
          if (v > support[k]) support[k] = v;
        }
      }
    return support;
  };

  BroadcastGapReport rep;
  rep.weights = weights.size();
  const auto h_out = sweep(true, rep.outer_points);
  const auto h_ach = sweep(false, rep.achievable_points);
  rep.max_gap = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < weights.size(); ++k) rep.max_gap = std::max(rep.max_gap, h_out[k] - h_ach[k]);

  double gmax = 0.0;
  for (std::size_t k = 0; k < 2; ++k) gmax = std::max({gmax, g.g2[k], g.g3[k]});
  const double bmax = std::max(g.budget[0], g.budget[1]);
  rep.resolution = gmax * 2.0 * bmax / static_cast<double>(n - 1);
  return rep;
}

// ---------------------------------------------------------------------------
// Broadcast cut, synchronous: beamforming.

/// min(|c21|^2, |c31|^2) <= |c21^H c31|
inline bool thm3_condition(const ChannelVector& c21, const ChannelVector& c31) {
  if (c21.is_zero() || c31.is_zero()) throw DomainError("thm3_condition: zero vector");
  const double lhs = std::min(c21.norm_sq(), c31.norm_sq());
  const double rhs = std::abs(inner(c21, c31));
  return lhs <= rhs * (1.0 + 1e-12);
}

/// Weights of X = alpha2 c21 c21^H + alpha3 c31 c31^H: a private stream along
/// c21 and a common stream along c31 (relay roles swapped when |c21| < |c31|).
struct BeamformingParams {
  double alpha2 = 0.0;
  double alpha3 = 0.0;
};

struct BeamformingRegion {
  RatePoint rates;
  bool swapped = false;
  double trace = 0.0;
};

/// Rates of the beamforming scheme for arbitrary gains. The common stream is
/// limited by the weaker of the two relays.
inline RatePoint beamforming_rates(const ChannelVector& strong, const ChannelVector& weak, const BeamformingParams& p) {
  const double ns = strong.norm_sq();
  const double nw = weak.norm_sq();
  const double cross = std::norm(inner(strong, weak));
  const double common = p.alpha3 * std::min(nw * nw, cross);
  const double r_strong = common + p.alpha2 * ns * ns;
  return {r_strong, common, r_strong};
}

inline BeamformingRegion thm3_region(const ChannelConfig& cfg, const BeamformingParams& params) {
  require(cfg, Topology::TwoRelayDiamond, "thm3_region");
  require(cfg, CsiMode::Synchronous, "thm3_region");
  const auto& c21 = cfg.gain("c21");
  const auto& c31 = cfg.gain("c31");
  if (!thm3_condition(c21, c31))
    throw DomainError("thm3_region: beamforming optimality condition min(|c21|^2, |c31|^2) <= |c21^H c31| fails");
  if (!(params.alpha2 >= 0.0) || !(params.alpha3 >= 0.0) || !std::isfinite(params.alpha2) ||
      !std::isfinite(params.alpha3))
    throw ValidationError("alpha", "beamforming weights must be finite and >= 0");
  const bool swapped = c21.norm_sq() < c31.norm_sq();
  const auto& strong = swapped ? c31 : c21;
  const auto& weak = swapped ? c21 : c31;
  const double trace = params.alpha2 * strong.norm_sq() + params.alpha3 * weak.norm_sq();
  const double p = cfg.power("P1");
  if (trace > p + 1e-12 * std::max(1.0, p)) throw ValidationError("trace_budget", "alpha2 |c|^2 + alpha3 |c|^2 exceeds P1");
  BeamformingRegion out;
  auto r = beamforming_rates(strong, weak, params);
  if (swapped) std::swap(r.r2, r.r3);
  out.rates = r;
  out.swapped = swapped;
  out.trace = trace;
  return out;
}

// ---------------------------------------------------------------------------
// Minimum power of common/private messaging for a target triple.

/// c0^2 = max over unit u of min(|c21^H u|^2, |c31^H u|^2).
/// The maximiser lies in the real plane of the two vectors; along that arc one
/// term rises and the other falls, so the optimum is either an endpoint (the
/// weaker vector's own direction already serves the other one better) or the
/// crossing where both are equal.
inline double max_min_beam(const ChannelVector& c21, const ChannelVector& c31) {
  if (c21.is_zero() || c31.is_zero()) throw DomainError("max_min_beam: zero vector");
  if (c21.dim() != c31.dim()) throw DomainError("max_min_beam: dimension mismatch");
  const double n2 = c21.norm_sq();
  const double n3 = c31.norm_sq();
  const double alpha = angle_between(c21, c31).radians;
  const double ca = std::cos(alpha);
  if (n2 * ca * ca >= n3) return n3;
  if (n3 * ca * ca >= n2) return n2;
  // u = cos(phi) e1 + sin(phi) e2 with e1 along c21:
  //   sqrt(n2) cos(phi) = sqrt(n3) cos(alpha - phi)
  const double s2 = std::sqrt(n2), s3 = std::sqrt(n3);
  const double phi = std::atan2(s2 - s3 * ca, s3 * std::sin(alpha));
  const double c = std::cos(phi);
  return n2 * c * c;
}

struct MinPowerResult {
  double p_total = 0.0;
  double r0 = 0.0;  // common rate
  double r2p = 0.0;  // private rate to relay 2
  double r3p = 0.0;  // private rate to relay 3
};

/// Minimum total power for (r2, r3, r) with common rate through gain c0^2 and
/// private rates through c2^2, c3^2:
///   P = (r2 + r3 - r)/c0^2 + (r - r3)/c2^2 + (r - r2)/c3^2.
/// Requires a physical c0^2, i.e. c0^2 <= min(c2^2, c3^2) and
/// 1/c0^2 <= 1/c2^2 + 1/c3^2; otherwise the split above is not the minimiser.
inline MinPowerResult min_power(double r2, double r3, double r, double c2_sq, double c3_sq, double c0_sq) {
  for (auto [name, v] : {std::pair{"r2", r2}, std::pair{"r3", r3}, std::pair{"r", r}}) {
    if (!std::isfinite(v)) throw ValidationError(name, "must be finite");
    if (v < 0.0) throw ValidationError(name, "rate must be >= 0");
  }
  for (auto [name, v] : {std::pair{"c2_sq", c2_sq}, std::pair{"c3_sq", c3_sq}, std::pair{"c0_sq", c0_sq}})
    if (!(v > 0.0) || !std::isfinite(v)) throw ValidationError(name, "gain must be finite and > 0");
  constexpr double slack = 1e-12;
  if (r < std::max(r2, r3) - slack) throw DomainError("min_power: infeasible triple, r < max(r2, r3)");
  if (r > r2 + r3 + slack) throw DomainError("min_power: infeasible triple, r > r2 + r3");
  if (c0_sq > std::min(c2_sq, c3_sq) * (1.0 + slack))
    throw DomainError("min_power: c0_sq exceeds the weaker private gain");
  if (1.0 / c0_sq > (1.0 / c2_sq + 1.0 / c3_sq) * (1.0 + slack))
    throw DomainError("min_power: common stream costlier than two private streams");
  MinPowerResult out;
  out.r0 = std::max(0.0, r2 + r3 - r);
  out.r2p = std::max(0.0, r - r3);
  out.r3p = std::max(0.0, r - r2);
  out.p_total = out.r0 / c0_sq + out.r2p / c2_sq + out.r3p / c3_sq;
  return out;
}

}  // namespace lprelay
