#pragma once

// Low-power capacity of the single-relay network with a two-antenna source.
//
// Synchronous case. The source splits its power P1 into
//   p31: a direct stream beamformed along c31,
//   p21: a relay stream along a unit vector at angle theta from c31 (and
//        alpha - theta from c21), theta in [0, alpha],
//   pb1: a stream coherent with the relay's own transmission.
// The rate is the smaller of a relay-decoding bound and a destination (MAC)
// bound; capacity is its maximum over the allocation.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <variant>
#include <vector>

#include "lprelay/channel.hpp"
#include "lprelay/error.hpp"
#include "lprelay/matrix.hpp"

namespace lprelay {

struct PowerAllocation {
  double p21 = 0.0;
  double p31 = 0.0;
  double pb1 = 0.0;
  double theta = 0.0;
  double alpha = 0.0;  // derived from the gains, reported for reference
};

/// Matrix-form parameters: A, B covariance parts, correlation beta with the
/// relay, and its direction u. The source covariance is X = A + B + beta^2 P1 u u^H.
struct MatrixBoundParams {
  HermitianMatrix a = HermitianMatrix::zero(2);
  HermitianMatrix b = HermitianMatrix::zero(2);
  double beta = 0.0;
  ChannelVector u{Complex{1.0, 0.0}, Complex{0.0, 0.0}};
};

enum class BindingBound { RelayDecode, MacCombine };

inline const char* to_string(BindingBound b) {
  return b == BindingBound::RelayDecode ? "relay_decode" : "mac_combine";
}

struct BoundPair {
  double relay_decode = 0.0;  // what the relay can decode plus the direct path
  double mac_combine = 0.0;   // what the destination collects from source and relay
  double min() const { return std::min(relay_decode, mac_combine); }
};

struct CapacityResult {
  double rate = 0.0;
  std::variant<PowerAllocation, MatrixBoundParams> allocation;
  BindingBound binding_bound = BindingBound::RelayDecode;
  BoundPair bounds;
};

/// Gain magnitudes and powers (already divided by N0) of the single-relay network.
struct SingleRelayGains {
  double n21 = 0.0;  // |c21|^2
  double n31 = 0.0;  // |c31|^2
  double g32 = 0.0;  // |c32|^2
  double alpha = 0.0;
  double p1 = 0.0;
  double p2 = 0.0;
};

inline SingleRelayGains single_relay_gains(const ChannelConfig& cfg) {
  require(cfg, Topology::SingleRelay, "single_relay_gains");
  const auto& c21 = cfg.gain("c21");
  const auto& c31 = cfg.gain("c31");
  SingleRelayGains g;
  g.n21 = c21.norm_sq();
  g.n31 = c31.norm_sq();
  g.g32 = cfg.gain("c32").norm_sq();
  // With a silent link the angle does not enter any bound; 0 keeps theta pinned.
  g.alpha = (c21.is_zero() || c31.is_zero()) ? 0.0 : angle_between(c21, c31).radians;
  g.p1 = cfg.power("P1");
  g.p2 = cfg.power("P2");
  return g;
}

namespace detail {

inline double coherent_term(const SingleRelayGains& g, double pb1) {
  const double s = std::sqrt(std::max(0.0, pb1) * g.n31) + std::sqrt(g.g32 * g.p2);
  return s * s;
}

inline BoundPair thm1_bounds_raw(const SingleRelayGains& g, const PowerAllocation& a) {
  const double ca = std::cos(g.alpha - a.theta);
  const double cb = std::cos(a.theta);
  BoundPair b;
  b.relay_decode = g.n31 * a.p31 + g.n21 * ca * ca * a.p21;
  b.mac_combine = g.n31 * a.p31 + g.n31 * cb * cb * a.p21 + coherent_term(g, a.pb1);
  return b;
}

inline double budget_slack(double p1) { return 1e-12 * std::max(1.0, p1); }

inline void check_allocation(const SingleRelayGains& g, const PowerAllocation& a) {
  for (auto [name, v] : {std::pair{"p21", a.p21}, std::pair{"p31", a.p31}, std::pair{"pb1", a.pb1}}) {
    if (!std::isfinite(v)) throw ValidationError(name, "must be finite");
    if (v < 0.0) throw ValidationError(name, "must be >= 0");
  }
  if (!std::isfinite(a.theta)) throw ValidationError("theta", "must be finite");
  if (a.p21 + a.p31 + a.pb1 > g.p1 + budget_slack(g.p1))
    throw ValidationError("allocation", "p21 + p31 + pb1 exceeds the source budget P1");
}

inline BindingBound binding_of(const BoundPair& b) {
  const double tie = 1e-9 * std::max(1.0, std::abs(b.min()));
  return b.relay_decode <= b.mac_combine + tie ? BindingBound::RelayDecode : BindingBound::MacCombine;
}

// Best split of the remaining budget r between p21 and p31 at fixed theta, pb1.
// Both bounds are affine in p21 along p21 + p31 = r, so the maximum of their
// minimum sits at an endpoint or at the crossing.
inline PowerAllocation best_split(const SingleRelayGains& g, double theta, double pb1) {
  const double r = std::max(0.0, g.p1 - pb1);
  auto eval = [&](double p21) {
    PowerAllocation a{p21, r - p21, pb1, theta, g.alpha};
    return std::pair{thm1_bounds_raw(g, a).min(), a};
  };
  auto best = eval(0.0);
  auto top = eval(r);
  if (top.first > best.first) best = top;
  const double ca = std::cos(g.alpha - theta);
  const double cb = std::cos(theta);
  // f1 - f2 = (n21 ca^2 - n31 cb^2) p21 - H(pb1)
  const double slope = g.n21 * ca * ca - g.n31 * cb * cb;
  if (slope > 0.0) {
    const double cross = coherent_term(g, pb1) / slope;
    if (cross > 0.0 && cross < r) {
      auto mid = eval(cross);
      if (mid.first > best.first) best = mid;
    }
  }
  return best.second;
}

// max over pb1 of the best split at fixed theta. The value is concave in pb1,
// so golden-section search converges to the maximum.
inline PowerAllocation best_at_theta(const SingleRelayGains& g, double theta) {
  auto value = [&](double pb1) { return thm1_bounds_raw(g, best_split(g, theta, pb1)).min(); };
  double lo = 0.0, hi = g.p1;
  constexpr double inv_phi = 0.6180339887498949;
  double x1 = hi - inv_phi * (hi - lo), x2 = lo + inv_phi * (hi - lo);
  double f1 = value(x1), f2 = value(x2);
  while (hi - lo > 1e-14 * std::max(1.0, g.p1)) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = value(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = value(x1);
    }
  }
  auto best = best_split(g, theta, 0.5 * (lo + hi));
  for (double edge : {0.0, g.p1}) {
    auto cand = best_split(g, theta, edge);
    if (thm1_bounds_raw(g, cand).min() > thm1_bounds_raw(g, best).min()) best = cand;
  }
  return best;
}

}  // namespace detail

/// Both cut-set bounds for a feasible allocation (synchronous single relay).
inline BoundPair thm1_bounds(const ChannelConfig& cfg, const PowerAllocation& alloc) {
  require(cfg, Topology::SingleRelay, "thm1_bounds");
  require(cfg, CsiMode::Synchronous, "thm1_bounds");
  const auto g = single_relay_gains(cfg);
  detail::check_allocation(g, alloc);
  return detail::thm1_bounds_raw(g, alloc);
}

/// Direct rate plus relayed rate (block-Markov through the relay).
inline double thm1_achievable(const ChannelConfig& cfg, const PowerAllocation& alloc) {
  require(cfg, Topology::SingleRelay, "thm1_achievable");
  require(cfg, CsiMode::Synchronous, "thm1_achievable");
  const auto g = single_relay_gains(cfg);
  detail::check_allocation(g, alloc);
  const double direct = g.n31 * alloc.p31;
  const double ca = std::cos(g.alpha - alloc.theta);
  const double cb = std::cos(alloc.theta);
  const double relayed =
      std::min(g.n21 * ca * ca * alloc.p21, g.n31 * cb * cb * alloc.p21 + detail::coherent_term(g, alloc.pb1));
  return direct + relayed;
}

struct Thm1Grid {
  std::size_t simplex_points = 64;  // per power coordinate
  std::size_t theta_points = 128;
  std::size_t refine_rounds = 3;
};

/// Maximises min(relay bound, MAC bound) over {p21 + p31 + pb1 <= P1} x [0, alpha].
/// A coarse product grid and an exact scan over the theta grid pick the
/// starting point. Refinement then runs interval-halving search over theta,
/// where each theta is scored with the remaining coordinates solved exactly (pb1 by golden section, the p21/p31
/// split in closed form). Both bounds are nondecreasing in every power, so the
/// refined allocation spends the full budget.
inline CapacityResult thm1_optimize(const ChannelConfig& cfg, const Thm1Grid& grid = {}) {
  require(cfg, Topology::SingleRelay, "thm1_optimize");
  require(cfg, CsiMode::Synchronous, "thm1_optimize");
  if (grid.simplex_points < 2 || grid.theta_points < 1) throw DomainError("thm1_optimize: grid too small");
  const auto g = single_relay_gains(cfg);

  const std::size_t n = grid.simplex_points;
  const std::size_t m = g.alpha > 0.0 ? grid.theta_points : 1;
  const double h = g.p1 / static_cast<double>(n - 1);
  auto theta_at = [&](std::size_t l) { return m > 1 ? g.alpha * static_cast<double>(l) / static_cast<double>(m - 1) : 0.0; };

  PowerAllocation best{0.0, 0.0, 0.0, 0.0, g.alpha};
  double best_val = -std::numeric_limits<double>::infinity();
  for (std::size_t l = 0; l < m; ++l) {
    const double theta = theta_at(l);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; i + j < n; ++j)
        for (std::size_t k = 0; i + j + k < n; ++k) {
          const PowerAllocation a{h * static_cast<double>(i), h * static_cast<double>(j), h * static_cast<double>(k),
                                  theta, g.alpha};
          const double v = detail::thm1_bounds_raw(g, a).min();
          if (v > best_val) {
            best_val = v;
            best = a;
          }
        }
  }

  auto score = [&](double theta) {
    auto a = detail::best_at_theta(g, theta);
    return std::pair{detail::thm1_bounds_raw(g, a).min(), a};
  };
  if (m > 1) {
    // The product grid cannot resolve small p21, so every theta is also scored
    // with the exact inner solve before refining.
    auto [val, alloc] = score(best.theta);
    double theta = best.theta;
    for (std::size_t l = 0; l < m; ++l) {
      auto [v, a] = score(theta_at(l));
      if (v > val) {
        val = v;
        alloc = a;
        theta = theta_at(l);
      }
    }
    for (std::size_t round = 0; round < grid.refine_rounds; ++round) {
      double step = g.alpha / static_cast<double>(m - 1);
      while (step > 1e-13 * std::max(1.0, g.alpha)) {
        bool moved = false;
        for (double cand : {theta + step, theta - step}) {
          cand = std::clamp(cand, 0.0, g.alpha);
          auto [v, a] = score(cand);
          if (v > val) {
            val = v;
            alloc = a;
            theta = cand;
            moved = true;
            break;
          }
        }
        if (!moved) step *= 0.5;
      }
    }
    if (val > best_val) best = alloc;
  } else {
    auto a = detail::best_at_theta(g, 0.0);
    if (detail::thm1_bounds_raw(g, a).min() > best_val) best = a;
  }

  best.alpha = g.alpha;
  CapacityResult r;
  r.bounds = detail::thm1_bounds_raw(g, best);
  r.rate = r.bounds.min();
  r.allocation = best;
  r.binding_bound = detail::binding_of(r.bounds);
  return r;
}

/// Phase-fading capacity in closed form:
///   min{ max(|c31|^2, |c21|^2) P1, |c31|^2 P1 + |c32|^2 P2 }.
inline double thm1_phase_fading(const ChannelConfig& cfg) {
  require(cfg, Topology::SingleRelay, "thm1_phase_fading");
  require(cfg, CsiMode::PhaseFading, "thm1_phase_fading");
  const auto& c21 = cfg.gain("c21");
  const auto& c31 = cfg.gain("c31");
  const double n21 = c21.norm_sq();
  const double n31 = c31.norm_sq();
  const double g32 = cfg.gain("c32").norm_sq();
  const double p1 = cfg.power("P1");
  const double p2 = cfg.power("P2");
  return std::min(std::max(n31, n21) * p1, n31 * p1 + g32 * p2);
}

// ---------------------------------------------------------------------------
// Matrix form of the same bounds.

/// relay bound:  c31^H B c31 + c21^H A c21
/// MAC bound:    c31^H (A + B + beta^2 P1 u u^H) c31 + |c32|^2 P2
///               + 2 Re{beta c32 c31^H u} sqrt(P1 P2)
/// subject to tr A + tr B + beta^2 P1 <= P1, A, B PSD, 0 <= beta <= 1, |u| = 1.
inline BoundPair matrix_bound_eval(const ChannelConfig& cfg, const MatrixBoundParams& params) {
  require(cfg, Topology::SingleRelay, "matrix_bound_eval");
  const auto& c21 = cfg.gain("c21");
  const auto& c31 = cfg.gain("c31");
  const Complex c32 = cfg.gain("c32")[0];
  const double p1 = cfg.power("P1");
  const double p2 = cfg.power("P2");
  if (params.a.dim() != c21.dim() || params.b.dim() != c21.dim() || params.u.dim() != c21.dim())
    throw ValidationError("matrix_params", "dimension does not match the source antennas");

  if (!(params.beta >= 0.0 && params.beta <= 1.0 + 1e-12))
    throw ValidationError("beta", "correlation coefficient must lie in [0, 1]");
  if (std::abs(params.u.norm() - 1.0) > 1e-9) throw ValidationError("u", "must be a unit vector");
  if (!is_psd(params.a, 1e-12)) throw ValidationError("A", "must be positive semidefinite");
  if (!is_psd(params.b, 1e-12)) throw ValidationError("B", "must be positive semidefinite");
  const double used = params.a.trace() + params.b.trace() + params.beta * params.beta * p1;
  if (used > p1 + detail::budget_slack(p1))
    throw ValidationError("trace_budget", "tr A + tr B + beta^2 P1 exceeds P1");

  const auto corr = HermitianMatrix::outer(params.u, params.beta * params.beta * p1);
  BoundPair out;
  out.relay_decode = params.b.quad(c31) + params.a.quad(c21);
  out.mac_combine = (params.a + params.b + corr).quad(c31) + std::norm(c32) * p2 +
                    2.0 * (params.beta * c32 * inner(c31, params.u)).real() * std::sqrt(p1 * p2);
  return out;
}

struct MatrixSearchSpec {
  std::size_t angle_points = 48;  // per rank-one direction, over [0, pi)
  std::size_t starts = 6;         // best grid points refined locally
};

struct MatrixSearchResult {
  CapacityResult result;
  double residual_trace = 0.0;  // isotropic part of A + B at the optimum
};

namespace detail {

// max over x >= 0, sum x = r of min(s1 . x, s2 . x + h). Basic solutions of the
// epigraph LP have at most two nonzero coordinates, so vertices and
// edge crossings cover the optimum.
template <std::size_t N>
inline std::pair<double, std::array<double, N>> max_min_on_simplex(const std::array<double, N>& s1,
                                                                   const std::array<double, N>& s2, double h,
                                                                   double r) {
  std::array<double, N> best_x{};
  double best = -std::numeric_limits<double>::infinity();
  auto consider = [&](const std::array<double, N>& x) {
    double f1 = 0.0, f2 = h;
    for (std::size_t i = 0; i < N; ++i) {
      f1 += s1[i] * x[i];
      f2 += s2[i] * x[i];
    }
    const double v = std::min(f1, f2);
    if (v > best) {
      best = v;
      best_x = x;
    }
  };
  if (r <= 0.0) {
    consider(std::array<double, N>{});
    return {best, best_x};
  }
  for (std::size_t i = 0; i < N; ++i) {
    std::array<double, N> x{};
    x[i] = r;
    consider(x);
  }
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = i + 1; j < N; ++j) {
      // x_i = r - t, x_j = t; f1 - f2 = d_i r + (d_j - d_i) t - h with d = s1 - s2.
      const double di = s1[i] - s2[i];
      const double dj = s1[j] - s2[j];
      if (dj == di) continue;
      const double t = (h - di * r) / (dj - di);
      if (t > 0.0 && t < r) {
        std::array<double, N> x{};
        x[i] = r - t;
        x[j] = t;
        consider(x);
      }
    }
  return {best, best_x};
}

struct MatrixSearchFrame {
  PlaneFrame frame;
  ChannelVector u;
  double n21, n31, g32, p1, p2;
  ChannelVector c21, c31;
};

inline MatrixSearchFrame matrix_search_frame(const ChannelConfig& cfg) {
  const auto& c21 = cfg.gain("c21");
  const auto& c31 = cfg.gain("c31");
  const Complex c32 = cfg.gain("c32")[0];
  MatrixSearchFrame f{PlaneFrame{}, ChannelVector{}, c21.norm_sq(), c31.norm_sq(), std::norm(c32),
                      cfg.power("P1"), cfg.power("P2"), c21, c31};
  const std::size_t dim = c21.dim();
  auto basis = [&](std::size_t k) {
    std::vector<Complex> e(dim, Complex{0.0, 0.0});
    e[k] = 1.0;
    return ChannelVector(std::move(e));
  };
  if (!c21.is_zero() && !c31.is_zero()) {
    f.frame = plane_frame(c21, c31);
  } else {
    const ChannelVector& lead = !c21.is_zero() ? c21 : (!c31.is_zero() ? c31 : basis(0));
    f.frame = plane_frame(lead, lead);
  }
  // u along c31, phased so that c32 c31^H u is real and nonnegative.
  if (c31.is_zero()) {
    f.u = f.frame.e1;
  } else {
    const Complex ph = std::abs(c32) > 0.0 ? std::conj(c32) / std::abs(c32) : Complex{1.0, 0.0};
    f.u = c31.scaled(ph / c31.norm());
  }
  return f;
}

struct MatrixCandidate {
  double value = -std::numeric_limits<double>::infinity();
  double psi = 0.0, phi = 0.0, beta = 0.0;
  std::array<double, 4> weights{};  // rank-one A, rank-one B, isotropic A, isotropic B
};

inline MatrixCandidate matrix_candidate_at(const MatrixSearchFrame& f, double psi, double phi, double beta) {
  const auto wa = f.frame.direction(psi);
  const auto wb = f.frame.direction(phi);
  const double dim = static_cast<double>(f.c21.dim());
  const double a21 = std::norm(inner(f.c21, wa));
  const double a31 = std::norm(inner(f.c31, wa));
  const double b31 = std::norm(inner(f.c31, wb));
  const std::array<double, 4> s1{a21, b31, f.n21 / dim, f.n31 / dim};
  const std::array<double, 4> s2{a31, b31, f.n31 / dim, f.n31 / dim};
  const double cu = std::norm(inner(f.c31, f.u));
  const double h = beta * beta * f.p1 * cu + f.g32 * f.p2 +
                   2.0 * beta * std::sqrt(f.g32) * std::sqrt(cu) * std::sqrt(f.p1 * f.p2);
  const double r = f.p1 * (1.0 - beta * beta);
  auto [v, x] = max_min_on_simplex<4>(s1, s2, h, r);
  return MatrixCandidate{v, psi, phi, beta, x};
}

// Best beta at fixed directions. In s = beta^2 P1 the constant term of the MAC
// bound is concave and the budget is affine, so the LP value is concave in s.
inline MatrixCandidate matrix_candidate(const MatrixSearchFrame& f, double psi, double phi) {
  auto at = [&](double s) { return matrix_candidate_at(f, psi, phi, f.p1 > 0.0 ? std::sqrt(std::clamp(s / f.p1, 0.0, 1.0)) : 0.0); };
  double lo = 0.0, hi = f.p1;
  constexpr double inv_phi = 0.6180339887498949;
  double x1 = hi - inv_phi * (hi - lo), x2 = lo + inv_phi * (hi - lo);
  auto c1 = at(x1), c2 = at(x2);
  while (hi - lo > 1e-13 * std::max(1.0, f.p1)) {
    if (c1.value < c2.value) {
      lo = x1;
      x1 = x2;
      c1 = c2;
      x2 = lo + inv_phi * (hi - lo);
      c2 = at(x2);
    } else {
      hi = x2;
      x2 = x1;
      c2 = c1;
      x1 = hi - inv_phi * (hi - lo);
      c1 = at(x1);
    }
  }
  auto best = c1.value >= c2.value ? c1 : c2;
  for (double edge : {0.0, f.p1}) {
    auto c = at(edge);
    if (c.value > best.value) best = c;
  }
  return best;
}

}  // namespace detail

/// Independent search over the matrix-form bound: A and B are each a rank-one
/// term at a free angle in the real plane of c21, c31 plus an isotropic
/// residual. For fixed angles and beta the best trace split is an exact small
/// LP, and beta is then solved by golden section. The final value is re-evaluated through
/// matrix_bound_eval on the constructed matrices. Complex directions outside
/// the real plane only lower both quadratic forms, so the plane suffices.
inline MatrixSearchResult matrix_bound_search(const ChannelConfig& cfg, const MatrixSearchSpec& spec = {}) {
  require(cfg, Topology::SingleRelay, "matrix_bound_search");
  require(cfg, CsiMode::Synchronous, "matrix_bound_search");
  if (spec.angle_points < 2) throw DomainError("matrix_bound_search: grid too small");
  const auto f = detail::matrix_search_frame(cfg);
  const double pi = std::numbers::pi;

  std::vector<detail::MatrixCandidate> top;
  const std::size_t keep = std::max<std::size_t>(1, spec.starts);
  for (std::size_t i = 0; i < spec.angle_points; ++i)
    for (std::size_t j = 0; j < spec.angle_points; ++j) {
      const double psi = pi * static_cast<double>(i) / static_cast<double>(spec.angle_points);
      const double phi = pi * static_cast<double>(j) / static_cast<double>(spec.angle_points);
      auto c = detail::matrix_candidate(f, psi, phi);
      if (top.size() < keep || c.value > top.back().value) {
        top.push_back(c);
        std::sort(top.begin(), top.end(), [](const auto& a, const auto& b) { return a.value > b.value; });
        if (top.size() > keep) top.pop_back();
      }
    }

  // Pattern search over both angles, compass and diagonal moves, halving the step.
  detail::MatrixCandidate best = top.front();
  const double step0 = pi / static_cast<double>(spec.angle_points);
  constexpr std::array<std::array<double, 2>, 8> moves{
      {{1, 0}, {-1, 0}, {0, 1}, {0, -1}, {1, 1}, {1, -1}, {-1, 1}, {-1, -1}}};
  for (auto cur : top) {
    double step = step0;
    while (step > 1e-12) {
      bool moved = false;
      for (const auto& mv : moves) {
        auto c = detail::matrix_candidate(f, cur.psi + mv[0] * step, cur.phi + mv[1] * step);
        if (c.value > cur.value) {
          cur = c;
          moved = true;
          break;
        }
      }
      if (!moved) step *= 0.5;
    }
    if (cur.value > best.value) best = cur;
  }

  const std::size_t dim = f.c21.dim();
  const auto eye = HermitianMatrix::identity(dim);
  const double inv_dim = 1.0 / static_cast<double>(dim);
  MatrixBoundParams params;
  params.a = HermitianMatrix::outer(f.frame.direction(best.psi), best.weights[0]) + (best.weights[2] * inv_dim) * eye;
  params.b = HermitianMatrix::outer(f.frame.direction(best.phi), best.weights[1]) + (best.weights[3] * inv_dim) * eye;
  params.beta = best.beta;
  params.u = f.u;

  MatrixSearchResult out;
  out.result.bounds = matrix_bound_eval(cfg, params);
  out.result.rate = out.result.bounds.min();
  out.result.allocation = params;
  out.result.binding_bound = detail::binding_of(out.result.bounds);
  out.residual_trace = best.weights[2] + best.weights[3];
  return out;
}

/// Matrix parameters that reproduce a closed-form allocation exactly:
/// A = p21 w w^H with w at angle theta from c31 toward c21, B = p31 c31 c31^H / |c31|^2,
/// beta^2 P1 = pb1, u along c31 phased to align with c32.
inline MatrixBoundParams matrix_params_from_allocation(const ChannelConfig& cfg, const PowerAllocation& alloc) {
  require(cfg, Topology::SingleRelay, "matrix_params_from_allocation");
  const auto f = detail::matrix_search_frame(cfg);
  const double alpha = f.frame.alpha;
  MatrixBoundParams p;
  p.a = HermitianMatrix::outer(f.frame.direction(alpha - alloc.theta), alloc.p21);
  p.b = HermitianMatrix::outer(f.frame.direction(alpha), alloc.p31);
  p.beta = f.p1 > 0.0 ? std::sqrt(std::clamp(alloc.pb1 / f.p1, 0.0, 1.0)) : 0.0;
  p.u = f.u;
  return p;
}

}  // namespace lprelay
