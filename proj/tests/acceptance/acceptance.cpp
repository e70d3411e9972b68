// One PASS/FAIL line per acceptance criterion; exit status 1 if any fail.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <iostream>
#include <limits>
#include <random>
#include <sstream>
#include <string>

#include <Eigen/Eigenvalues>

#include "lprelay/capacity.hpp"
#include "lprelay/matrix.hpp"
#include "lprelay/region.hpp"
#include "lprelay/repro.hpp"
#include "lprelay/wideband.hpp"

using namespace lprelay;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  void check(bool ok, const std::string& what) {
    if (!ok && pass) detail << "first failure: " << what << "; ";
    pass = pass && ok;
  }
};

int failures = 0;

void criterion(int id, const std::string& name, double budget_s, const std::function<void(Outcome&)>& body) {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(o);
  } catch (const std::exception& e) {
    o.check(false, std::string("exception: ") + e.what());
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  o.check(secs < budget_s, "runtime " + std::to_string(secs) + " s over budget");
  if (!o.pass) ++failures;
  std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << id << ": " << name << " (" << std::fixed
            << std::setprecision(2) << secs << " s) " << o.detail.str() << std::endl;
}

ChannelVector random_vector(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  return ChannelVector{Complex{g(rng), g(rng)}, Complex{g(rng), g(rng)}};
}

ChannelConfig single(const ChannelVector& c21, const ChannelVector& c31, Complex c32, double p1, double p2,
                     CsiMode csi) {
  return ChannelConfig(Topology::SingleRelay, csi, 1.0, {{"P1", p1}, {"P2", p2}},
                       {{"c21", c21}, {"c31", c31}, {"c32", ChannelVector{c32}}});
}

ChannelConfig diamond(const ChannelVector& c21, const ChannelVector& c31, CsiMode csi, double p1, double p2 = 1.0,
                      double p3 = 1.0, Complex c42 = 1.0, Complex c43 = 1.0) {
  return ChannelConfig(Topology::TwoRelayDiamond, csi, 1.0, {{"P1", p1}, {"P2", p2}, {"P3", p3}},
                       {{"c21", c21}, {"c31", c31}, {"c42", ChannelVector{c42}}, {"c43", ChannelVector{c43}}});
}

// Vertex enumeration of min R0/c0 + R2'/c2 + R3'/c3 subject to
// R0 + R2' >= r2, R0 + R3' >= r3, R0 + R2' + R3' >= r, all >= 0.
double lp_min_power(double r2, double r3, double r, double c2, double c3, double c0) {
  const std::array<std::array<double, 4>, 6> rows{
      {{1, 1, 0, r2}, {1, 0, 1, r3}, {1, 1, 1, r}, {1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}}};
  const std::array<double, 3> cost{1.0 / c0, 1.0 / c2, 1.0 / c3};
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 6; ++i)
    for (int j = i + 1; j < 6; ++j)
      for (int k = j + 1; k < 6; ++k) {
        Eigen::Matrix3d m;
        Eigen::Vector3d b;
        for (int r = 0; r < 3; ++r) {
          const auto& row = rows[r == 0 ? i : r == 1 ? j : k];
          m.row(r) << row[0], row[1], row[2];
          b(r) = row[3];
        }
        if (std::abs(m.determinant()) < 1e-12) continue;
        const Eigen::Vector3d x = m.partialPivLu().solve(b);
        bool feasible = true;
        for (const auto& row : rows) feasible = feasible && row[0] * x(0) + row[1] * x(1) + row[2] * x(2) >= row[3] - 1e-12;
        if (feasible) best = std::min(best, cost[0] * x(0) + cost[1] * x(1) + cost[2] * x(2));
      }
  return best;
}

Eigen::Matrix2cd random_psd(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::Matrix2cd m;
  m << Complex{g(rng), g(rng)}, Complex{g(rng), g(rng)}, Complex{g(rng), g(rng)}, Complex{g(rng), g(rng)};
  return m * m.adjoint();
}

// Largest s with X - s M >= 0, for X > 0 and M >= 0.
double max_scale_below(const Eigen::Matrix2cd& x, const Eigen::Matrix2cd& m) {
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::Matrix2cd> es(m, x);
  const double top = es.eigenvalues().maxCoeff();
  return top > 0.0 ? 1.0 / top : std::numeric_limits<double>::infinity();
}

double quad(const Eigen::Matrix2cd& m, const ChannelVector& c) {
  const Eigen::Vector2cd v(c[0], c[1]);
  return (v.adjoint() * m * v)(0, 0).real();
}

}  // namespace

int main() {
  criterion(1, "counterexample reproduces the reference table", 1.0, [](Outcome& o) {
    const auto r = run_counterexample();
    for (const auto& row : r.rows)
      o.check(row.pass(), row.quantity + " = " + format_number(row.computed) + " vs " + format_number(row.reference));
    o.check(r.gap > 0.0, "gap > 0");
    o.check(r.all_match, "all_match");
    o.detail << "P_required = " << format_number(r.p_required, 6) << ", gap = " << format_number(r.gap, 4) << "; ";
  });

  criterion(2, "wideband limits and chain identity", 60.0, [](Outcome& o) {
    std::mt19937_64 rng(2002);
    std::uniform_real_distribution<double> pw(0.1, 5.0);
    std::normal_distribution<double> g;
    const auto bws = default_bandwidths();
    double worst = 0.0;
    for (int t = 0; t < 10; ++t) {
      const auto c = random_vector(rng);
      const auto rep = check_limit_constant_phase(c, aligned_covariance(c, pw(rng)), 1.0, bws);
      const double e = rep.abs_err(bws.size() - 1);
      worst = std::max(worst, e / rep.target);
      o.check(e < 1e-3 * rep.target, "gaussian instance " + std::to_string(t));
      o.check(e < rep.abs_err(0), "gaussian error not below B = 10 error");
    }
    for (int t = 0; t < 10; ++t) {
      DiscreteJoint j;
      const int k = 6;
      const double scale = std::sqrt(pw(rng));
      for (int i = 0; i < k; ++i)
        j.atoms.push_back({i % 3, {scale * Complex{g(rng), g(rng)}, scale * Complex{g(rng), g(rng)}}, 1.0 / k});
      const auto c1 = random_vector(rng), c2 = random_vector(rng);
      const auto r = check_conditional_limits(j, c1, c2, 1.0, bws, 7 + t);
      for (const auto* rep : {&r.x_y1, &r.u_y1, &r.x_y1_given_u, &r.x_y2_given_u}) {
        const double e = rep->abs_err(bws.size() - 1);
        worst = std::max(worst, e / std::max(rep->target, 1e-300));
        o.check(e < 1e-3 * rep->target, "discrete instance " + std::to_string(t));
        o.check(e < rep->abs_err(0), "discrete error not below B = 10 error");
      }
      o.check(r.chain_holds(), "chain identity, instance " + std::to_string(t));
    }
    o.detail << "worst relative error at B = 1e5: " << format_number(worst, 3) << "; ";
  });

  criterion(3, "single-relay optimizer agrees with matrix search", 300.0, [](Outcome& o) {
    std::mt19937_64 rng(3003);
    std::uniform_real_distribution<double> pw(0.1, 4.0);
    std::normal_distribution<double> g;
    double worst = 0.0, worst_ach = 0.0;
    for (int t = 0; t < 50; ++t) {
      const auto cfg = single(random_vector(rng), random_vector(rng), Complex{g(rng), g(rng)}, pw(rng), pw(rng),
                              CsiMode::Synchronous);
      const auto a = thm1_optimize(cfg);
      const auto b = matrix_bound_search(cfg);
      const double rel = std::abs(a.rate - b.result.rate) / a.rate;
      worst = std::max(worst, rel);
      o.check(rel <= 1e-3, "instance " + std::to_string(t) + " relative disagreement " + format_number(rel, 3));
      const double ach = std::abs(thm1_achievable(cfg, std::get<PowerAllocation>(a.allocation)) - a.rate);
      worst_ach = std::max(worst_ach, ach);
      o.check(ach <= 1e-6, "achievable rate differs from the bound");
    }
    o.detail << "worst relative disagreement " << format_number(worst, 3) << ", achievable gap "
             << format_number(worst_ach, 3) << "; ";
  });

  criterion(4, "phase-fading closed form against min/max oracle", 10.0, [](Outcome& o) {
    std::mt19937_64 rng(4004);
    std::uniform_real_distribution<double> pw(0.1, 4.0);
    std::normal_distribution<double> g;
    const ChannelVector zero{Complex{0, 0}, Complex{0, 0}};
    for (int t = 0; t < 100; ++t) {
      auto c21 = random_vector(rng);
      const auto c31 = random_vector(rng);
      Complex c32{g(rng), g(rng)};
      if (t % 10 == 0) c21 = zero;
      if (t % 10 == 1) c32 = 0.0;
      const double p1 = pw(rng), p2 = pw(rng);
      const auto cfg = single(c21, c31, c32, p1, p2, CsiMode::PhaseFading);
      const double relay = std::max(c21.norm_sq(), c31.norm_sq()) * p1;
      const double mac = c31.norm_sq() * p1 + std::norm(c32) * p2;
      const double want = std::min(relay, mac);
      const double got = thm1_phase_fading(cfg);
      o.check(std::abs(got - want) <= 1e-12 * std::max(1.0, want), "instance " + std::to_string(t));
      if (t % 10 < 2) o.check(std::abs(got - c31.norm_sq() * p1) <= 1e-12 * std::max(1.0, got), "degenerate case");
    }
  });

  criterion(5, "MAC endpoints and concave sum rate", 10.0, [](Outcome& o) {
    std::mt19937_64 rng(5005);
    std::uniform_real_distribution<double> u(0.1, 3.0);
    std::normal_distribution<double> g;
    for (int t = 0; t < 50; ++t) {
      const Complex c42{g(rng), g(rng)}, c43{g(rng), g(rng)};
      const double p2 = u(rng), p3 = u(rng);
      const auto cfg = diamond(random_vector(rng), random_vector(rng), CsiMode::Synchronous, 1.0, p2, p3, c42, c43);
      const double a = std::norm(c42) * p2, b = std::norm(c43) * p3;
      const auto m0 = mac_region_point(cfg, MacCorrelation(0.0));
      o.check(m0.r23 == a && m0.r32 == b && std::abs(m0.r_sum - (a + b)) <= 1e-15 * (a + b), "rho = 0 endpoint");
      const auto m1 = mac_region_point(cfg, MacCorrelation(1.0));
      const double coh = std::pow(std::abs(c42) * std::sqrt(p2) + std::abs(c43) * std::sqrt(p3), 2);
      o.check(m1.r23 == 0.0 && m1.r32 == 0.0 && std::abs(m1.r_sum - coh) <= 1e-13 * coh, "rho = 1 endpoint");
      std::vector<double> s;
      for (int i = 0; i <= 50; ++i) s.push_back(mac_region_point(cfg, MacCorrelation(i / 50.0)).r_sum);
      for (std::size_t i = 1; i + 1 < s.size(); ++i)
        o.check(s[i + 1] - 2 * s[i] + s[i - 1] <= 1e-12 * coh, "second difference positive");
    }
  });

  criterion(6, "conditional covariance bound on random joints", 10.0, [](Outcome& o) {
    std::mt19937_64 rng(6006);
    std::uniform_int_distribution<int> size(3, 9), yval(0, 3);
    std::normal_distribution<double> g;
    std::uniform_real_distribution<double> w(0.05, 1.0);
    int done = 0;
    double worst = std::numeric_limits<double>::infinity();
    while (done < 200) {
      FiniteJoint j;
      const int n = size(rng);
      double total = 0.0;
      for (int k = 0; k < n; ++k) {
        j.atoms.push_back({{Complex{g(rng), g(rng)}, Complex{g(rng), g(rng)}}, Complex{double(yval(rng)), 0.0}, w(rng)});
        total += j.atoms.back().p;
      }
      for (auto& a : j.atoms) a.p /= total;
      bool constant = true;
      for (const auto& a : j.atoms) constant = constant && a.y == j.atoms.front().y;
      if (constant) continue;
      const auto r = conditional_cov_bound_check(j);
      worst = std::min(worst, r.verdict.min_eigenvalue_of_difference);
      o.check(r.verdict.min_eigenvalue_of_difference >= -1e-9, "joint " + std::to_string(done));
      ++done;
    }
    o.detail << "smallest eigenvalue of rhs - lhs: " << format_number(worst, 3) << "; ";
  });

  criterion(7, "min_power closed form against LP oracle", 10.0, [](Outcome& o) {
    std::mt19937_64 rng(7007);
    std::uniform_real_distribution<double> u(0.0, 1.0), gain(0.2, 3.0);
    double worst = 0.0;
    for (int t = 0; t < 1000; ++t) {
      const double n2 = gain(rng), n3 = gain(rng);
      const auto a = random_vector(rng), b = random_vector(rng);
      const double c0 = max_min_beam(a.scaled(std::sqrt(n2) / a.norm()), b.scaled(std::sqrt(n3) / b.norm()));
      const double r2 = 3 * u(rng), r3 = 3 * u(rng);
      const double r = std::max(r2, r3) + u(rng) * std::min(r2, r3);
      const double err = std::abs(min_power(r2, r3, r, n2, n3, c0).p_total - lp_min_power(r2, r3, r, n2, n3, c0));
      worst = std::max(worst, err);
      o.check(err <= 1e-6, "triple " + std::to_string(t));
    }
    const double p = min_power(1.9149, 0.9636, 1.9636, 1.0, 1.0, 0.9605).p_total;
    o.check(std::abs(p - 2.0011) <= 2e-3, "reference triple");
    o.detail << "worst LP disagreement " << format_number(worst, 3) << ", reference triple " << format_number(p, 6)
             << "; ";
  });

  criterion(8, "common/private sweep covers the broadcast outer bound", 600.0, [](Outcome& o) {
    std::mt19937_64 rng(8008);
    std::uniform_real_distribution<double> u(0.2, 1.5), f(0.3, 0.95);
    double worst = -std::numeric_limits<double>::infinity();
    for (int t = 0; t < 10; ++t) {
      ChannelVector c21, c31;
      const double a = u(rng), b = u(rng);
      if (t < 5) {  // |c21k| <= |c31k| on both antennas
        c31 = ChannelVector{Complex{a, 0}, Complex{0, b}};
        c21 = ChannelVector{Complex{f(rng) * a, 0}, Complex{f(rng) * b, 0}};
      } else {  // crossed: each relay stronger on one antenna
        c21 = ChannelVector{Complex{f(rng) * a, 0}, Complex{b, 0}};
        c31 = ChannelVector{Complex{a, 0}, Complex{0, f(rng) * b}};
      }
      const auto cfg = diamond(c21, c31, CsiMode::PhaseFading, 2.0);
      const auto rep = bc_outer_vs_common_private(cfg);
      worst = std::max(worst, rep.max_gap / rep.resolution);
      o.check(rep.max_gap <= 2.0 * rep.resolution, "instance " + std::to_string(t) + " gap " +
                                                       format_number(rep.max_gap, 3) + " vs resolution " +
                                                       format_number(rep.resolution, 3));
    }
    o.detail << "worst gap / resolution " << format_number(worst, 3) << "; ";
  });

  criterion(9, "beamforming frontier dominates random covariance draws", 60.0, [](Outcome& o) {
    std::mt19937_64 rng(9009);
    std::uniform_real_distribution<double> u(0.0, 1.0), pw(0.5, 4.0);
    int checked = 0;
    double worst = std::numeric_limits<double>::infinity();
    for (int t = 0; t < 10; ++t) {
      // c31 close to a scaled copy of c21 so the condition holds; odd instances swap roles.
      auto c21 = random_vector(rng);
      auto c31 = c21.scaled(0.4 + 0.5 * u(rng)) + random_vector(rng).scaled(0.05);
      if (!thm3_condition(c21, c31)) {
        --t;
        continue;
      }
      if (t % 2) std::swap(c21, c31);
      const double p = pw(rng);
      const auto cfg = diamond(c21, c31, CsiMode::Synchronous, p);
      const bool swapped = c21.norm_sq() < c31.norm_sq();
      const auto& strong = swapped ? c31 : c21;
      const auto& weak = swapped ? c21 : c31;
      for (int k = 0; k < 100; ++k) {
        Eigen::Matrix2cd x = random_psd(rng) + 1e-3 * Eigen::Matrix2cd::Identity();
        x *= p / x.trace().real();
        const Eigen::Matrix2cd ma = random_psd(rng), mb = random_psd(rng);
        const Eigen::Matrix2cd a = u(rng) * max_scale_below(x, ma) * ma;
        const Eigen::Matrix2cd b = u(rng) * max_scale_below(x, mb) * mb;
        // Outer triple at (X, A, B).
        const double r2o = quad(x - a, c21);
        const double r3o = quad(x - b, c31);
        const double ro = std::min(r3o + quad(b, c21), r2o + quad(a, c31));
        const double weak_target = std::min(swapped ? r2o : r3o, ro);
        // Frontier point: just enough common power for the weak relay, the rest private to the strong one.
        const double alpha3 = std::max(0.0, weak_target) / (weak.norm_sq() * weak.norm_sq());
        const double alpha2 = std::max(0.0, p - alpha3 * weak.norm_sq()) / strong.norm_sq();
        const auto reg = thm3_region(cfg, {alpha2, alpha3});
        const double r_strong = swapped ? reg.rates.r3 : reg.rates.r2;
        const double r_weak = swapped ? reg.rates.r2 : reg.rates.r3;
        const double tol = 1e-9 * std::max(1.0, ro);
        worst = std::min(worst, r_strong - ro);
        o.check(alpha3 * weak.norm_sq() <= p * (1 + 1e-12), "common stream alone exceeds the budget");
        o.check(r_weak >= weak_target - tol, "weak relay rate");
        o.check(r_strong >= ro - tol, "total rate");
        ++checked;
      }
    }
    o.check(checked == 1000, "draw count");
    o.check(!thm3_condition(unit_vector_at_angle(0.0), unit_vector_at_angle(0.4)), "reference geometry");
    o.detail << checked << " draws, smallest frontier margin " << format_number(worst, 3) << "; ";
  });

  return failures == 0 ? 0 : 1;
}
