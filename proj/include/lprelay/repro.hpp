#pragma once

// Synchronous diamond instance where the single-letter outer bound cannot be
// met by common/private messaging: unit-norm c21, c31 at angle 0.4, covariance
// X with tr X = 2, and the rate triple it induces needs more than 2 units of
// power under any common/private split.

#include <cmath>
#include <iomanip>
#include <locale>
#include <sstream>
#include <string>
#include <vector>

#include "lprelay/channel.hpp"
#include "lprelay/format.hpp"
#include "lprelay/matrix.hpp"
#include "lprelay/region.hpp"

namespace lprelay {

struct ComparisonRow {
  std::string quantity;
  double computed = 0.0;
  double reference = 0.0;
  double tolerance = 0.0;
  double abs_err() const { return std::abs(computed - reference); }
  bool pass() const { return abs_err() <= tolerance; }
};

struct CounterexampleRates {
  double r2 = 0.0;
  double r3 = 0.0;
  double ra = 0.0;
  double rb = 0.0;
};

struct CounterexampleReport {
  double alpha = 0.0;
  ChannelVector c21;
  ChannelVector c31;
  ChannelVector v;
  HermitianMatrix x = HermitianMatrix::zero(2);
  HermitianMatrix a = HermitianMatrix::zero(2);
  HermitianMatrix b = HermitianMatrix::zero(2);
  HermitianMatrix x_minus_a = HermitianMatrix::zero(2);
  std::pair<double, double> eigs;
  CounterexampleRates rates;
  double c0_sq = 0.0;
  MinPowerResult min_power_split;
  double p_required = 0.0;
  double trace_x = 0.0;
  double gap = 0.0;
  // Ordering checks on the covariance pieces.
  LoewnerVerdict x_vs_a;
  LoewnerVerdict x_vs_b;
  LoewnerVerdict a_vs_0;
  LoewnerVerdict b_vs_0;
  std::vector<ComparisonRow> rows;
  bool all_match = false;
};

inline CounterexampleReport run_counterexample() {
  CounterexampleReport r;
  r.alpha = 0.4;
  constexpr double v_angle = 0.208;
  constexpr double a_weight = 0.05;
  r.c21 = unit_vector_at_angle(0.0);
  r.c31 = unit_vector_at_angle(r.alpha);
  r.v = unit_vector_at_angle(v_angle);

  r.b = HermitianMatrix::outer(r.c21);
  r.a = HermitianMatrix::outer(r.c31, a_weight);
  const auto x_minus_b = HermitianMatrix::outer(r.v);
  r.x = x_minus_b + r.b;
  r.x_minus_a = r.x - r.a;
  const auto ev = eigenvalues(r.x_minus_a);
  r.eigs = {ev[0], ev[1]};

  r.rates.r2 = r.x_minus_a.quad(r.c21);
  r.rates.r3 = x_minus_b.quad(r.c31);
  r.rates.ra = r.rates.r3 + r.b.quad(r.c21);
  r.rates.rb = r.rates.r2 + r.a.quad(r.c31);

  r.c0_sq = max_min_beam(r.c21, r.c31);
  const double r_total = std::min(r.rates.ra, r.rates.rb);
  r.min_power_split = min_power(r.rates.r2, r.rates.r3, r_total, r.c21.norm_sq(), r.c31.norm_sq(), r.c0_sq);
  r.p_required = r.min_power_split.p_total;
  r.trace_x = r.x.trace();
  r.gap = r.p_required - r.trace_x;

  const auto zero = HermitianMatrix::zero(2);
  r.x_vs_a = loewner_compare(r.x, r.a);
  r.x_vs_b = loewner_compare(r.x, r.b);
  r.a_vs_0 = loewner_compare(r.a, zero);
  r.b_vs_0 = loewner_compare(r.b, zero);

  constexpr double tol4 = 1e-4;
  r.rows = {
      {"c31[0]", r.c31[0].real(), 0.9211, tol4},
      {"c31[1]", r.c31[1].real(), 0.3894, tol4},
      {"v[0]", r.v[0].real(), 0.9784, tol4},
      {"v[1]", r.v[1].real(), 0.2065, tol4},
      {"(X-A)[0,0]", r.x_minus_a(0, 0).real(), 1.9149, tol4},
      {"(X-A)[0,1]", r.x_minus_a(0, 1).real(), 0.1841, tol4},
      {"(X-A)[1,0]", r.x_minus_a(1, 0).real(), 0.1841, tol4},
      {"(X-A)[1,1]", r.x_minus_a(1, 1).real(), 0.03506, tol4},
      {"eig_min(X-A)", r.eigs.first, 0.01720, tol4},
      {"eig_max(X-A)", r.eigs.second, 1.9328, tol4},
      {"R2", r.rates.r2, 1.9149, tol4},
      {"R3", r.rates.r3, 0.9636, tol4},
      {"Ra", r.rates.ra, 1.9636, tol4},
      {"Rb", r.rates.rb, 1.9649, tol4},
      {"c0^2", r.c0_sq, 0.9605, tol4},
      // Reference value was computed from rounded intermediates.
      {"P_required", r.p_required, 2.0011, 2e-3},
      {"tr X", r.trace_x, 2.0, 1e-12},
  };
  bool ok = r.gap > 0.0 && r.x_vs_a.relation == LoewnerRelation::StrictlyGreater;
  for (const auto& row : r.rows) ok = ok && row.pass();
  r.all_match = ok;
  return r;
}

inline std::string counterexample_footer() {
  return "note: this checks the numbers only; whether every positive definite (X, A, B)\n"
         "with X > A, B is a realisable set of covariances is not established.\n";
}

inline std::string counterexample_table(const CounterexampleReport& r) {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os << std::left << std::setw(14) << "quantity" << std::right << std::setw(14) << "computed" << std::setw(12)
     << "reference" << std::setw(12) << "abs_err" << std::setw(6) << "pass" << '\n';
  for (const auto& row : r.rows) {
    os << std::left << std::setw(14) << row.quantity << std::right << std::setw(14) << format_number(row.computed, 7)
       << std::setw(12) << format_number(row.reference, 6) << std::setw(12) << format_number(row.abs_err(), 3)
       << std::setw(6) << (row.pass() ? "yes" : "no") << '\n';
  }
  os << "gap = P_required - tr X = " << format_number(r.gap, 6) << (r.gap > 0.0 ? " > 0" : " <= 0") << '\n';
  os << "X - A: " << to_string(r.x_vs_a.relation) << ", X - B: " << to_string(r.x_vs_b.relation)
     << ", A: " << to_string(r.a_vs_0.relation) << ", B: " << to_string(r.b_vs_0.relation) << '\n';
  os << "all match: " << (r.all_match ? "yes" : "no") << '\n';
  os << counterexample_footer();
  return os.str();
}

inline std::string counterexample_csv(const CounterexampleReport& r) {
  std::string out = csv_row({"quantity", "computed", "reference", "abs_err", "pass"});
  for (const auto& row : r.rows)
    out += csv_row({row.quantity, format_number(row.computed), format_number(row.reference),
                    format_number(row.abs_err()), row.pass() ? "1" : "0"});
  out += csv_row({"gap", format_number(r.gap), "", "", r.gap > 0.0 ? "1" : "0"});
  return out;
}

}  // namespace lprelay
