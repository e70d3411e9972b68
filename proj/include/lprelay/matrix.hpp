#pragma once

// Small Hermitian matrices, Loewner-order predicates, and an exact / sampled
// check of the conditional-covariance inequality
//   cov[X|Y] <= cov[X] - cov[X,Y] cov[X,Y]^H / var[Y].

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <random>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "lprelay/channel.hpp"
#include "lprelay/error.hpp"

namespace lprelay {

inline constexpr double kHermitianTol = 1e-12;

class HermitianMatrix {
 public:
  using Storage = Eigen::MatrixXcd;

  explicit HermitianMatrix(Storage m) : m_(std::move(m)) {
    if (m_.rows() == 0 || m_.rows() != m_.cols()) throw DomainError("HermitianMatrix: must be square and nonempty");
    const double scale = std::max(1.0, m_.cwiseAbs().maxCoeff());
    for (Eigen::Index i = 0; i < m_.rows(); ++i)
      for (Eigen::Index j = 0; j < m_.cols(); ++j) {
        if (!is_finite(m_(i, j))) throw DomainError("HermitianMatrix: entry is not finite");
        if (std::abs(m_(i, j) - std::conj(m_(j, i))) > kHermitianTol * scale)
          throw DomainError("HermitianMatrix: input is not Hermitian");
      }
    // Snap to exact symmetry so downstream eigen-solvers see a Hermitian input.
    m_ = (0.5 * (m_ + m_.adjoint())).eval();
  }

  static HermitianMatrix zero(std::size_t dim) { return HermitianMatrix(Storage::Zero(dim, dim)); }
  static HermitianMatrix identity(std::size_t dim) { return HermitianMatrix(Storage::Identity(dim, dim)); }
  static HermitianMatrix diagonal(const std::vector<double>& d) {
    Storage m = Storage::Zero(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return HermitianMatrix(std::move(m));
  }
  /// scale * v v^H
  static HermitianMatrix outer(const ChannelVector& v, double scale = 1.0) {
    Storage m(v.dim(), v.dim());
    for (std::size_t i = 0; i < v.dim(); ++i)
      for (std::size_t j = 0; j < v.dim(); ++j) m(i, j) = scale * v[i] * std::conj(v[j]);
    return HermitianMatrix(std::move(m));
  }

  std::size_t dim() const noexcept { return static_cast<std::size_t>(m_.rows()); }
  const Storage& storage() const noexcept { return m_; }
  Complex operator()(std::size_t i, std::size_t j) const { return m_(i, j); }
  double trace() const { return m_.trace().real(); }
  double determinant() const { return m_.determinant().real(); }

  /// c^H M c, real for Hermitian M.
  double quad(const ChannelVector& c) const {
    if (c.dim() != dim()) throw DomainError("quadratic form: dimension mismatch");
    Eigen::VectorXcd v(c.dim());
    for (std::size_t i = 0; i < c.dim(); ++i) v(i) = c[i];
    return (v.adjoint() * m_ * v)(0, 0).real();
  }

  friend HermitianMatrix operator+(const HermitianMatrix& a, const HermitianMatrix& b) {
    check_dims(a, b);
    return HermitianMatrix(a.m_ + b.m_);
  }
  friend HermitianMatrix operator-(const HermitianMatrix& a, const HermitianMatrix& b) {
    check_dims(a, b);
    return HermitianMatrix(a.m_ - b.m_);
  }
  friend HermitianMatrix operator*(double k, const HermitianMatrix& a) { return HermitianMatrix(k * a.m_); }

 private:
  static void check_dims(const HermitianMatrix& a, const HermitianMatrix& b) {
    if (a.dim() != b.dim()) throw DomainError("HermitianMatrix: dimension mismatch");
  }

  Storage m_;
};

/// Ascending eigenvalues. Closed form for 2x2 (trace / discriminant), Eigen's
/// self-adjoint solver otherwise.
inline std::vector<double> eigenvalues(const HermitianMatrix& m) {
  if (m.dim() == 1) return {m(0, 0).real()};
  if (m.dim() == 2) {
    const double a = m(0, 0).real();
    const double d = m(1, 1).real();
    const double half_gap = 0.5 * (a - d);
    const double r = std::hypot(half_gap, std::abs(m(0, 1)));
    const double mid = 0.5 * (a + d);
    // The smaller root via the product keeps precision when |lambda_min| << |lambda_max|.
    const double hi = mid >= 0.0 ? mid + r : mid - r;
    const double det = a * d - std::norm(m(0, 1));
    const double lo = hi != 0.0 ? det / hi : 0.0;
    return {std::min(lo, hi), std::max(lo, hi)};
  }
  Eigen::SelfAdjointEigenSolver<HermitianMatrix::Storage> solver(m.storage(), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw DomainError("eigenvalues: solver did not converge");
  std::vector<double> out(m.dim());
  for (std::size_t i = 0; i < m.dim(); ++i) out[i] = solver.eigenvalues()(i);
  std::sort(out.begin(), out.end());
  return out;
}

inline double min_eigenvalue(const HermitianMatrix& m) { return eigenvalues(m).front(); }

enum class LoewnerRelation { StrictlyGreater, GreaterOrEqual, Indefinite };

struct LoewnerVerdict {
  LoewnerRelation relation = LoewnerRelation::Indefinite;
  double min_eigenvalue_of_difference = 0.0;
};

/// Classifies a - b by its smallest eigenvalue: > tol strictly greater,
/// >= -tol greater-or-equal, otherwise indefinite (or smaller).
inline LoewnerVerdict loewner_compare(const HermitianMatrix& a, const HermitianMatrix& b, double tol = 1e-9) {
  if (a.dim() != b.dim()) throw DomainError("loewner_compare: dimension mismatch");
  const double lam = min_eigenvalue(a - b);
  LoewnerVerdict v;
  v.min_eigenvalue_of_difference = lam;
  if (lam > tol)
    v.relation = LoewnerRelation::StrictlyGreater;
  else if (lam >= -tol)
    v.relation = LoewnerRelation::GreaterOrEqual;
  else
    v.relation = LoewnerRelation::Indefinite;
  return v;
}

inline bool is_psd(const HermitianMatrix& m, double tol = 1e-9) {
  return loewner_compare(m, HermitianMatrix::zero(m.dim()), tol).relation != LoewnerRelation::Indefinite;
}

inline const char* to_string(LoewnerRelation r) {
  switch (r) {
    case LoewnerRelation::StrictlyGreater: return "strictly_greater";
    case LoewnerRelation::GreaterOrEqual: return "greater_or_equal";
    case LoewnerRelation::Indefinite: return "indefinite";
  }
  return "?";
}

/// Finite-support joint distribution of a vector X and a scalar Y.
struct JointAtom {
  std::vector<Complex> x;
  Complex y;
  double p = 0.0;
};

struct FiniteJoint {
  std::vector<JointAtom> atoms;

  std::size_t dim() const { return atoms.empty() ? 0 : atoms.front().x.size(); }

  void validate() const {
    if (atoms.empty()) throw DomainError("FiniteJoint: empty support");
    double total = 0.0;
    for (const auto& a : atoms) {
      if (a.x.size() != dim()) throw DomainError("FiniteJoint: inconsistent X dimension");
      if (!(a.p >= 0.0)) throw DomainError("FiniteJoint: negative probability");
      total += a.p;
    }
    if (std::abs(total - 1.0) > 1e-9) throw DomainError("FiniteJoint: probabilities do not sum to 1");
  }
};

struct ConditionalCovReport {
  HermitianMatrix lhs;  // E_Y cov[X | Y]
  HermitianMatrix rhs;  // cov[X] - cov[X,Y] cov[X,Y]^H / var[Y]
  LoewnerVerdict verdict;
  double tolerance = 0.0;
  double std_error = 0.0;  // 0 on the exact path
  bool holds = false;      // rhs - lhs >= -tolerance
};

namespace detail {

struct CovPair {
  Eigen::MatrixXcd lhs;
  Eigen::MatrixXcd rhs;
};

// Moments of a weighted atom list; weights need not be normalised.
inline CovPair conditional_cov_pair(const std::vector<JointAtom>& atoms, const std::vector<double>& w) {
  const auto n = static_cast<Eigen::Index>(atoms.front().x.size());
  double wsum = 0.0;
  Eigen::VectorXcd mx = Eigen::VectorXcd::Zero(n);
  Complex my{0.0, 0.0};
  for (std::size_t k = 0; k < atoms.size(); ++k) {
    wsum += w[k];
    for (Eigen::Index i = 0; i < n; ++i) mx(i) += w[k] * atoms[k].x[i];
    my += w[k] * atoms[k].y;
  }
  mx /= wsum;
  my /= wsum;

  Eigen::MatrixXcd cov_x = Eigen::MatrixXcd::Zero(n, n);
  Eigen::VectorXcd cov_xy = Eigen::VectorXcd::Zero(n);
  double var_y = 0.0;
  // Group atoms by Y value for E[X|Y].
  auto key_less = [](Complex a, Complex b) {
    return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag());
  };
  std::map<Complex, std::pair<double, Eigen::VectorXcd>, decltype(key_less)> by_y(key_less);
  for (std::size_t k = 0; k < atoms.size(); ++k) {
    Eigen::VectorXcd xc(n);
    for (Eigen::Index i = 0; i < n; ++i) xc(i) = atoms[k].x[i] - mx(i);
    const Complex yc = atoms[k].y - my;
    const double p = w[k] / wsum;
    cov_x += p * xc * xc.adjoint();
    cov_xy += p * xc * std::conj(yc);
    var_y += p * std::norm(yc);
    auto [it, inserted] = by_y.try_emplace(atoms[k].y, 0.0, Eigen::VectorXcd::Zero(n));
    it->second.first += p;
    it->second.second += p * xc;
  }
  if (!(var_y > 1e-300)) throw DomainError("conditional_cov_bound_check: Y has zero variance");

  // E[E[X|Y] E[X|Y]^H] on centred X.
  Eigen::MatrixXcd mean_outer = Eigen::MatrixXcd::Zero(n, n);
  for (const auto& [y, acc] : by_y) {
    if (acc.first <= 0.0) continue;
    const Eigen::VectorXcd m = acc.second / acc.first;
    mean_outer += acc.first * m * m.adjoint();
  }
  CovPair out;
  out.lhs = cov_x - mean_outer;
  out.rhs = cov_x - cov_xy * cov_xy.adjoint() / var_y;
  out.lhs = (0.5 * (out.lhs + out.lhs.adjoint())).eval();
  out.rhs = (0.5 * (out.rhs + out.rhs.adjoint())).eval();
  return out;
}

}  // namespace detail

/// Exact check on the enumerated support. cov[X|Y] is the Y-averaged conditional
/// covariance E[XX^H] - E[E[X|Y]E[X|Y]^H].
inline ConditionalCovReport conditional_cov_bound_check(const FiniteJoint& joint, double tol = 1e-9) {
  joint.validate();
  std::vector<double> w;
  w.reserve(joint.atoms.size());
  for (const auto& a : joint.atoms) w.push_back(a.p);
  auto pair = detail::conditional_cov_pair(joint.atoms, w);
  ConditionalCovReport r{HermitianMatrix(pair.lhs), HermitianMatrix(pair.rhs), {}, tol, 0.0, false};
  r.verdict = loewner_compare(r.rhs, r.lhs, tol);
  r.holds = r.verdict.relation != LoewnerRelation::Indefinite;
  return r;
}

/// Sampled check: draws num_samples atoms from the joint and evaluates the
/// inequality on the empirical measure. The standard error of the minimum
/// eigenvalue comes from 10 equal batches; the tolerance is 3 standard errors.
inline ConditionalCovReport conditional_cov_bound_check(const FiniteJoint& joint, std::size_t num_samples,
                                                        std::uint64_t rng_seed) {
  joint.validate();
  if (num_samples < 20) throw DomainError("conditional_cov_bound_check: need at least 20 samples");
  std::vector<double> probs;
  for (const auto& a : joint.atoms) probs.push_back(a.p);
  std::mt19937_64 rng(rng_seed);
  std::discrete_distribution<std::size_t> pick(probs.begin(), probs.end());

  constexpr std::size_t kBatches = 10;
  std::vector<std::vector<double>> batch_counts(kBatches, std::vector<double>(joint.atoms.size(), 0.0));
  std::vector<double> counts(joint.atoms.size(), 0.0);
  for (std::size_t s = 0; s < num_samples; ++s) {
    const auto k = pick(rng);
    counts[k] += 1.0;
    batch_counts[s % kBatches][k] += 1.0;
  }

  auto gap_of = [&](const std::vector<double>& w) {
    auto pair = detail::conditional_cov_pair(joint.atoms, w);
    return min_eigenvalue(HermitianMatrix(pair.rhs - pair.lhs));
  };
  std::vector<double> gaps;
  for (const auto& bc : batch_counts) {
    try {
      gaps.push_back(gap_of(bc));
    } catch (const DomainError&) {
      // A batch can be degenerate (constant Y); it carries no spread information.
    }
  }
  double se = 0.0;
  if (gaps.size() >= 2) {
    double mean = 0.0;
    for (double g : gaps) mean += g;
    mean /= static_cast<double>(gaps.size());
    double var = 0.0;
    for (double g : gaps) var += (g - mean) * (g - mean);
    var /= static_cast<double>(gaps.size() - 1);
    se = std::sqrt(var / static_cast<double>(gaps.size()));
  }

  auto pair = detail::conditional_cov_pair(joint.atoms, counts);
  const double tol = std::max(3.0 * se, 1e-9);
  ConditionalCovReport r{HermitianMatrix(pair.lhs), HermitianMatrix(pair.rhs), {}, tol, se, false};
  r.verdict = loewner_compare(r.rhs, r.lhs, tol);
  r.holds = r.verdict.relation != LoewnerRelation::Indefinite;
  return r;
}

}  // namespace lprelay
