#pragma once

// Network description for the two low-power relay topologies: a single relay
// fed by a two-antenna source, and a two-relay diamond.

#include <algorithm>
#include <cmath>
#include <complex>
#include <initializer_list>
#include <map>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "lprelay/error.hpp"

namespace lprelay {

using Complex = std::complex<double>;

inline bool is_finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

/// Complex gain vector c = [c_1 ... c_N]. Quadratic forms use the convention
/// y = c^H x, so inner(a, b) = a^H b.
class ChannelVector {
 public:
  ChannelVector() = default;
  explicit ChannelVector(std::vector<Complex> entries) : entries_(std::move(entries)) { check(); }
  ChannelVector(std::initializer_list<Complex> entries) : entries_(entries) { check(); }

  std::size_t dim() const noexcept { return entries_.size(); }
  const std::vector<Complex>& entries() const noexcept { return entries_; }
  Complex operator[](std::size_t i) const { return entries_.at(i); }

  double norm_sq() const {
    double s = 0.0;
    for (auto z : entries_) s += std::norm(z);
    return s;
  }
  double norm() const { return std::sqrt(norm_sq()); }
  bool is_zero() const { return norm_sq() == 0.0; }

  ChannelVector scaled(Complex k) const {
    std::vector<Complex> out(entries_);
    for (auto& z : out) z *= k;
    return ChannelVector(std::move(out));
  }

  friend bool operator==(const ChannelVector&, const ChannelVector&) = default;

 private:
  void check() const {
    if (entries_.empty()) throw DomainError("channel vector must have positive dimension");
    for (auto z : entries_)
      if (!is_finite(z)) throw DomainError("channel vector entry is not finite");
  }

  std::vector<Complex> entries_;
};

/// a^H b
inline Complex inner(const ChannelVector& a, const ChannelVector& b) {
  if (a.dim() != b.dim()) throw DomainError("inner product of vectors with different dimensions");
  Complex s{0.0, 0.0};
  for (std::size_t i = 0; i < a.dim(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

inline ChannelVector operator+(const ChannelVector& a, const ChannelVector& b) {
  if (a.dim() != b.dim()) throw DomainError("sum of vectors with different dimensions");
  std::vector<Complex> out(a.dim());
  for (std::size_t i = 0; i < a.dim(); ++i) out[i] = a[i] + b[i];
  return ChannelVector(std::move(out));
}

/// Unit vector [cos(angle), sin(angle)] in a real 2-plane.
inline ChannelVector unit_vector_at_angle(double angle) {
  return ChannelVector{Complex{std::cos(angle), 0.0}, Complex{std::sin(angle), 0.0}};
}

enum class CsiMode { Synchronous, PhaseFading };
enum class Topology { SingleRelay, TwoRelayDiamond };

/// Angle between two source beams, always in [0, pi/2].
struct AngleAlpha {
  double radians = 0.0;
};

/// alpha = arccos(|c2^H c3| / (|c2| |c3|)). Invariant under unit-modulus scaling
/// of either argument.
inline AngleAlpha angle_between(const ChannelVector& c2, const ChannelVector& c3) {
  if (c2.dim() != c3.dim()) throw DomainError("angle_between: dimension mismatch");
  if (c2.is_zero() || c3.is_zero()) throw DomainError("angle_between: zero vector");
  const double cosine = std::abs(inner(c2, c3)) / (c2.norm() * c3.norm());
  return AngleAlpha{std::acos(std::clamp(cosine, 0.0, 1.0))};
}

/// Variance of the extra noise the relay adds when it synthesises a degraded
/// copy of the destination's direct observation: 1 - |c31|^2/|c21|^2.
inline double degradation_noise_variance(Complex c21, Complex c31) {
  const double g21 = std::norm(c21);
  const double g31 = std::norm(c31);
  if (g31 <= 0.0) throw DomainError("degradation_noise_variance: |c31| must be positive");
  if (g21 < g31)
    throw DomainError("degradation_noise_variance: requires |c21| >= |c31|; the relay is not the stronger receiver");
  return 1.0 - g31 / g21;
}

inline double degradation_noise_variance(const ChannelVector& c21, const ChannelVector& c31) {
  if (c21.dim() != 1 || c31.dim() != 1)
    throw DomainError("degradation_noise_variance: scalar gains required");
  return degradation_noise_variance(c21[0], c31[0]);
}

/// Orthonormal frame of the real plane spanned by two vectors. The second vector
/// reads b = |b| (cos(alpha) e1 + sin(alpha) e2) with alpha in [0, pi/2], after
/// the first vector has been rotated by a unit phase so that a^H b >= 0.
struct PlaneFrame {
  ChannelVector e1;
  ChannelVector e2;
  double alpha = 0.0;

  ChannelVector direction(double angle) const {
    return e1.scaled(std::cos(angle)) + e2.scaled(std::sin(angle));
  }
};

inline PlaneFrame plane_frame(const ChannelVector& a, const ChannelVector& b) {
  if (a.dim() != b.dim()) throw DomainError("plane_frame: dimension mismatch");
  if (a.is_zero() || b.is_zero()) throw DomainError("plane_frame: zero vector");
  const Complex ab = inner(a, b);
  // Rotate a so that a^H b is real and nonnegative.
  const Complex phase = std::abs(ab) > 0.0 ? ab / std::abs(ab) : Complex{1.0, 0.0};
  const ChannelVector e1 = a.scaled(phase / a.norm());
  const Complex proj = inner(e1, b);
  std::vector<Complex> resid(b.dim());
  for (std::size_t i = 0; i < b.dim(); ++i) resid[i] = b[i] - proj * e1[i];
  double rnorm = 0.0;
  for (auto z : resid) rnorm += std::norm(z);
  rnorm = std::sqrt(rnorm);

  PlaneFrame f;
  f.e1 = e1;
  if (rnorm > 1e-14 * b.norm()) {
    for (auto& z : resid) z /= rnorm;
    f.e2 = ChannelVector(std::move(resid));
  } else {
    // Parallel vectors: any unit vector orthogonal to e1 completes the frame.
    std::vector<Complex> perp(a.dim(), Complex{0.0, 0.0});
    if (a.dim() == 1) {
      f.e2 = ChannelVector(std::move(perp));
    } else {
      perp[0] = -std::conj(e1[1]);
      perp[1] = std::conj(e1[0]);
      double n = std::sqrt(std::norm(perp[0]) + std::norm(perp[1]));
      if (n < 1e-12) {
        perp.assign(a.dim(), Complex{0.0, 0.0});
        perp[a.dim() - 1] = 1.0;
        n = 1.0;
      }
      for (auto& z : perp) z /= n;
      f.e2 = ChannelVector(std::move(perp));
    }
  }
  f.alpha = std::atan2(rnorm, proj.real());
  return f;
}

/// Static network description. Raw values are kept for serialization; rate
/// formulas read powers already divided by the noise PSD.
class ChannelConfig {
 public:
  ChannelConfig(Topology topology, CsiMode csi, double noise_psd, std::map<std::string, double> powers,
                std::map<std::string, ChannelVector> gains)
      : topology_(topology), csi_(csi), noise_psd_(noise_psd), powers_(std::move(powers)), gains_(std::move(gains)) {
    validate();
    for (const auto& [node, watts] : powers_) snr_[node] = watts / noise_psd_;
  }

  Topology topology() const noexcept { return topology_; }
  CsiMode csi() const noexcept { return csi_; }
  double noise_psd() const noexcept { return noise_psd_; }
  const std::map<std::string, double>& raw_powers() const noexcept { return powers_; }
  const std::map<std::string, ChannelVector>& gains() const noexcept { return gains_; }

  bool has_power(const std::string& node) const { return snr_.count(node) != 0; }

  /// Node power divided by N0.
  double power(const std::string& node) const {
    auto it = snr_.find(node);
    if (it == snr_.end()) throw ValidationError(node, "power not present in config");
    return it->second;
  }

  const ChannelVector& gain(const std::string& name) const {
    auto it = gains_.find(name);
    if (it == gains_.end()) throw ValidationError(name, "gain not present in config");
    return it->second;
  }

  /// Copy with a different CSI mode; everything else unchanged.
  ChannelConfig with_csi(CsiMode csi) const {
    return ChannelConfig(topology_, csi, noise_psd_, powers_, gains_);
  }

  /// Copy with every power multiplied by k.
  ChannelConfig scaled_powers(double k) const {
    auto p = powers_;
    for (auto& [node, w] : p) w *= k;
    return ChannelConfig(topology_, csi_, noise_psd_, std::move(p), gains_);
  }

  friend bool operator==(const ChannelConfig& a, const ChannelConfig& b) {
    return a.topology_ == b.topology_ && a.csi_ == b.csi_ && a.noise_psd_ == b.noise_psd_ &&
           a.powers_ == b.powers_ && a.gains_ == b.gains_;
  }

  // Gain name -> required dimension, per topology.
  static std::vector<std::pair<std::string, std::size_t>> required_gains(Topology t) {
    if (t == Topology::SingleRelay) return {{"c21", 2}, {"c31", 2}, {"c32", 1}};
    return {{"c21", 2}, {"c31", 2}, {"c42", 1}, {"c43", 1}};
  }
  static std::vector<std::string> required_powers(Topology t) {
    if (t == Topology::SingleRelay) return {"P1", "P2"};
    return {"P1", "P2", "P3"};
  }
  // Per-antenna source budgets, used by the diamond broadcast cut.
  static std::vector<std::string> optional_powers(Topology t) {
    if (t == Topology::SingleRelay) return {};
    return {"P1a", "P1b"};
  }

 private:
  void validate() const {
    if (!(noise_psd_ > 0.0) || !std::isfinite(noise_psd_))
      throw ValidationError("noise_psd", "must be finite and > 0");

    auto req_p = required_powers(topology_);
    auto opt_p = optional_powers(topology_);
    for (const auto& name : req_p)
      if (!powers_.count(name)) throw ValidationError(name, "required power missing");
    for (const auto& [name, w] : powers_) {
      const bool known = std::find(req_p.begin(), req_p.end(), name) != req_p.end() ||
                         std::find(opt_p.begin(), opt_p.end(), name) != opt_p.end();
      if (!known) throw ValidationError(name, "unknown power for this topology");
      if (!std::isfinite(w)) throw ValidationError(name, "power must be finite");
      if (w < 0.0) throw ValidationError(name, "power must be >= 0");
    }
    if (powers_.count("P1a") != powers_.count("P1b"))
      throw ValidationError(powers_.count("P1a") ? "P1b" : "P1a", "per-antenna budgets must be given together");

    auto req_g = required_gains(topology_);
    for (const auto& [name, dim] : req_g) {
      auto it = gains_.find(name);
      if (it == gains_.end()) throw ValidationError(name, "required gain missing");
      if (it->second.dim() != dim)
        throw ValidationError(name, "expected dimension " + std::to_string(dim) + ", got " +
                                        std::to_string(it->second.dim()));
    }
    for (const auto& [name, v] : gains_) {
      const bool known = std::any_of(req_g.begin(), req_g.end(), [&](const auto& g) { return g.first == name; });
      if (!known) throw ValidationError(name, "unknown gain for this topology");
    }
  }

  Topology topology_;
  CsiMode csi_;
  double noise_psd_;
  std::map<std::string, double> powers_;
  std::map<std::string, ChannelVector> gains_;
  std::map<std::string, double> snr_;
};

inline void require(const ChannelConfig& cfg, Topology t, const char* op) {
  if (cfg.topology() != t)
    throw DomainError(std::string(op) + ": wrong topology (expected " +
                      (t == Topology::SingleRelay ? "single_relay" : "two_relay_diamond") + ")");
}

inline void require(const ChannelConfig& cfg, CsiMode m, const char* op) {
  if (cfg.csi() != m)
    throw DomainError(std::string(op) + ": wrong CSI mode (expected " +
                      (m == CsiMode::Synchronous ? "synchronous" : "phase_fading") + ")");
}

}  // namespace lprelay
