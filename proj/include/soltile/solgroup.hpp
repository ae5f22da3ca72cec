#pragma once

// Arithmetic in Sol(a,b) = R^2 x| R, where z acts on (x,y) by diag(e^{az}, e^{-bz}).
// Everything is expressed in the global coordinates (x,y,z).

#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <span>
#include <sstream>
#include <string>

#include "errors.hpp"

namespace soltile {

/// Largest |argument| accepted by safe_exp.
inline constexpr double kSafeExponent = 700.0;

inline double safe_exp(double argument) {
  if (!std::isfinite(argument) || std::fabs(argument) > kSafeExponent) {
    std::ostringstream msg;
    msg << "exponent " << argument << " outside safe range [-" << kSafeExponent << ", "
        << kSafeExponent << "]";
    throw OverflowError(msg.str());
  }
  return std::exp(argument);
}

/// Group parameters (a,b) with the derived tiling constants.
///
/// delta = 2^{-b/a} is the y-scaling of the lift of z -> 2z; row_height = log 2 / a.
/// subdivision is set when |b|/a = log n / log 2 for an integer n >= 2, i.e. when
/// delta = 1/n (b > 0) or delta = n (b < 0, the Heintze case).
class SolParams {
 public:
  SolParams(double a, double b) : a_(a), b_(b) {
    if (!(a > 0.0) || !std::isfinite(a)) throw ParameterError("Sol(a,b): a must be a positive real");
    if (b == 0.0 || !std::isfinite(b)) throw ParameterError("Sol(a,b): b must be a nonzero real");
    delta_ = std::exp2(-b / a);
    row_height_ = std::numbers::ln2 / a;
    const double scale = std::exp2(std::fabs(b) / a);
    const double nearest = std::round(scale);
    if (nearest >= 2.0 && std::fabs(scale - nearest) <= kIntegerTolerance * nearest &&
        nearest < 1e9) {
      subdivision_ = static_cast<int>(nearest);
    }
  }

  /// Sol(a,b) with |b|/a = log n / log 2; heintze selects b < 0.
  static SolParams from_subdivision(int n, bool heintze = false, double a = 1.0) {
    if (n < 2) throw ParameterError("subdivision n must be an integer >= 2");
    const double b = a * std::log2(static_cast<double>(n));
    SolParams params(a, heintze ? -b : b);
    params.subdivision_ = n;
    return params;
  }

  double a() const { return a_; }
  double b() const { return b_; }
  double delta() const { return delta_; }
  double row_height() const { return row_height_; }
  std::optional<int> subdivision() const { return subdivision_; }
  bool heintze() const { return b_ < 0.0; }
  bool unimodular() const { return a_ == b_; }

  /// n, or NotFaceToFace if the parameters are outside the face-to-face regime.
  int require_subdivision() const {
    if (!subdivision_) {
      std::ostringstream msg;
      msg << "Sol(" << a_ << "," << b_ << ") is not face-to-face: 2^{|b|/a} = "
          << std::exp2(std::fabs(b_) / a_) << " is not an integer >= 2";
      throw NotFaceToFace(msg.str());
    }
    return *subdivision_;
  }

 private:
  static constexpr double kIntegerTolerance = 1e-9;

  double a_;
  double b_;
  double delta_ = 1.0;
  double row_height_ = 1.0;
  std::optional<int> subdivision_;
};

struct GroupElement {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend bool operator==(const GroupElement&, const GroupElement&) = default;
};

inline GroupElement identity() { return {}; }

inline GroupElement mul(const SolParams& params, const GroupElement& g, const GroupElement& h) {
  return {g.x + safe_exp(params.a() * g.z) * h.x, g.y + safe_exp(-params.b() * g.z) * h.y,
          g.z + h.z};
}

inline GroupElement inv(const SolParams& params, const GroupElement& g) {
  return {-safe_exp(-params.a() * g.z) * g.x, -safe_exp(params.b() * g.z) * g.y, -g.z};
}

// Right-multiplication flows of the left-invariant fields X, Y and -Z.

inline GroupElement flow_hplus(const SolParams& params, double s, const GroupElement& p) {
  return {p.x + safe_exp(params.a() * p.z) * s, p.y, p.z};
}

inline GroupElement flow_hminus(const SolParams& params, double s, const GroupElement& p) {
  return {p.x, p.y + safe_exp(-params.b() * p.z) * s, p.z};
}

inline GroupElement flow_g(const SolParams& /*params*/, double t, const GroupElement& p) {
  return {p.x, p.y, p.z + t};
}

/// Inclusion of the upper half-plane: alpha + i beta -> (alpha, 0, log(beta)/a).
inline GroupElement embed_halfplane(const SolParams& params, double alpha, double beta) {
  if (!(beta > 0.0)) throw DomainError("embed_halfplane: beta must be positive");
  return {alpha, 0.0, std::log(beta) / params.a()};
}

/// Diagonal of the left-invariant metric e^{-2az}dx^2 + e^{2bz}dy^2 + dz^2.
inline std::array<double, 3> metric_diag(const SolParams& params, const GroupElement& p) {
  return {safe_exp(-2.0 * params.a() * p.z), safe_exp(2.0 * params.b() * p.z), 1.0};
}

/// Length of a polyline under the left-invariant metric, midpoint rule per segment.
inline double path_length(const SolParams& params, std::span<const GroupElement> polyline) {
  if (polyline.size() < 2) throw DomainError("path_length: need at least two points");
  double total = 0.0;
  for (std::size_t s = 1; s < polyline.size(); ++s) {
    const GroupElement& p = polyline[s - 1];
    const GroupElement& q = polyline[s];
    const GroupElement mid{0.5 * (p.x + q.x), 0.5 * (p.y + q.y), 0.5 * (p.z + q.z)};
    const auto diag = metric_diag(params, mid);
    const double dx = q.x - p.x;
    const double dy = q.y - p.y;
    const double dz = q.z - p.z;
    total += std::sqrt(diag[0] * dx * dx + diag[1] * dy * dy + diag[2] * dz * dz);
  }
  return total;
}

}  // namespace soltile
