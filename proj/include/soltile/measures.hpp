#pragma once

// Haar densities, the modular function and the leafwise operators of Sol(a,b).
//
// With dvol = e^{(b-a)z} dx dy dz the Riemannian volume of the left-invariant metric,
// the Laplace-Beltrami operator is
//   e^{2az} d_xx + e^{-2bz} d_yy + d_zz + (b-a) d_z.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "solgroup.hpp"
#include "soltiling.hpp"

namespace soltile {

inline double left_haar_density(const SolParams& params, const GroupElement& p) {
  return safe_exp((params.b() - params.a()) * p.z);
}

inline double right_haar_density(const SolParams& /*params*/, const GroupElement& /*p*/) { return 1.0; }

/// lambda(g0) with int f(g g0) dm_l(g) = lambda(g0) int f(g) dm_l(g).
inline double modular(const SolParams& params, const GroupElement& g0) {
  return safe_exp((params.a() - params.b()) * g0.z);
}

enum class DensityKind { LeftHaar, RightHaar, Harmonic, Custom };

/// Measure against which a density is integrated.
enum class ReferenceMeasure { Lebesgue, Riemannian };

/// A positive density on Sol(a,b). Harmonic is e^{(a-b)z} relative to the Riemannian
/// volume, which is Lebesgue measure dx dy dz, i.e. right Haar measure.
struct DensityField {
  DensityKind kind = DensityKind::LeftHaar;
  std::function<double(const GroupElement&)> custom;
  ReferenceMeasure reference = ReferenceMeasure::Lebesgue;

  static DensityField left_haar() { return {DensityKind::LeftHaar, {}, ReferenceMeasure::Lebesgue}; }
  static DensityField right_haar() { return {DensityKind::RightHaar, {}, ReferenceMeasure::Lebesgue}; }
  static DensityField harmonic() { return {DensityKind::Harmonic, {}, ReferenceMeasure::Riemannian}; }

  double value(const SolParams& params, const GroupElement& p) const {
    switch (kind) {
      case DensityKind::LeftHaar: return left_haar_density(params, p);
      case DensityKind::RightHaar: return right_haar_density(params, p);
      case DensityKind::Harmonic: return safe_exp((params.a() - params.b()) * p.z);
      case DensityKind::Custom:
        if (!custom) throw ParameterError("custom density without a rule");
        return custom(p);
    }
    return 0.0;
  }

  /// Density with respect to dx dy dz.
  double lebesgue_value(const SolParams& params, const GroupElement& p) const {
    const double v = value(params, p);
    return reference == ReferenceMeasure::Riemannian ? v * left_haar_density(params, p) : v;
  }
};

// ---------------------------------------------------------------------------
// Pushforward of the left Haar measure under right translation

struct Box3 {
  Interval x;
  Interval y;
  Interval z;

  double volume() const { return (x.hi - x.lo) * (y.hi - y.lo) * (z.hi - z.lo); }
};

/// Smooth bump prod (1 - u^2)^4 on its box, u the coordinate rescaled to [-1, 1].
inline double box_bump(const Box3& box, const GroupElement& p) {
  const auto factor = [](double t, const Interval& iv) {
    const double u = (2.0 * t - iv.lo - iv.hi) / (iv.hi - iv.lo);
    if (u <= -1.0 || u >= 1.0) return 0.0;
    const double s = 1.0 - u * u;
    return s * s * s * s;
  };
  return factor(p.x, box.x) * factor(p.y, box.y) * factor(p.z, box.z);
}

/// Bounding box of { q g : q in box }.
inline Box3 right_translate_bounds(const SolParams& params, const Box3& box, const GroupElement& g) {
  // q g = (q.x + e^{a q.z} g.x, q.y + e^{-b q.z} g.y, q.z + g.z); each shift is monotone in q.z
  const double x_lo_shift = g.x * safe_exp(params.a() * box.z.lo);
  const double x_hi_shift = g.x * safe_exp(params.a() * box.z.hi);
  const double y_lo_shift = g.y * safe_exp(-params.b() * box.z.lo);
  const double y_hi_shift = g.y * safe_exp(-params.b() * box.z.hi);
  return {{box.x.lo + std::min(x_lo_shift, x_hi_shift), box.x.hi + std::max(x_lo_shift, x_hi_shift)},
          {box.y.lo + std::min(y_lo_shift, y_hi_shift), box.y.hi + std::max(y_lo_shift, y_hi_shift)},
          {box.z.lo + g.z, box.z.hi + g.z}};
}

struct PushforwardResult {
  double estimate = 0.0;   // int f(p g0) dm_l / int f(p) dm_l
  double reference = 0.0;  // modular(g0)
  double rel_err = 0.0;
  double std_error = 0.0;  // of the estimate
};

inline constexpr Box3 kDefaultBumpBox{{-1.0, 1.0}, {-1.0, 1.0}, {-1.0, 1.0}};

/// Monte Carlo ratio of the two integrals, each estimated from its own trials uniform
/// samples on a box containing the support of its integrand. The two estimates are
/// independent, so the ratio is 1 in expectation for g0 = identity.
inline PushforwardResult pushforward_check(const SolParams& params, const GroupElement& g0,
                                           std::int64_t trials, std::uint64_t seed,
                                           const Box3& support = kDefaultBumpBox) {
  if (trials < 10000) throw ParameterError("pushforward_check: need at least 10^4 trials");
  if (!(support.volume() > 0.0) || !std::isfinite(support.volume())) {
    throw DomainError("pushforward_check: degenerate support box");
  }
  std::mt19937_64 rng(seed);
  // (integral, standard error)
  const auto estimate = [&](const Box3& box, const auto& integrand) {
    std::uniform_real_distribution<double> ux(box.x.lo, box.x.hi);
    std::uniform_real_distribution<double> uy(box.y.lo, box.y.hi);
    std::uniform_real_distribution<double> uz(box.z.lo, box.z.hi);
    double sum = 0.0;
    double sum_sq = 0.0;
    for (std::int64_t t = 0; t < trials; ++t) {
      const GroupElement p{ux(rng), uy(rng), uz(rng)};
      const double v = integrand(p);
      sum += v;
      sum_sq += v * v;
    }
    const auto count = static_cast<double>(trials);
    const double mean = sum / count;
    const double var = std::max(0.0, sum_sq / count - mean * mean);
    return std::pair{box.volume() * mean, box.volume() * std::sqrt(var / count)};
  };
  const auto [base, base_se] = estimate(support, [&](const GroupElement& p) {
    return box_bump(support, p) * left_haar_density(params, p);
  });
  const Box3 moved = right_translate_bounds(params, support, inv(params, g0));
  const auto [shifted, shifted_se] = estimate(moved, [&](const GroupElement& p) {
    return box_bump(support, mul(params, p, g0)) * left_haar_density(params, p);
  });
  if (!(base > 0.0)) throw DomainError("pushforward_check: reference integral vanished");
  PushforwardResult result;
  result.estimate = shifted / base;
  result.reference = modular(params, g0);
  result.rel_err = std::fabs(result.estimate - result.reference) / result.reference;
  // delta method for a ratio of independent estimates
  result.std_error = result.estimate * std::hypot(base_se / base, shifted > 0.0 ? shifted_se / shifted : 0.0);
  return result;
}

// ---------------------------------------------------------------------------
// Leafwise operators by central differences

using ScalarField3 = std::function<double(const GroupElement&)>;
using ScalarField2 = std::function<double(double, double)>;

namespace detail {

inline void check_step(double h) {
  if (!(h >= 1e-10) || !std::isfinite(h)) throw DomainError("finite-difference step too small");
}

}  // namespace detail

inline double laplace_beltrami(const SolParams& params, const ScalarField3& f, const GroupElement& p,
                               double h) {
  detail::check_step(h);
  const double c = f(p);
  const double fxx = (f({p.x + h, p.y, p.z}) - 2.0 * c + f({p.x - h, p.y, p.z})) / (h * h);
  const double fyy = (f({p.x, p.y + h, p.z}) - 2.0 * c + f({p.x, p.y - h, p.z})) / (h * h);
  const double up = f({p.x, p.y, p.z + h});
  const double down = f({p.x, p.y, p.z - h});
  const double fzz = (up - 2.0 * c + down) / (h * h);
  const double fz = (up - down) / (2.0 * h);
  return safe_exp(2.0 * params.a() * p.z) * fxx + safe_exp(-2.0 * params.b() * p.z) * fyy + fzz +
         (params.b() - params.a()) * fz;
}

/// e^{2az} d_xx + d_zz + (b-a) d_z on the (x,z) half-plane.
inline double delta1(const SolParams& params, const ScalarField2& F, double x, double z, double h) {
  detail::check_step(h);
  const double c = F(x, z);
  const double fxx = (F(x + h, z) - 2.0 * c + F(x - h, z)) / (h * h);
  const double up = F(x, z + h);
  const double down = F(x, z - h);
  const double fzz = (up - 2.0 * c + down) / (h * h);
  const double fz = (up - down) / (2.0 * h);
  return safe_exp(2.0 * params.a() * z) * fxx + fzz + (params.b() - params.a()) * fz;
}

/// e^{2bw} d_yy + d_ww + (a-b) d_w on the (y,w) half-plane, w = -z. A field G(y,w)
/// on it corresponds to f(x,y,z) = G(y,-z) on Sol(a,b).
inline double delta2(const SolParams& params, const ScalarField2& G, double y, double w, double h) {
  detail::check_step(h);
  const double c = G(y, w);
  const double gyy = (G(y + h, w) - 2.0 * c + G(y - h, w)) / (h * h);
  const double up = G(y, w + h);
  const double down = G(y, w - h);
  const double gww = (up - 2.0 * c + down) / (h * h);
  const double gw = (up - down) / (2.0 * h);
  return safe_exp(2.0 * params.b() * w) * gyy + gww + (params.a() - params.b()) * gw;
}

// ---------------------------------------------------------------------------
// Flow boxes

struct FlowBoxSpec {
  PatchClassKey cylinder;
  Box3 box;
};

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
};

/// sum_t nu_t int_B f(p, t) density(p) dvol by the tensor midpoint rule on N and 2N
/// points per axis, combined by Richardson extrapolation.
inline QuadratureResult flowbox_integral(const SolParams& params, const FlowBoxSpec& spec,
                                         std::span<const double> weights, const DensityField& density,
                                         const std::function<double(const GroupElement&, std::size_t)>& f,
                                         int points_per_axis = 24) {
  if (points_per_axis < 1) throw ParameterError("flowbox_integral: need at least one point per axis");
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw ParameterError("flowbox_integral: weights must be nonnegative");
  }
  const Box3& box = spec.box;
  safe_exp(params.a() * std::max(std::fabs(box.z.lo), std::fabs(box.z.hi)));
  safe_exp(params.b() * std::max(std::fabs(box.z.lo), std::fabs(box.z.hi)));
  const auto midpoint = [&](int N) {
    const double hx = (box.x.hi - box.x.lo) / N;
    const double hy = (box.y.hi - box.y.lo) / N;
    const double hz = (box.z.hi - box.z.lo) / N;
    double total = 0.0;
    for (int c = 0; c < N; ++c) {
      const double z = box.z.lo + (c + 0.5) * hz;
      for (int b = 0; b < N; ++b) {
        const double y = box.y.lo + (b + 0.5) * hy;
        for (int a = 0; a < N; ++a) {
          const GroupElement p{box.x.lo + (a + 0.5) * hx, y, z};
          const double rho = density.lebesgue_value(params, p);
          double sum = 0.0;
          for (std::size_t t = 0; t < weights.size(); ++t) {
            if (weights[t] != 0.0) sum += weights[t] * f(p, t);
          }
          const double term = sum * rho;
          if (!std::isfinite(term)) throw DomainError("flowbox_integral: non-finite integrand");
          total += term;
        }
      }
    }
    return total * hx * hy * hz;
  };
  const double coarse = midpoint(points_per_axis);
  const double fine = midpoint(2 * points_per_axis);
  return {(4.0 * fine - coarse) / 3.0, std::fabs(fine - coarse) / 3.0};
}

}  // namespace soltile
