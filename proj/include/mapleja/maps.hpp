#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mapleja/errors.hpp"

namespace mapleja {

enum class MapKind { Identity, Sausage, Kte };

inline std::string_view to_string(MapKind k) {
  switch (k) {
    case MapKind::Identity: return "identity";
    case MapKind::Sausage: return "sausage";
    case MapKind::Kte: return "kte";
  }
  return "identity";
}

/// Odd, increasing analytic self-map of [-1, 1] with g(+-1) = +-1.
///
/// Sausage(d) is the truncated Maclaurin series of arcsin with terms
/// y^(2i+1), i = 0..d, normalized so that g(1) = 1. KTE(a) is
/// arcsin(a y) / arcsin(a).
class ConformalMap {
 public:
  ConformalMap() = default;

  static ConformalMap identity() { return {}; }

  static ConformalMap sausage(int order) {
    if (order < 1 || order % 2 == 0)
      throw ContractError("sausage order must be an odd positive integer");
    ConformalMap g;
    g.kind_ = MapKind::Sausage;
    g.order_ = order;
    double c = 1.0, sum = 0.0;
    for (int i = 0; i <= order; ++i) {
      if (i > 0) c *= (2.0 * i - 1.0) / (2.0 * i);  // (2i)!/(4^i (i!)^2)
      g.coeffs_.push_back(c / (2.0 * i + 1.0));
      sum += g.coeffs_.back();
    }
    for (auto& a : g.coeffs_) a /= sum;
    return g;
  }

  static ConformalMap kte(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw ContractError("KTE alpha must lie in (0, 1)");
    ConformalMap g;
    g.kind_ = MapKind::Kte;
    g.alpha_ = alpha;
    g.asin_alpha_ = std::asin(alpha);
    return g;
  }

  MapKind kind() const noexcept { return kind_; }
  int order() const noexcept { return order_; }
  double alpha() const noexcept { return alpha_; }
  std::span<const double> coefficients() const noexcept { return coeffs_; }

  double forward(double y) const {
    check_unit(y, "map argument");
    if (kind_ == MapKind::Identity) return y;
    const double a = std::abs(y);
    if (a == 1.0) return y;
    return std::copysign(forward_abs(a), y);
  }

  /// Analytic continuation into the complex plane.
  std::complex<double> forward(std::complex<double> z) const {
    switch (kind_) {
      case MapKind::Identity: return z;
      case MapKind::Sausage: {
        const auto z2 = z * z;
        std::complex<double> acc = 0.0;
        for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * z2 + *it;
        return acc * z;
      }
      case MapKind::Kte: return std::asin(alpha_ * z) / asin_alpha_;
    }
    return z;
  }

  double derivative(double y) const {
    check_unit(y, "map argument");
    switch (kind_) {
      case MapKind::Identity: return 1.0;
      case MapKind::Sausage: {
        const double y2 = y * y;
        double acc = 0.0;
        for (int i = static_cast<int>(coeffs_.size()) - 1; i >= 0; --i)
          acc = acc * y2 + (2.0 * i + 1.0) * coeffs_[static_cast<std::size_t>(i)];
        return acc;
      }
      case MapKind::Kte: return alpha_ / (std::sqrt(1.0 - alpha_ * alpha_ * y * y) * asin_alpha_);
    }
    return 1.0;
  }

  double inverse(double t) const {
    check_unit(t, "inverse map argument");
    if (kind_ == MapKind::Identity) return t;
    const double a = std::abs(t);
    if (a == 1.0 || a == 0.0) return t;
    if (kind_ == MapKind::Kte) return std::clamp(std::sin(t * asin_alpha_) / alpha_, -1.0, 1.0);
    // Newton on the monotone polynomial, bracketed in [0, 1].
    double lo = 0.0, hi = 1.0, y = a;
    for (int it = 0; it < 200; ++it) {
      const double r = forward_abs(y) - a;
      if (r > 0.0)
        hi = y;
      else
        lo = y;
      if (r == 0.0 || hi - lo <= 1e-16) break;
      double next = y - r / derivative(y);
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      if (std::abs(next - y) <= 1e-17) {
        y = next;
        break;
      }
      y = next;
    }
    return std::copysign(y, t);
  }

  bool operator==(const ConformalMap& o) const {
    return kind_ == o.kind_ && order_ == o.order_ && alpha_ == o.alpha_;
  }

 private:
  static void check_unit(double y, const char* what) {
    if (!(y >= -1.0 && y <= 1.0))
      throw std::domain_error(std::string(what) + " " + std::to_string(y) + " outside [-1, 1]");
  }

  double forward_abs(double a) const {
    if (kind_ == MapKind::Kte) return std::min(1.0, std::asin(alpha_ * a) / asin_alpha_);
    const double a2 = a * a;
    double acc = 0.0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * a2 + *it;
    return std::min(1.0, acc * a);
  }

  MapKind kind_ = MapKind::Identity;
  int order_ = 0;
  double alpha_ = 0.0;
  double asin_alpha_ = 0.0;
  std::vector<double> coeffs_;
};

namespace detail {

// Does g map the Bernstein ellipse boundary E_r into the eps-neighborhood
// of [-1, 1]?
inline bool ellipse_image_contained(const ConformalMap& g, double r, double eps, int samples) {
  if (g.kind() == MapKind::Kte && 0.5 * (r + 1.0 / r) >= 1.0 / g.alpha()) return false;
  const double step = 2.0 * std::numbers::pi / samples;
  for (int k = 0; k < samples; ++k) {
    const std::complex<double> e = std::polar(1.0, k * step);
    const std::complex<double> z = 0.5 * (r * e + 1.0 / (r * e));
    const std::complex<double> w = g.forward(z);
    if (!std::isfinite(w.real()) || !std::isfinite(w.imag())) return false;
    const double dist = std::abs(w - std::clamp(w.real(), -1.0, 1.0));
    if (dist > eps) return false;
  }
  return true;
}

}  // namespace detail

/// Largest Bernstein ellipse parameter rho in the eps-neighborhood of [-1, 1].
inline double bernstein_radius(double eps) { return eps + std::sqrt(1.0 + eps * eps); }

/// Convergence gain log(r_hat) / log(r_max) - 1, where r_hat is the largest
/// ellipse whose image under g stays within distance eps of [-1, 1].
inline double estimate_gain(const ConformalMap& g, double eps, int samples = 4096) {
  if (!(eps > 0.0)) throw ContractError("gain estimate requires eps > 0");
  if (samples < 16) throw ContractError("gain estimate needs at least 16 boundary samples");
  if (g.kind() == MapKind::Identity) return 0.0;
  const double r_max = bernstein_radius(eps);
  double lo = 1.0, hi = r_max;
  while (detail::ellipse_image_contained(g, hi, eps, samples)) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e6) return std::log(lo) / std::log(r_max) - 1.0;
  }
  for (int it = 0; it < 100 && hi - lo > 1e-13 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (detail::ellipse_image_contained(g, mid, eps, samples))
      lo = mid;
    else
      hi = mid;
  }
  return std::log(lo) / std::log(r_max) - 1.0;
}

}  // namespace mapleja
