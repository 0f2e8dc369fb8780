#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mapleja/detail/random.hpp"
#include "mapleja/errors.hpp"

namespace mapleja {

enum class DistributionKind { BetaSymmetric33, Uniform };

inline std::string_view to_string(DistributionKind k) {
  return k == DistributionKind::Uniform ? "uniform" : "beta33";
}

/// Independent input law on [lower, upper].
///
/// BetaSymmetric33 has density 140 (y-l)^3 (u-y)^3 / (u-l)^7, i.e. Beta(4,4)
/// on the affinely scaled interval.
class Distribution {
 public:
  Distribution(DistributionKind kind, double lower, double upper)
      : kind_(kind), lower_(lower), upper_(upper) {
    if (!(upper > lower) || !std::isfinite(lower) || !std::isfinite(upper))
      throw ContractError("distribution bounds must be finite with upper > lower");
  }

  static Distribution beta33(double lower, double upper) {
    return {DistributionKind::BetaSymmetric33, lower, upper};
  }
  static Distribution uniform(double lower, double upper) {
    return {DistributionKind::Uniform, lower, upper};
  }

  DistributionKind kind() const noexcept { return kind_; }
  double lower() const noexcept { return lower_; }
  double upper() const noexcept { return upper_; }
  double width() const noexcept { return upper_ - lower_; }

  double pdf(double y) const noexcept {
    if (!(y >= lower_ && y <= upper_)) return 0.0;
    if (kind_ == DistributionKind::Uniform) return 1.0 / width();
    const double w = width();
    const double a = (y - lower_) / w, b = (upper_ - y) / w;
    return 140.0 * a * a * a * b * b * b / w;
  }

  double cdf(double y) const noexcept {
    if (y <= lower_) return 0.0;
    if (y >= upper_) return 1.0;
    return unit_cdf((y - lower_) / width());
  }

  /// Inverse CDF for p in [0, 1].
  double quantile(double p) const {
    if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error("quantile probability outside [0, 1]");
    return lower_ + width() * unit_quantile(p);
  }

  /// Affine map [lower, upper] -> [-1, 1].
  double to_canonical(double y) const {
    if (!(y >= lower_ && y <= upper_))
      throw std::out_of_range("value " + std::to_string(y) + " outside support [" +
                              std::to_string(lower_) + ", " + std::to_string(upper_) + "]");
    if (y == upper_) return 1.0;
    if (y == lower_) return -1.0;
    return (2.0 * y - lower_ - upper_) / width();
  }

  double from_canonical(double t) const {
    if (!(t >= -1.0 && t <= 1.0))
      throw std::out_of_range("canonical value " + std::to_string(t) + " outside [-1, 1]");
    if (t == 1.0) return upper_;
    if (t == -1.0) return lower_;
    return 0.5 * (lower_ + upper_) + 0.5 * width() * t;
  }

  /// Density of the canonical variable t in [-1, 1].
  double canonical_pdf(double t) const noexcept {
    if (!(t >= -1.0 && t <= 1.0)) return 0.0;
    if (kind_ == DistributionKind::Uniform) return 0.5;
    const double a = 0.5 * (1.0 + t), b = 0.5 * (1.0 - t);
    return 70.0 * a * a * a * b * b * b;
  }

  std::vector<double> sample(std::size_t n, std::uint64_t seed) const {
    if (n == 0) throw ContractError("sample count must be at least 1");
    detail::Rng rng(seed);
    std::vector<double> out(n);
    for (auto& y : out) y = draw(rng);
    return out;
  }

  double draw(detail::Rng& rng) const {
    const double u = rng.uniform_open();
    if (kind_ == DistributionKind::Uniform) return lower_ + width() * u;
    return lower_ + width() * unit_quantile(u);
  }

  bool operator==(const Distribution&) const = default;

 private:
  double unit_cdf(double x) const noexcept {
    if (kind_ == DistributionKind::Uniform) return x;
    const double x2 = x * x;
    return x2 * x2 * (35.0 + x * (-84.0 + x * (70.0 - 20.0 * x)));
  }

  double unit_pdf(double x) const noexcept {
    if (kind_ == DistributionKind::Uniform) return 1.0;
    const double b = 1.0 - x;
    return 140.0 * x * x * x * b * b * b;
  }

  // Safeguarded Newton on the polynomial CDF with a shrinking bracket.
  double unit_quantile(double p) const noexcept {
    if (p <= 0.0) return 0.0;
    if (p >= 1.0) return 1.0;
    if (kind_ == DistributionKind::Uniform) return p;
    constexpr double kStepTol = 1e-15;
    double lo = 0.0, hi = 1.0, x = p;
    for (int it = 0; it < 200; ++it) {
      const double r = unit_cdf(x) - p;
      if (r > 0.0)
        hi = x;
      else
        lo = x;
      if (std::abs(r) <= 1e-15 || hi - lo <= kStepTol) break;
      const double d = unit_pdf(x);
      double next = d > 0.0 ? x - r / d : 0.5 * (lo + hi);
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      if (std::abs(next - x) <= kStepTol) {
        x = next;
        break;
      }
      x = next;
    }
    return x;
  }

  DistributionKind kind_;
  double lower_;
  double upper_;
};

}  // namespace mapleja
