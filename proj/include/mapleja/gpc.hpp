#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mapleja/detail/parallel.hpp"
#include "mapleja/distributions.hpp"
#include "mapleja/errors.hpp"
#include "mapleja/multi_index.hpp"

namespace mapleja {

using Complex = std::complex<double>;

/// Orthonormal polynomials for the canonical law of `kind` (Legendre for
/// Uniform, Jacobi(3,3) for BetaSymmetric33), probability-normalized.
class OrthonormalFamily {
 public:
  explicit OrthonormalFamily(DistributionKind kind)
      : a_(kind == DistributionKind::Uniform ? 0.0 : 3.0) {}

  /// Recurrence coefficient b_k, k >= 1: t psi_k = b_{k+1} psi_{k+1} + b_k psi_{k-1}.
  double b(std::size_t k) const {
    const double kk = static_cast<double>(k);
    return std::sqrt(kk * (kk + 2.0 * a_) / ((2.0 * kk + 2.0 * a_ + 1.0) * (2.0 * kk + 2.0 * a_ - 1.0)));
  }

  /// psi_0(t), ..., psi_degree(t).
  std::vector<double> values(double t, std::size_t degree) const {
    std::vector<double> psi(degree + 1);
    psi[0] = 1.0;
    if (degree >= 1) psi[1] = t / b(1);
    for (std::size_t k = 1; k < degree; ++k) psi[k + 1] = (t * psi[k] - b(k) * psi[k - 1]) / b(k + 1);
    return psi;
  }

 private:
  double a_;
};

struct QuadratureRule {
  std::vector<std::vector<double>> points;  // canonical coordinates
  std::vector<double> weights;
};

/// m-point Gauss rule for the canonical law (Golub-Welsch). Nodes are
/// symmetrized so that x_i = -x_{m-1-i} exactly.
inline QuadratureRule gauss_rule(DistributionKind kind, std::size_t m) {
  if (m == 0) throw ContractError("Gauss rule needs at least one point");
  OrthonormalFamily fam(kind);
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
  for (std::size_t k = 1; k < m; ++k) {
    const auto i = static_cast<Eigen::Index>(k);
    jac(i, i - 1) = jac(i - 1, i) = fam.b(k);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jac);
  std::vector<double> x(m), w(m);
  for (std::size_t i = 0; i < m; ++i) {
    x[i] = eig.eigenvalues()(static_cast<Eigen::Index>(i));
    const double v0 = eig.eigenvectors()(0, static_cast<Eigen::Index>(i));
    w[i] = v0 * v0;
  }
  QuadratureRule rule;
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t j = m - 1 - i;
    const double xs = i == j ? 0.0 : 0.5 * (x[i] - x[j]);
    rule.points.push_back({xs});
    rule.weights.push_back(0.5 * (w[i] + w[j]));
  }
  return rule;
}

namespace detail {

inline QuadratureRule tensor_product(const std::vector<QuadratureRule>& rules) {
  QuadratureRule out;
  out.points.push_back({});
  out.weights.push_back(1.0);
  for (const auto& r : rules) {
    QuadratureRule next;
    for (std::size_t i = 0; i < out.points.size(); ++i)
      for (std::size_t q = 0; q < r.points.size(); ++q) {
        auto p = out.points[i];
        p.push_back(r.points[q][0]);
        next.points.push_back(std::move(p));
        next.weights.push_back(out.weights[i] * r.weights[q]);
      }
    out = std::move(next);
  }
  return out;
}

inline double binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0.0;
  double r = 1.0;
  for (std::size_t i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return std::round(r);
}

}  // namespace detail

/// Full tensor Gauss rule with `order` points per dimension.
inline QuadratureRule tensor_gauss_rule(std::span<const DistributionKind> kinds, std::size_t order) {
  std::vector<QuadratureRule> rules;
  for (auto k : kinds) rules.push_back(gauss_rule(k, order));
  return detail::tensor_product(rules);
}

/// Smolyak combination of Gauss rules Q_{l+1} at level k; coincident points
/// are merged. Exact for every polynomial of total degree <= 2k + 1.
inline QuadratureRule smolyak_gauss_rule(std::span<const DistributionKind> kinds, unsigned level) {
  const std::size_t dim = kinds.size();
  std::map<std::vector<double>, double> merged;
  for (const auto& idx : total_degree_set(dim, level)) {
    const unsigned tot = idx.total();
    if (tot + dim < level + 1) continue;  // |l| >= k - N + 1
    const std::size_t gap = level - tot;
    const double coef = ((gap % 2) ? -1.0 : 1.0) * detail::binomial(dim - 1, gap);
    if (coef == 0.0) continue;
    std::vector<QuadratureRule> rules;
    for (std::size_t n = 0; n < dim; ++n) rules.push_back(gauss_rule(kinds[n], idx[n] + 1));
    auto t = detail::tensor_product(rules);
    for (std::size_t q = 0; q < t.points.size(); ++q) merged[t.points[q]] += coef * t.weights[q];
  }
  QuadratureRule out;
  for (auto& [p, w] : merged) {
    out.points.push_back(p);
    out.weights.push_back(w);
  }
  return out;
}

enum class GpcQuadrature { Tensor, SmolyakGauss };

/// Total-degree orthonormal polynomial chaos expansion.
class GpcExpansion {
 public:
  GpcExpansion(std::vector<Distribution> dists, unsigned p_max)
      : dists_(std::move(dists)), p_max_(p_max) {
    if (dists_.empty()) throw ContractError("expansion needs at least one dimension");
    for (const auto& d : dists_) families_.emplace_back(d.kind());
    for (const auto& p : total_degree_set(dists_.size(), p_max_)) coeffs_.emplace(p, Complex{});
  }

  std::size_t dimension() const noexcept { return dists_.size(); }
  unsigned max_degree() const noexcept { return p_max_; }
  const std::vector<Distribution>& distributions() const noexcept { return dists_; }
  const std::map<MultiIndex, Complex>& coefficients() const noexcept { return coeffs_; }
  Complex& coefficient(const MultiIndex& p) {
    auto it = coeffs_.find(p);
    if (it == coeffs_.end()) throw ContractError("degree " + p.str() + " outside the total-degree set");
    return it->second;
  }
  Complex coefficient(const MultiIndex& p) const {
    auto it = coeffs_.find(p);
    if (it == coeffs_.end()) throw ContractError("degree " + p.str() + " outside the total-degree set");
    return it->second;
  }

  /// Psi_p at canonical t (all univariate values up to p_max).
  std::vector<std::vector<double>> basis_table(std::span<const double> t) const {
    std::vector<std::vector<double>> psi(dimension());
    for (std::size_t n = 0; n < dimension(); ++n) psi[n] = families_[n].values(t[n], p_max_);
    return psi;
  }

  Complex evaluate(std::span<const double> y) const {
    if (y.size() != dimension()) throw ContractError("point dimension mismatch");
    std::vector<double> t(dimension());
    for (std::size_t n = 0; n < dimension(); ++n) {
      if (!(y[n] >= dists_[n].lower() && y[n] <= dists_[n].upper()))
        throw std::domain_error("coordinate " + std::to_string(n) + " outside the support box");
      t[n] = dists_[n].to_canonical(y[n]);
    }
    const auto psi = basis_table(t);
    Complex acc{};
    for (const auto& [p, s] : coeffs_) {
      double b = 1.0;
      for (std::size_t n = 0; n < dimension(); ++n) b *= psi[n][p[n]];
      acc += s * b;
    }
    return acc;
  }

 private:
  std::vector<Distribution> dists_;
  unsigned p_max_;
  std::vector<OrthonormalFamily> families_;
  std::map<MultiIndex, Complex> coeffs_;
};

inline QuadratureRule projection_rule(std::span<const Distribution> dists, unsigned p_max,
                                      GpcQuadrature quad) {
  std::vector<DistributionKind> kinds;
  for (const auto& d : dists) kinds.push_back(d.kind());
  return quad == GpcQuadrature::Tensor ? tensor_gauss_rule(kinds, p_max + 1)
                                       : smolyak_gauss_rule(kinds, p_max);
}

/// Pseudo-spectral projection s_p = E[J Psi_p] by Gauss quadrature.
template <class Model>
GpcExpansion project(const Model& model, std::vector<Distribution> dists, unsigned p_max,
                     GpcQuadrature quad) {
  GpcExpansion exp(dists, p_max);
  const auto rule = projection_rule(dists, p_max, quad);
  std::vector<Complex> values(rule.points.size());
  detail::for_each_chunk(rule.points.size(), [&](std::size_t q) {
    std::vector<double> y(dists.size());
    for (std::size_t n = 0; n < dists.size(); ++n) y[n] = dists[n].from_canonical(rule.points[q][n]);
    values[q] = model(std::span<const double>(y));
  });
  std::map<MultiIndex, Complex> acc;
  for (std::size_t q = 0; q < rule.points.size(); ++q) {
    const auto psi = exp.basis_table(rule.points[q]);
    for (const auto& [p, s] : exp.coefficients()) {
      double b = rule.weights[q];
      for (std::size_t n = 0; n < dists.size(); ++n) b *= psi[n][p[n]];
      acc[p] += values[q] * b;
    }
  }
  for (const auto& [p, s] : acc) exp.coefficient(p) = s;
  return exp;
}

inline Complex evaluate_expansion(const GpcExpansion& exp, std::span<const double> y) {
  return exp.evaluate(y);
}

struct DecayEntry {
  unsigned total_degree;
  double max_abs_coeff;
};

/// max_{|p| = w} |s_p| for w = 0..p_max.
inline std::vector<DecayEntry> decay_report(const GpcExpansion& exp) {
  std::vector<DecayEntry> out(exp.max_degree() + 1);
  for (unsigned w = 0; w <= exp.max_degree(); ++w) out[w] = {w, 0.0};
  for (const auto& [p, s] : exp.coefficients()) {
    auto& e = out[p.total()];
    e.max_abs_coeff = std::max(e.max_abs_coeff, std::abs(s));
  }
  return out;
}

}  // namespace mapleja
