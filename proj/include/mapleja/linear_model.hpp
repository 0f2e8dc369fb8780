#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <memory>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mapleja/distributions.hpp"
#include "mapleja/errors.hpp"

namespace mapleja {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

/// A(y) c = f(y), QoI = <j, c> + offset with the conjugated pairing j^H c.
struct LinearSystem {
  CMatrix matrix;
  CVector rhs;
  CVector functional;
  Complex offset{0.0, 0.0};
};

/// Provider of parametric linear systems. Implementations must be reentrant.
class ParametricLinearModel {
 public:
  virtual ~ParametricLinearModel() = default;
  virtual std::string name() const = 0;
  virtual std::size_t parameter_count() const = 0;
  /// Number of unknowns n.
  virtual std::size_t size() const = 0;
  /// Input laws in physical coordinates, one per parameter.
  virtual std::vector<Distribution> distributions() const = 0;
  virtual LinearSystem assemble(std::span<const double> y) const = 0;
};

/// Primal solution with its retained LU factors.
struct PrimalSolution {
  CVector solution;
  Eigen::PartialPivLU<CMatrix> factors;
  double rcond = 0.0;
};

inline double relative_residual(const CMatrix& a, const CVector& x, const CVector& b) {
  const double nb = b.norm();
  return (a * x - b).norm() / (nb > 0.0 ? nb : 1.0);
}

/// Factorizes A(y) and solves A c = f; one refinement step if needed.
inline PrimalSolution solve_primal(const LinearSystem& sys, std::span<const double> y) {
  std::vector<double> node(y.begin(), y.end());
  PrimalSolution out;
  out.factors.compute(sys.matrix);
  out.rcond = out.factors.rcond();
  const auto pivots = out.factors.matrixLU().diagonal().cwiseAbs();
  if (!(pivots.minCoeff() > 0.0) || !pivots.allFinite()) out.rcond = 0.0;
  if (!(out.rcond > 1e-14) || !std::isfinite(out.rcond))
    throw SolveError(node, out.rcond, "singular or ill-conditioned system");
  out.solution = out.factors.solve(sys.rhs);
  double res = relative_residual(sys.matrix, out.solution, sys.rhs);
  if (res > 1e-10) {
    out.solution += out.factors.solve(sys.rhs - sys.matrix * out.solution);
    res = relative_residual(sys.matrix, out.solution, sys.rhs);
  }
  if (!(res <= 1e-10)) throw SolveError(node, out.rcond, "residual above 1e-10 after refinement");
  return out;
}

/// Solves A^H z = j by substitution on the existing factors.
inline CVector solve_dual(const LinearSystem& sys, const PrimalSolution& primal) {
  return primal.factors.adjoint().solve(sys.functional);
}

inline Complex qoi(const LinearSystem& sys, const CVector& c) {
  return sys.functional.dot(c) + sys.offset;
}

/// Residual-based estimate z~^H (f - A c~) of <j, c - c~>.
inline Complex error_indicator(const LinearSystem& sys, const CVector& primal_approx,
                               const CVector& dual_approx) {
  return dual_approx.dot(sys.rhs - sys.matrix * primal_approx);
}

struct LadderConfig {
  std::size_t sections = 40;
  double damping = 0.02;
  std::size_t n_params = 1;
  bool with_frequency = false;
  /// Normalized frequency used when it is not a parameter.
  double frequency = 1.0;
};

/// Damped spring-mass chain, fixed at one end and free at the other.
///
/// A = kappa K(t) - w^2 I + i beta w I, f = e_1, j = e_n. Spring m has
/// stiffness 1 + 0.1 t_m for the first n_params springs. kappa scales the
/// unperturbed chain so that its fundamental resonance sits at w = 1; the
/// next one is near w = 3. Parameter order: w in [0.5, 1.5] first when
/// with_frequency, then t_m in [-1, 1].
class LadderModel final : public ParametricLinearModel {
 public:
  explicit LadderModel(LadderConfig cfg) : cfg_(cfg) {
    if (cfg_.sections < 2) throw ContractError("ladder needs at least 2 sections");
    if (cfg_.n_params > cfg_.sections) throw ContractError("more stiffness parameters than springs");
    if (!(cfg_.damping >= 0.0)) throw ContractError("damping must be non-negative");
    const double s = std::sin(std::numbers::pi / (2.0 * (2.0 * cfg_.sections + 1.0)));
    kappa_ = 1.0 / (4.0 * s * s);
  }

  const LadderConfig& config() const noexcept { return cfg_; }
  double stiffness_scale() const noexcept { return kappa_; }

  std::string name() const override { return "ladder"; }
  std::size_t parameter_count() const override {
    return cfg_.n_params + (cfg_.with_frequency ? 1 : 0);
  }
  std::size_t size() const override { return cfg_.sections; }

  std::vector<Distribution> distributions() const override {
    std::vector<Distribution> d;
    if (cfg_.with_frequency) d.push_back(Distribution::uniform(0.5, 1.5));
    for (std::size_t m = 0; m < cfg_.n_params; ++m) d.push_back(Distribution::uniform(-1.0, 1.0));
    return d;
  }

  LinearSystem assemble(std::span<const double> y) const override {
    if (y.size() != parameter_count())
      throw ContractError("ladder expects " + std::to_string(parameter_count()) + " parameters");
    const std::size_t n = cfg_.sections;
    std::size_t p = 0;
    const double w = cfg_.with_frequency ? y[p++] : cfg_.frequency;
    std::vector<double> k(n, 1.0);
    for (std::size_t m = 0; m < cfg_.n_params; ++m) k[m] = 1.0 + 0.1 * y[p++];

    LinearSystem sys;
    sys.matrix = CMatrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    const Complex shift(-w * w, cfg_.damping * w);
    for (std::size_t m = 0; m < n; ++m) {
      const auto i = static_cast<Eigen::Index>(m);
      const double right = m + 1 < n ? k[m + 1] : 0.0;
      sys.matrix(i, i) = kappa_ * (k[m] + right) + shift;
      if (m + 1 < n) {
        sys.matrix(i, i + 1) = -kappa_ * right;
        sys.matrix(i + 1, i) = -kappa_ * right;
      }
    }
    sys.rhs = CVector::Zero(static_cast<Eigen::Index>(n));
    sys.rhs(0) = 1.0;
    sys.functional = CVector::Zero(static_cast<Eigen::Index>(n));
    sys.functional(static_cast<Eigen::Index>(n - 1)) = 1.0;
    return sys;
  }

 private:
  LadderConfig cfg_;
  double kappa_ = 1.0;
};

/// Scalar black-box view y -> QoI(y) of a linear model (one solve per call).
inline std::function<Complex(std::span<const double>)> qoi_model(
    std::shared_ptr<const ParametricLinearModel> model) {
  return [model](std::span<const double> y) {
    const auto sys = model->assemble(y);
    const auto primal = solve_primal(sys, y);
    return qoi(sys, primal.solution);
  };
}

}  // namespace mapleja
