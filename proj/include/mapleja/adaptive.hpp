#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "mapleja/detail/format.hpp"
#include "mapleja/detail/parallel.hpp"
#include "mapleja/errors.hpp"
#include "mapleja/linear_model.hpp"
#include "mapleja/multi_index.hpp"
#include "mapleja/surrogate.hpp"

namespace mapleja {

using ScalarModel = std::function<Complex(std::span<const double>)>;

enum class IndicatorKind { SurplusModulus, AdjointResidual };

struct AdaptiveConfig {
  /// Stop once |Lambda| + |admissible neighbors| reaches this many nodes.
  std::size_t budget = 100;
  IndicatorKind indicator = IndicatorKind::SurplusModulus;
  /// Optional early exit when the largest candidate indicator drops below.
  std::optional<double> tolerance;
};

struct IterationRecord {
  std::size_t iteration;
  MultiIndex chosen;
  double indicator;
  std::size_t lu_count;
  std::size_t fb_count;
  std::size_t res_count;
  std::optional<double> cv_error;
};

struct AdaptiveReport {
  std::vector<IterationRecord> iterations;
  std::size_t lu_count = 0;
  std::size_t fb_count = 0;
  std::size_t res_count = 0;
  /// Accepted indices including the root.
  std::size_t accepted = 0;
  /// Nodes of the final surrogate (|Lambda| + |admissible neighbors|).
  std::size_t final_nodes = 0;

  void write_csv(std::ostream& out) const {
    out << "iteration,chosen_index,indicator,lu_count,fb_count,res_count,cv_error\n";
    for (const auto& r : iterations) {
      out << r.iteration << ",\"" << r.chosen.str() << "\"," << detail::fmt17(r.indicator) << ','
          << r.lu_count << ',' << r.fb_count << ',' << r.res_count << ',';
      if (r.cv_error) out << detail::fmt17(*r.cv_error);
      out << '\n';
    }
  }
};

namespace detail {

inline Complex call_model(const ScalarModel& model, const std::vector<double>& y) {
  try {
    return model(y);
  } catch (const ModelEvaluationError&) {
    throw;
  } catch (const SolveError&) {
    throw;
  } catch (const std::exception& e) {
    throw ModelEvaluationError(y, e.what());
  }
}

// Largest modulus; ties go to the lexicographically greatest index.
template <class Scores>
typename Scores::const_iterator pick_best(const Scores& scores, const MultiIndexSet& candidates) {
  auto best = scores.end();
  for (auto it = scores.begin(); it != scores.end(); ++it) {
    if (!candidates.contains(it->first)) continue;
    if (best == scores.end() || std::abs(it->second) >= std::abs(best->second)) best = it;
  }
  return best;
}

}  // namespace detail

struct AdaptiveResult {
  Surrogate surrogate;
  AdaptiveReport report;
};

/// Surplus-steered dimension-adaptive interpolation.
///
/// Every admissible neighbor is evaluated once; the one with the largest
/// surplus modulus joins the index set. The returned surrogate covers the
/// index set together with its admissible neighbors. `monitor`, if given,
/// is called on the current index-set surrogate after each acceptance.
inline AdaptiveResult run_adaptive(const ScalarModel& model, const AdaptiveConfig& cfg,
                                   std::vector<Distribution> dists, std::vector<ConformalMap> maps,
                                   const std::function<double(const Surrogate&)>& monitor = {}) {
  if (cfg.budget < 1) throw ContractError("budget must be at least 1");
  if (cfg.indicator != IndicatorKind::SurplusModulus)
    throw ContractError("run_adaptive needs the surplus-modulus indicator");
  Surrogate sur(std::move(dists), std::move(maps));
  AdaptiveReport report;
  const MultiIndex root(sur.dimension());
  sur.add_point(root, detail::call_model(model, sur.node(root)));
  report.lu_count = report.fb_count = report.accepted = 1;

  std::map<MultiIndex, Complex> scores;
  for (std::size_t it = 1;; ++it) {
    const auto adm = sur.admissible_neighbors();
    std::vector<MultiIndex> fresh;
    std::vector<std::vector<double>> points;
    for (const auto& idx : adm)
      if (!scores.contains(idx)) {
        fresh.push_back(idx);
        points.push_back(sur.node(idx));
      }
    std::vector<Complex> values(fresh.size());
    detail::for_each_chunk(fresh.size(),
                           [&](std::size_t i) { values[i] = detail::call_model(model, points[i]); });
    for (std::size_t i = 0; i < fresh.size(); ++i)
      scores.emplace(fresh[i], sur.candidate_surplus(fresh[i], {&values[i], 1})[0]);
    report.lu_count += fresh.size();
    report.fb_count += fresh.size();

    const auto best = detail::pick_best(scores, adm);
    const bool budget_hit = sur.size() + adm.size() >= cfg.budget;
    const bool tol_hit = cfg.tolerance && std::abs(best->second) < *cfg.tolerance;
    if (budget_hit || tol_hit) {
      report.final_nodes = sur.size() + adm.size();
      for (const auto& idx : adm) sur.add_surplus(idx, scores.at(idx));
      break;
    }
    const MultiIndex chosen = best->first;
    const double indicator = std::abs(best->second);
    sur.add_surplus(chosen, best->second);
    scores.erase(chosen);
    ++report.accepted;
    IterationRecord rec{it, chosen, indicator, report.lu_count, report.fb_count, 0, std::nullopt};
    if (monitor) rec.cv_error = monitor(sur);
    report.iterations.push_back(std::move(rec));
  }
  return {std::move(sur), std::move(report)};
}

struct AdjointResult {
  /// QoI surrogate on Lambda plus admissible neighbors, whose surpluses are
  /// the adjoint estimates.
  Surrogate qoi;
  /// QoI surrogate on Lambda only (same set as primal and dual).
  Surrogate qoi_core;
  Surrogate primal;
  Surrogate dual;
  AdaptiveReport report;
};

namespace detail {

inline CVector to_eigen(const std::vector<Complex>& v) {
  return Eigen::Map<const CVector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

inline std::vector<Complex> to_std(const CVector& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace detail

/// Adjoint-steered dimension-adaptive interpolation.
///
/// Candidates are scored by the residual indicator z~^H (f - A c~) using the
/// current primal and dual field surrogates; only the accepted index costs a
/// factorization (one LU, two substitutions).
inline AdjointResult run_adaptive_adjoint(const ParametricLinearModel& model,
                                          const AdaptiveConfig& cfg,
                                          std::vector<Distribution> dists,
                                          std::vector<ConformalMap> maps) {
  if (cfg.budget < 1) throw ContractError("budget must be at least 1");
  if (cfg.indicator != IndicatorKind::AdjointResidual)
    throw ContractError("run_adaptive_adjoint needs the adjoint-residual indicator");
  if (dists.size() != model.parameter_count())
    throw ContractError("distribution count does not match the model parameter count");
  const std::size_t n = model.size();
  Surrogate primal(dists, maps, n);
  Surrogate dual(dists, maps, n);
  Surrogate qoi_core(dists, maps);
  AdaptiveReport report;

  auto accept = [&](const MultiIndex& idx) {
    const auto y = primal.node(idx);
    LinearSystem sys;
    try {
      sys = model.assemble(y);
    } catch (const std::exception& e) {
      throw ModelEvaluationError(y, e.what());
    }
    const auto sol = solve_primal(sys, y);
    const CVector z = solve_dual(sys, sol);
    ++report.lu_count;
    report.fb_count += 2;
    ++report.accepted;
    primal.add_point(idx, detail::to_std(sol.solution));
    dual.add_point(idx, detail::to_std(z));
    qoi_core.add_point(idx, qoi(sys, sol.solution));
  };

  accept(MultiIndex(primal.dimension()));

  std::map<MultiIndex, Complex> scores;
  for (std::size_t it = 1;; ++it) {
    const auto adm = qoi_core.admissible_neighbors();
    std::vector<MultiIndex> fresh;
    std::vector<std::vector<double>> points;
    for (const auto& idx : adm)
      if (!scores.contains(idx)) {
        fresh.push_back(idx);
        points.push_back(primal.node(idx));
      }
    std::vector<Complex> eta(fresh.size());
    detail::for_each_chunk(fresh.size(), [&](std::size_t i) {
      LinearSystem sys;
      try {
        sys = model.assemble(points[i]);
      } catch (const std::exception& e) {
        throw ModelEvaluationError(points[i], e.what());
      }
      eta[i] = error_indicator(sys, detail::to_eigen(primal.evaluate_field(points[i])),
                               detail::to_eigen(dual.evaluate_field(points[i])));
    });
    for (std::size_t i = 0; i < fresh.size(); ++i) scores.emplace(fresh[i], eta[i]);
    report.res_count += fresh.size();

    const auto best = detail::pick_best(scores, adm);
    const bool budget_hit = qoi_core.size() + adm.size() >= cfg.budget;
    const bool tol_hit = cfg.tolerance && std::abs(best->second) < *cfg.tolerance;
    if (budget_hit || tol_hit) {
      report.final_nodes = qoi_core.size() + adm.size();
      Surrogate full = qoi_core;
      for (const auto& idx : adm) full.add_surplus(idx, scores.at(idx));
      return {std::move(full), std::move(qoi_core), std::move(primal), std::move(dual),
              std::move(report)};
    }
    const MultiIndex chosen = best->first;
    const double indicator = std::abs(best->second);
    scores.erase(best);
    accept(chosen);
    report.iterations.push_back(
        {it, chosen, indicator, report.lu_count, report.fb_count, report.res_count, std::nullopt});
  }
}

/// Surrogate value plus the adjoint residual correction at y. Needs one
/// assembly and no factorization.
inline Complex corrected_evaluate(const Surrogate& qoi_sur, const Surrogate& primal,
                                  const Surrogate& dual, const ParametricLinearModel& model,
                                  std::span<const double> y) {
  if (qoi_sur.index_set() != primal.index_set() || qoi_sur.index_set() != dual.index_set())
    throw ContractError("corrected evaluation needs surrogates on the same index set");
  const auto sys = model.assemble(y);
  return qoi_sur.evaluate(y) + error_indicator(sys, detail::to_eigen(primal.evaluate_field(y)),
                                               detail::to_eigen(dual.evaluate_field(y)));
}

/// Interpolant on the total-degree set {|l| <= level} (isotropic comparator).
inline AdaptiveResult build_isotropic(const ScalarModel& model, std::vector<Distribution> dists,
                                      std::vector<ConformalMap> maps, unsigned level) {
  Surrogate sur(std::move(dists), std::move(maps));
  const auto set = total_degree_set(sur.dimension(), level);
  std::vector<MultiIndex> order(set.begin(), set.end());
  std::vector<std::vector<double>> points;
  for (const auto& idx : order) points.push_back(sur.node(idx));
  std::vector<Complex> values(order.size());
  detail::for_each_chunk(order.size(),
                         [&](std::size_t i) { values[i] = detail::call_model(model, points[i]); });
  for (std::size_t i = 0; i < order.size(); ++i) sur.add_point(order[i], values[i]);
  AdaptiveReport report;
  report.lu_count = report.fb_count = report.accepted = report.final_nodes = order.size();
  return {std::move(sur), std::move(report)};
}

}  // namespace mapleja
