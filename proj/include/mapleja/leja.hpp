#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <mutex>
#include <span>
#include <vector>

#include "mapleja/detail/minimize.hpp"
#include "mapleja/distributions.hpp"
#include "mapleja/errors.hpp"
#include "mapleja/maps.hpp"

namespace mapleja {

/// Nested weighted Leja sequence in canonical coordinates [-1, 1].
///
/// Each new node maximizes sqrt(rho(t)) * prod_k |t - y_k|. The search scans
/// a symmetric uniform grid (objective kept in log space and updated
/// incrementally), then refines by golden section around the best grid
/// point. Ties go to the smaller abscissa.
class LejaSequence {
 public:
  static constexpr std::size_t kDefaultGrid = 100001;

  explicit LejaSequence(const Distribution& law, std::size_t grid_points = kDefaultGrid)
      : LejaSequence(law, std::vector<double>{0.0}, grid_points) {}

  LejaSequence(const Distribution& law, std::vector<double> initial,
               std::size_t grid_points = kDefaultGrid)
      : law_(law) {
    if (grid_points < 3 || grid_points % 2 == 0)
      throw ContractError("Leja candidate grid needs an odd number of points >= 3");
    if (initial.empty()) throw ContractError("Leja sequence needs at least one starting node");
    grid_.resize(grid_points);
    objective_.resize(grid_points);
    const double span = static_cast<double>(grid_points - 1);
    for (std::size_t i = 0; i < grid_points; ++i) {
      grid_[i] = (2.0 * static_cast<double>(i) - span) / span;
      objective_[i] = 0.5 * std::log(law_.canonical_pdf(grid_[i]));
    }
    for (double y : initial) absorb(y);
  }

  std::span<const double> nodes() const noexcept { return nodes_; }
  std::size_t size() const noexcept { return nodes_.size(); }

  double next_node() {
    const std::size_t n = grid_.size();
    std::size_t best = 0;
    double best_value = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      const double v = objective_[i];
      if (v > best_value && (!std::isfinite(best_value) ||
                                v > best_value + 1e-12 * std::max(1.0, std::abs(best_value)))) {
        best_value = v;
        best = i;
      }
    }
    if (!std::isfinite(best_value))
      throw ContractError("Leja objective has no finite maximizer on the candidate grid");
    double y = grid_[best];
    if (best > 0 && best + 1 < n) {
      auto f = [this](double t) { return log_objective(t); };
      const auto refined = detail::golden_maximize(f, grid_[best - 1], grid_[best + 1]);
      if (refined.value > best_value) y = refined.x;
    }
    absorb(y);
    return y;
  }

  void extend_to(std::size_t count) {
    while (nodes_.size() < count) next_node();
  }

  double log_objective(double t) const {
    double v = 0.5 * std::log(law_.canonical_pdf(t));
    for (double yk : nodes_) v += std::log(std::abs(t - yk));
    return v;
  }

 private:
  void absorb(double y) {
    if (!(y >= -1.0 && y <= 1.0)) throw ContractError("Leja node outside [-1, 1]");
    for (double yk : nodes_)
      if (yk == y) throw ContractError("duplicate Leja node");
    nodes_.push_back(y);
    for (std::size_t i = 0; i < grid_.size(); ++i) objective_[i] += std::log(std::abs(grid_[i] - y));
  }

  Distribution law_;
  std::vector<double> grid_;
  std::vector<double> objective_;
  std::vector<double> nodes_;
};

/// First `count` canonical Leja nodes for the law's shape. Shared across
/// callers; the nested prefix is computed once per distribution kind.
inline std::vector<double> leja_nodes(DistributionKind kind, std::size_t count) {
  static std::mutex mutex;
  static std::map<DistributionKind, LejaSequence> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(kind);
  if (it == cache.end())
    it = cache.emplace(kind, LejaSequence(Distribution(kind, -1.0, 1.0))).first;
  it->second.extend_to(count);
  auto all = it->second.nodes();
  return {all.begin(), all.begin() + static_cast<std::ptrdiff_t>(count)};
}

/// Mapped (transplanted) Leja nodes g(y_k) in canonical coordinates.
inline std::vector<double> generate_sequence(const Distribution& law, std::size_t count,
                                             const ConformalMap& map) {
  if (count == 0) throw ContractError("Leja sequence length must be at least 1");
  auto nodes = leja_nodes(law.kind(), count);
  for (auto& y : nodes) y = map.forward(y);
  return nodes;
}

}  // namespace mapleja
