#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "mapleja/distributions.hpp"
#include "mapleja/errors.hpp"
#include "mapleja/leja.hpp"
#include "mapleja/maps.hpp"
#include "mapleja/multi_index.hpp"

namespace mapleja {

using Complex = std::complex<double>;

/// Mapped hierarchical Leja interpolant on a downward-closed index set.
///
/// Each multi-index l owns one node, (g_1(y_1[l_1]), ..., g_N(y_N[l_N])) in
/// canonical coordinates, and one surplus (a complex vector of length
/// `width`, scalar when width == 1). The univariate basis is the Newton-type
/// hierarchical polynomial on the pre-map Leja nodes, evaluated at
/// g^{-1}(t), so it equals 1 at its own node and 0 at all earlier ones.
class Surrogate {
 public:
  Surrogate(std::vector<Distribution> dists, std::vector<ConformalMap> maps, std::size_t width = 1)
      : Surrogate(std::move(dists), std::move(maps), {}, width) {}

  /// `nodes1d` seeds the pre-map canonical sequences (e.g. from a file);
  /// missing dimensions are generated.
  Surrogate(std::vector<Distribution> dists, std::vector<ConformalMap> maps,
            std::vector<std::vector<double>> nodes1d, std::size_t width)
      : dists_(std::move(dists)), maps_(std::move(maps)), width_(width) {
    if (dists_.empty()) throw ContractError("surrogate needs at least one dimension");
    if (maps_.size() != dists_.size())
      throw ContractError("number of maps does not match number of distributions");
    if (width_ == 0) throw ContractError("surrogate width must be positive");
    nodes1d.resize(dists_.size());
    nodes1d_ = std::move(nodes1d);
    ratios_.resize(dists_.size());
    for (std::size_t n = 0; n < dimension(); ++n) {
      if (nodes1d_[n].empty()) nodes1d_[n] = leja_nodes(dists_[n].kind(), 1);
      rebuild_ratios(n);
    }
  }

  std::size_t dimension() const noexcept { return dists_.size(); }
  std::size_t width() const noexcept { return width_; }
  std::size_t size() const noexcept { return indices_.size(); }
  bool empty() const noexcept { return indices_.empty(); }

  const std::vector<Distribution>& distributions() const noexcept { return dists_; }
  const std::vector<ConformalMap>& maps() const noexcept { return maps_; }
  const std::vector<std::vector<double>>& nodes1d() const noexcept { return nodes1d_; }
  /// Indices in insertion order (every prefix is downward-closed).
  const std::vector<MultiIndex>& indices() const noexcept { return indices_; }
  const MultiIndexSet& index_set() const noexcept { return set_; }
  bool contains(const MultiIndex& idx) const { return set_.contains(idx); }

  std::span<const Complex> surplus(const MultiIndex& idx) const {
    auto it = position_.find(idx);
    if (it == position_.end()) throw ContractError("index " + idx.str() + " not in surrogate");
    return {surpluses_.data() + it->second * width_, width_};
  }
  std::span<const Complex> surpluses() const noexcept { return surpluses_; }

  MultiIndexSet admissible_neighbors() const {
    if (set_.empty()) return {MultiIndex(dimension())};
    return mapleja::admissible_neighbors(set_);
  }

  /// Collocation node of `idx` in physical coordinates.
  std::vector<double> node(const MultiIndex& idx) {
    check_dim(idx);
    std::vector<double> y(dimension());
    for (std::size_t n = 0; n < dimension(); ++n) {
      ensure_level(n, idx[n]);
      y[n] = dists_[n].from_canonical(maps_[n].forward(nodes1d_[n][idx[n]]));
    }
    return y;
  }

  /// Product of univariate mapped hierarchical polynomials at physical y.
  double basis(const MultiIndex& idx, std::span<const double> y) {
    check_dim(idx);
    const auto u = premap(y);
    double h = 1.0;
    for (std::size_t n = 0; n < dimension(); ++n) {
      ensure_level(n, idx[n]);
      h *= univariate(n, idx[n], u[n]);
    }
    return h;
  }

  /// Surplus a new index would receive for the model value(s) at its node.
  std::vector<Complex> candidate_surplus(const MultiIndex& idx, std::span<const Complex> values) {
    check_dim(idx);
    if (values.size() != width_) throw ContractError("model value width mismatch");
    std::vector<double> u(dimension());
    for (std::size_t n = 0; n < dimension(); ++n) {
      ensure_level(n, idx[n]);
      u[n] = nodes1d_[n][idx[n]];
    }
    auto s = evaluate_premap(u);
    for (std::size_t k = 0; k < width_; ++k) s[k] = values[k] - s[k];
    return s;
  }

  /// Absorbs `idx` with the model value(s) at its node.
  void add_point(const MultiIndex& idx, std::span<const Complex> values) {
    require_admissible(idx);
    auto s = candidate_surplus(idx, values);
    insert(idx, s);
  }
  void add_point(const MultiIndex& idx, Complex value) {
    add_point(idx, std::span<const Complex>(&value, 1));
  }

  /// Absorbs `idx` with a given surplus (precomputed or estimated).
  void add_surplus(const MultiIndex& idx, std::span<const Complex> surplus) {
    require_admissible(idx);
    if (surplus.size() != width_) throw ContractError("surplus width mismatch");
    for (std::size_t n = 0; n < dimension(); ++n) ensure_level(n, idx[n]);
    insert(idx, surplus);
  }
  void add_surplus(const MultiIndex& idx, Complex surplus) {
    add_surplus(idx, std::span<const Complex>(&surplus, 1));
  }

  Complex evaluate(std::span<const double> y) const {
    if (width_ != 1) throw ContractError("evaluate() on a field surrogate; use evaluate_field()");
    return evaluate_premap(premap(y))[0];
  }
  std::vector<Complex> evaluate_field(std::span<const double> y) const {
    return evaluate_premap(premap(y));
  }

  /// Interpolant on a downward-closed subset of the index set. Surpluses of
  /// lower sets do not depend on indices outside them, so this is exact.
  Surrogate restricted(const MultiIndexSet& subset) const {
    if (!is_downward_closed(subset)) throw ContractError("restriction set is not downward-closed");
    Surrogate out(dists_, maps_, nodes1d_, width_);
    for (const auto& idx : indices_)
      if (subset.contains(idx)) out.insert(idx, surplus(idx));
    if (out.size() != subset.size()) throw ContractError("restriction set is not a subset");
    return out;
  }

  /// Pre-map canonical coordinates u = g^{-1}(to_canonical(y)).
  std::vector<double> premap(std::span<const double> y) const {
    if (y.size() != dimension())
      throw ContractError("point has " + std::to_string(y.size()) + " coordinates, expected " +
                          std::to_string(dimension()));
    std::vector<double> u(dimension());
    for (std::size_t n = 0; n < dimension(); ++n) {
      const auto& d = dists_[n];
      if (!(y[n] >= d.lower() && y[n] <= d.upper()))
        throw std::domain_error("coordinate " + std::to_string(n) + " = " + std::to_string(y[n]) +
                                " outside the support box");
      u[n] = maps_[n].inverse(d.to_canonical(y[n]));
    }
    return u;
  }

  std::vector<Complex> evaluate_premap(std::span<const double> u) const {
    std::vector<std::vector<double>> h(dimension());
    for (std::size_t n = 0; n < dimension(); ++n) {
      const std::size_t levels = max_level_.size() > n ? max_level_[n] + 1 : 1;
      h[n].resize(levels);
      h[n][0] = 1.0;
      for (std::size_t l = 1; l < levels; ++l)
        h[n][l] = h[n][l - 1] * (u[n] - nodes1d_[n][l - 1]) * ratios_[n][l];
    }
    std::vector<Complex> acc(width_, Complex{});
    for (std::size_t i = 0; i < indices_.size(); ++i) {
      double b = 1.0;
      const auto& idx = indices_[i];
      for (std::size_t n = 0; n < dimension() && b != 0.0; ++n) b *= h[n][idx[n]];
      if (b == 0.0) continue;
      const Complex* s = surpluses_.data() + i * width_;
      for (std::size_t k = 0; k < width_; ++k) acc[k] += b * s[k];
    }
    return acc;
  }

 private:
  void check_dim(const MultiIndex& idx) const {
    if (idx.size() != dimension()) throw ContractError("multi-index dimension mismatch");
  }

  void require_admissible(const MultiIndex& idx) const {
    check_dim(idx);
    if (!is_admissible(set_, idx))
      throw ContractError("index " + idx.str() + " is not admissible for the current index set");
  }

  void insert(const MultiIndex& idx, std::span<const Complex> s) {
    position_.emplace(idx, indices_.size());
    set_.insert(idx);
    indices_.push_back(idx);
    surpluses_.insert(surpluses_.end(), s.begin(), s.end());
    max_level_.resize(dimension(), 0);
    for (std::size_t n = 0; n < dimension(); ++n)
      if (idx[n] > max_level_[n]) max_level_[n] = idx[n];
  }

  void ensure_level(std::size_t n, unsigned level) {
    auto& seq = nodes1d_[n];
    if (level < seq.size()) return;
    const auto standard = leja_nodes(dists_[n].kind(), level + 1);
    if (std::equal(seq.begin(), seq.end(), standard.begin())) {
      seq = standard;
    } else {
      LejaSequence s(Distribution(dists_[n].kind(), -1.0, 1.0), seq);
      s.extend_to(level + 1);
      seq.assign(s.nodes().begin(), s.nodes().end());
    }
    rebuild_ratios(n);
  }

  // ratios_[n][l] = D_{l-1} / D_l with D_l = prod_{k<l} (y_l - y_k).
  void rebuild_ratios(std::size_t n) {
    const auto& y = nodes1d_[n];
    auto& r = ratios_[n];
    r.assign(y.size(), 1.0);
    double prev_log = 0.0;
    bool prev_neg = false;
    for (std::size_t l = 1; l < y.size(); ++l) {
      double lg = 0.0;
      bool neg = false;
      for (std::size_t k = 0; k < l; ++k) {
        const double d = y[l] - y[k];
        if (d == 0.0) throw ContractError("repeated node in a univariate sequence");
        lg += std::log(std::abs(d));
        neg ^= d < 0.0;
      }
      r[l] = std::exp(prev_log - lg) * ((neg != prev_neg) ? -1.0 : 1.0);
      prev_log = lg;
      prev_neg = neg;
    }
  }

  double univariate(std::size_t n, unsigned level, double u) const {
    double h = 1.0;
    for (unsigned l = 1; l <= level; ++l) h *= (u - nodes1d_[n][l - 1]) * ratios_[n][l];
    return h;
  }

  std::vector<Distribution> dists_;
  std::vector<ConformalMap> maps_;
  std::size_t width_;
  std::vector<std::vector<double>> nodes1d_;
  std::vector<std::vector<double>> ratios_;
  std::vector<MultiIndex> indices_;
  MultiIndexSet set_;
  std::map<MultiIndex, std::size_t> position_;
  std::vector<Complex> surpluses_;
  std::vector<unsigned> max_level_;
};

}  // namespace mapleja
