#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "mapleja/detail/minimize.hpp"
#include "mapleja/detail/parallel.hpp"
#include "mapleja/detail/random.hpp"
#include "mapleja/distributions.hpp"
#include "mapleja/errors.hpp"

namespace mapleja {

using Complex = std::complex<double>;

/// Anything callable as f(std::span<const double>) -> Complex (or double).
template <class F>
concept PointFunction = requires(const F& f, std::span<const double> y) {
  { std::abs(f(y)) } -> std::convertible_to<double>;
};

/// n independent draws from the product law. Chunk c of 4096 rows uses its
/// own substream, so results do not depend on the thread count.
inline std::vector<std::vector<double>> sample_inputs(std::span<const Distribution> dists,
                                                      std::size_t n, std::uint64_t seed) {
  std::vector<std::vector<double>> rows(n, std::vector<double>(dists.size()));
  detail::for_each_chunk(detail::chunk_count(n), [&](std::size_t c) {
    detail::Rng rng(seed, c);
    const std::size_t end = std::min(n, (c + 1) * detail::kChunkSize);
    for (std::size_t i = c * detail::kChunkSize; i < end; ++i)
      for (std::size_t d = 0; d < dists.size(); ++d) rows[i][d] = dists[d].draw(rng);
  });
  return rows;
}

namespace detail {

template <class F>
std::vector<double> abs_values(const F& f, const std::vector<std::vector<double>>& rows) {
  std::vector<double> out(rows.size());
  for_each_chunk(chunk_count(rows.size()), [&](std::size_t c) {
    const std::size_t end = std::min(rows.size(), (c + 1) * kChunkSize);
    for (std::size_t i = c * kChunkSize; i < end; ++i)
      out[i] = std::abs(f(std::span<const double>(rows[i])));
  });
  return out;
}

}  // namespace detail

struct McSummary {
  std::size_t sample_count = 0;
  double mean = 0.0;
  double std = 0.0;
  double failure_probability = 0.0;
  double alpha = 0.1;
};

/// Mean and unbiased standard deviation of |f| under the input law, plus
/// the fraction of samples with |f| >= 1 - alpha.
template <PointFunction F>
McSummary mc_moments(const F& f, std::span<const Distribution> dists, std::size_t n,
                     std::uint64_t seed, double alpha = 0.1) {
  if (n < 2) throw ContractError("Monte Carlo needs at least 2 samples");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ContractError("alpha must lie in (0, 1)");
  const auto v = detail::abs_values(f, sample_inputs(dists, n, seed));
  McSummary s;
  s.sample_count = n;
  s.alpha = alpha;
  double sum = 0.0;
  std::size_t fail = 0;
  for (double x : v) {
    sum += x;
    fail += x >= 1.0 - alpha;
  }
  s.mean = sum / static_cast<double>(n);
  double ss = 0.0;
  for (double x : v) ss += (x - s.mean) * (x - s.mean);
  s.std = std::sqrt(ss / static_cast<double>(n - 1));
  s.failure_probability = static_cast<double>(fail) / static_cast<double>(n);
  return s;
}

/// P(|f| >= 1 - alpha) by plain Monte Carlo.
template <PointFunction F>
double failure_probability(const F& f, std::span<const Distribution> dists, double alpha,
                           std::size_t n, std::uint64_t seed) {
  if (n < 1) throw ContractError("Monte Carlo needs at least 1 sample");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ContractError("alpha must lie in (0, 1)");
  const auto v = detail::abs_values(f, sample_inputs(dists, n, seed));
  std::size_t fail = 0;
  for (double x : v) fail += x >= 1.0 - alpha;
  return static_cast<double>(fail) / static_cast<double>(n);
}

/// Epanechnikov kernel density estimate at each query point.
inline std::vector<double> kde_pdf(std::span<const double> samples, double bandwidth,
                                   std::span<const double> query) {
  if (samples.empty()) throw ContractError("KDE needs at least one sample");
  if (!(bandwidth > 0.0)) throw ContractError("KDE bandwidth must be positive");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double scale = 1.0 / (bandwidth * static_cast<double>(sorted.size()));
  std::vector<double> out(query.size());
  for (std::size_t q = 0; q < query.size(); ++q) {
    const double t = query[q];
    auto lo = std::lower_bound(sorted.begin(), sorted.end(), t - bandwidth);
    auto hi = std::upper_bound(lo, sorted.end(), t + bandwidth);
    double acc = 0.0;
    for (auto it = lo; it != hi; ++it) {
      const double u = (t - *it) / bandwidth;
      if (u > -1.0 && u < 1.0) acc += 0.75 * (1.0 - u * u);
    }
    out[q] = acc * scale;
  }
  return out;
}

struct SobolResult {
  std::vector<double> main;
  std::vector<double> total;
  double mean = 0.0;
  double variance = 0.0;
  std::size_t evaluations = 0;
};

/// Saltelli paired-matrix scheme on a real-valued f: base matrices A, B and
/// the cross matrices A_B^(i), B_A^(i), i.e. 2 (N + 1) nBase evaluations.
/// Main effects use the Saltelli (2010) estimator, totals Jansen's; both
/// are averaged over the two pairings.
template <class F>
SobolResult sobol_indices(const F& f, std::span<const Distribution> dists, std::size_t n_base,
                          std::uint64_t seed) {
  if (n_base < 1) throw ContractError("Sobol estimation needs nBase >= 1");
  const std::size_t dim = dists.size();
  std::vector<Distribution> doubled(dists.begin(), dists.end());
  doubled.insert(doubled.end(), dists.begin(), dists.end());
  const auto ab = sample_inputs(doubled, n_base, seed);

  auto eval_all = [&](auto&& make_row) {
    std::vector<double> out(n_base);
    detail::for_each_chunk(detail::chunk_count(n_base), [&](std::size_t c) {
      const std::size_t end = std::min(n_base, (c + 1) * detail::kChunkSize);
      std::vector<double> row(dim);
      for (std::size_t k = c * detail::kChunkSize; k < end; ++k) {
        make_row(k, row);
        out[k] = static_cast<double>(f(std::span<const double>(row)));
      }
    });
    return out;
  };
  auto from = [&](std::size_t k, std::vector<double>& row, bool b_side, std::size_t swap) {
    for (std::size_t d = 0; d < dim; ++d) {
      const bool use_b = (d == swap) ? !b_side : b_side;
      row[d] = ab[k][use_b ? dim + d : d];
    }
  };
  const std::size_t none = dim;
  const auto fa = eval_all([&](std::size_t k, auto& r) { from(k, r, false, none); });
  const auto fb = eval_all([&](std::size_t k, auto& r) { from(k, r, true, none); });

  SobolResult res;
  res.main.assign(dim, 0.0);
  res.total.assign(dim, 0.0);
  res.evaluations = 2 * n_base;
  double sum = 0.0;
  for (std::size_t k = 0; k < n_base; ++k) sum += fa[k] + fb[k];
  res.mean = sum / (2.0 * static_cast<double>(n_base));
  double ss = 0.0;
  for (std::size_t k = 0; k < n_base; ++k)
    ss += (fa[k] - res.mean) * (fa[k] - res.mean) + (fb[k] - res.mean) * (fb[k] - res.mean);
  res.variance = ss / (2.0 * static_cast<double>(n_base) - 1.0);
  const bool degenerate = res.variance < 1e-14 * (res.mean * res.mean + 1.0);

  for (std::size_t i = 0; i < dim; ++i) {
    const auto fab = eval_all([&](std::size_t k, auto& r) { from(k, r, false, i); });
    const auto fba = eval_all([&](std::size_t k, auto& r) { from(k, r, true, i); });
    res.evaluations += 2 * n_base;
    if (degenerate) continue;
    double m = 0.0, t = 0.0;
    for (std::size_t k = 0; k < n_base; ++k) {
      m += fb[k] * (fab[k] - fa[k]) + fa[k] * (fba[k] - fb[k]);
      t += (fa[k] - fab[k]) * (fa[k] - fab[k]) + (fb[k] - fba[k]) * (fb[k] - fba[k]);
    }
    const double nb = static_cast<double>(n_base);
    res.main[i] = m / (2.0 * nb) / res.variance;
    res.total[i] = t / (4.0 * nb) / res.variance;
  }
  return res;
}

struct Resonance {
  double frequency;
  double modulus;
};

/// Minimizes |f(w, rest...)| over w in [lo, hi]: bounded Brent searches on
/// subintervals around n_starts equally spaced starts (endpoints included);
/// the endpoints themselves are also candidates.
template <PointFunction F>
Resonance extract_resonance(const F& f, std::span<const double> rest, double lo, double hi,
                            int n_starts = 3) {
  if (!(hi > lo)) throw ContractError("resonance range must satisfy hi > lo");
  if (n_starts < 1) throw ContractError("need at least one start");
  std::vector<double> point(rest.size() + 1);
  std::copy(rest.begin(), rest.end(), point.begin() + 1);
  auto objective = [&](double w) {
    point[0] = std::clamp(w, lo, hi);
    return static_cast<double>(std::abs(f(std::span<const double>(point))));
  };
  const double range = hi - lo;
  Resonance best{lo, objective(lo)};
  auto consider = [&](double w, double v) {
    if (v < best.modulus) best = {w, v};
  };
  consider(hi, objective(hi));
  const double spacing = n_starts > 1 ? range / (n_starts - 1) : range;
  for (int s = 0; s < n_starts; ++s) {
    const double start = n_starts > 1 ? lo + s * spacing : 0.5 * (lo + hi);
    const double a = std::max(lo, start - 0.5 * spacing);
    const double b = std::min(hi, start + 0.5 * spacing);
    if (!(b > a)) continue;
    const auto r = detail::brent_minimize(objective, a, b, 1e-9 * range);
    consider(r.x, r.value);
  }
  return best;
}

struct CvErrors {
  double mean_l1;
  double max_err;
};

/// Mean and maximum |reference - surrogate| over n samples of the input law.
template <PointFunction S, PointFunction M>
CvErrors cv_errors(const S& surrogate, const M& reference, std::span<const Distribution> dists,
                   std::size_t n, std::uint64_t seed) {
  if (n < 1) throw ContractError("cross-validation needs at least one sample");
  const auto rows = sample_inputs(dists, n, seed);
  std::vector<double> err(n);
  detail::for_each_chunk(n, [&](std::size_t i) {
    const std::span<const double> y(rows[i]);
    err[i] = std::abs(Complex(reference(y)) - Complex(surrogate(y)));
  });
  CvErrors out{0.0, 0.0};
  for (double e : err) {
    out.mean_l1 += e;
    out.max_err = std::max(out.max_err, e);
  }
  out.mean_l1 /= static_cast<double>(n);
  return out;
}

}  // namespace mapleja
