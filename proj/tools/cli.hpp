#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <Eigen/Core>

#include "mapleja/mapleja.hpp"

namespace mapleja::cli {

inline constexpr const char* kVersion = "0.1.0";

inline const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names{"build", "converge", "stats", "sobol",
                                              "kde",   "resonance", "gain"};
  return names;
}

inline std::string usage() {
  return "usage: mapleja <command> --config PATH [--out DIR] [--seed U64] [--threads N]\n"
         "commands:\n"
         "  build      build a surrogate (surrogate.json, report.csv)\n"
         "  converge   sweep the budget and record cross-validation errors (converge.csv)\n"
         "  stats      Monte Carlo mean, std and failure probability of |S| (moments.csv)\n"
         "  sobol      main and total Sobol indices of |S| (sobol.csv)\n"
         "  kde        kernel density estimate of |S| (kde.csv)\n"
         "  resonance  per-sample resonance frequency and depth (resonance.csv)\n"
         "  gain       convergence gain of conformal maps over eps (gain.csv)\n";
}

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

/// Everything a command needs: the model, the input laws and the maps.
struct Study {
  Json config;
  std::string model_name;
  std::shared_ptr<const ParametricLinearModel> linear;
  ScalarModel model;
  std::vector<Distribution> dists;
  std::vector<ConformalMap> maps;
  std::uint64_t seed = 0;
  std::filesystem::path out_dir;
  bool frequency_first = false;
};

namespace detail {

using mapleja::detail::fmt17;

template <class T>
T get_or(const Json& j, const std::string& key, T fallback, const std::string& where = "") {
  if (!j.contains(key)) return fallback;
  return mapleja::detail::field<T>(j, key, where);
}

inline Json block(const Json& cfg, const std::string& key) {
  if (!cfg.contains(key)) return Json::object();
  if (!cfg[key].is_object()) throw ParseError("/" + key, "expected an object");
  return cfg[key];
}

inline double runge(std::span<const double> y, double c) {
  double v = 1.0;
  for (double x : y) v /= 1.0 + c * x * x;
  return v;
}

}  // namespace detail

/// Validates the configuration and builds the study. Throws ParseError
/// (exit code 2) on any inconsistency.
inline Study make_study(const Json& cfg) {
  if (!cfg.is_object()) throw ParseError("/", "config must be a JSON object");
  Study s;
  s.config = cfg;
  s.model_name = detail::get_or<std::string>(cfg, "model", "ladder");
  s.seed = detail::get_or<std::uint64_t>(cfg, "seed", 1);
  s.out_dir = detail::get_or<std::string>(cfg, "output", "out");

  std::size_t dim = 0;
  if (s.model_name == "ladder") {
    LadderConfig lc;
    lc.sections = detail::get_or<std::size_t>(cfg, "sections", lc.sections);
    lc.damping = detail::get_or<double>(cfg, "damping", lc.damping);
    lc.n_params = detail::get_or<std::size_t>(cfg, "n_params", lc.n_params);
    lc.with_frequency = detail::get_or<bool>(cfg, "with_frequency", lc.with_frequency);
    lc.frequency = detail::get_or<double>(cfg, "frequency", lc.frequency);
    if (lc.sections < 2) throw ParseError("/sections", "need at least 2 sections");
    if (lc.n_params > lc.sections) throw ParseError("/n_params", "exceeds the number of sections");
    if (!(lc.damping >= 0.0)) throw ParseError("/damping", "must be non-negative");
    auto ladder = std::make_shared<LadderModel>(lc);
    if (ladder->parameter_count() == 0) throw ParseError("/n_params", "model has no parameters");
    s.linear = ladder;
    s.model = qoi_model(ladder);
    s.dists = ladder->distributions();
    s.frequency_first = lc.with_frequency;
    dim = ladder->parameter_count();
  } else if (s.model_name == "runge") {
    const double c = detail::get_or<double>(cfg, "c", 10.0);
    if (!(c > 0.0)) throw ParseError("/c", "must be positive");
    dim = detail::get_or<std::size_t>(cfg, "dimension", 1);
    if (dim == 0) throw ParseError("/dimension", "must be positive");
    s.model = [c](std::span<const double> y) { return Complex(detail::runge(y, c)); };
    s.dists.assign(dim, Distribution::uniform(-1.0, 1.0));
  } else {
    throw ParseError("/model", "unknown model '" + s.model_name + "'");
  }

  if (cfg.contains("distributions")) {
    const auto& jd = cfg["distributions"];
    if (!jd.is_array()) throw ParseError("/distributions", "expected an array");
    if (jd.size() != dim)
      throw ParseError("/distributions", "has " + std::to_string(jd.size()) +
                                             " entries but the model has " + std::to_string(dim) +
                                             " parameters");
    s.dists.clear();
    for (std::size_t n = 0; n < dim; ++n)
      s.dists.push_back(distribution_from_json(jd[n], "/distributions/" + std::to_string(n)));
  }
  if (cfg.contains("maps")) {
    const auto& jm = cfg["maps"];
    if (!jm.is_array()) throw ParseError("/maps", "expected an array");
    if (jm.size() != dim)
      throw ParseError("/maps", "has " + std::to_string(jm.size()) + " entries but the model has " +
                                    std::to_string(dim) + " parameters");
    for (std::size_t n = 0; n < dim; ++n)
      s.maps.push_back(map_from_json(jm[n], "/maps/" + std::to_string(n)));
  } else {
    s.maps.assign(dim, ConformalMap::sausage(9));
  }

  const auto algo = detail::get_or<std::string>(cfg, "algorithm", "adaptive");
  if (algo != "adaptive" && algo != "adaptive-adjoint" && algo != "gpc" &&
      algo != "isotropic-smolyak")
    throw ParseError("/algorithm", "unknown algorithm '" + algo + "'");
  if (algo == "adaptive-adjoint" && !s.linear)
    throw ParseError("/algorithm", "adaptive-adjoint needs a linear model");
  if (detail::get_or<std::int64_t>(cfg, "budget", 100) < 1)
    throw ParseError("/budget", "must be at least 1");
  return s;
}

/// A built approximation, seen as a point function.
struct Approximation {
  std::function<Complex(std::span<const double>)> evaluate;
  Json serialized;
  std::optional<AdaptiveReport> report;
  std::optional<std::vector<DecayEntry>> decay;
  std::size_t nodes = 0;
  std::size_t lu_count = 0;
  std::size_t fb_count = 0;
  std::size_t res_count = 0;
};

inline Approximation wrap(Surrogate sur) {
  Approximation a;
  a.serialized = to_json(sur);
  a.nodes = sur.size();
  auto p = std::make_shared<Surrogate>(std::move(sur));
  a.evaluate = [p](std::span<const double> y) { return p->evaluate(y); };
  return a;
}

inline Approximation wrap(GpcExpansion exp) {
  Approximation a;
  a.serialized = to_json(exp);
  a.decay = decay_report(exp);
  a.nodes = exp.coefficients().size();
  auto p = std::make_shared<GpcExpansion>(std::move(exp));
  a.evaluate = [p](std::span<const double> y) { return p->evaluate(y); };
  return a;
}

/// Builds with the configured algorithm; `budget` overrides the config's
/// budget (or level / p_max for the non-adaptive algorithms).
inline Approximation build(const Study& s, std::optional<std::size_t> budget = {}) {
  const auto& cfg = s.config;
  const auto algo = detail::get_or<std::string>(cfg, "algorithm", "adaptive");
  const auto tol = cfg.contains("tolerance")
                       ? std::optional<double>(mapleja::detail::field<double>(cfg, "tolerance", ""))
                       : std::nullopt;
  if (algo == "adaptive") {
    AdaptiveConfig ac{budget.value_or(detail::get_or<std::size_t>(cfg, "budget", 100)),
                      IndicatorKind::SurplusModulus, tol};
    auto r = run_adaptive(s.model, ac, s.dists, s.maps);
    auto a = wrap(std::move(r.surrogate));
    a.lu_count = r.report.lu_count;
    a.fb_count = r.report.fb_count;
    a.report = std::move(r.report);
    return a;
  }
  if (algo == "adaptive-adjoint") {
    AdaptiveConfig ac{budget.value_or(detail::get_or<std::size_t>(cfg, "budget", 100)),
                      IndicatorKind::AdjointResidual, tol};
    auto r = run_adaptive_adjoint(*s.linear, ac, s.dists, s.maps);
    auto a = wrap(std::move(r.qoi));
    a.lu_count = r.report.lu_count;
    a.fb_count = r.report.fb_count;
    a.res_count = r.report.res_count;
    a.report = std::move(r.report);
    return a;
  }
  if (algo == "isotropic-smolyak") {
    const auto level =
        static_cast<unsigned>(budget.value_or(detail::get_or<unsigned>(cfg, "level", 3)));
    auto r = build_isotropic(s.model, s.dists, s.maps, level);
    auto a = wrap(std::move(r.surrogate));
    a.lu_count = a.fb_count = a.nodes;
    return a;
  }
  const auto p_max =
      static_cast<unsigned>(budget.value_or(detail::get_or<unsigned>(cfg, "p_max", 4)));
  const auto quad_name = detail::get_or<std::string>(cfg, "quadrature", "smolyak");
  if (quad_name != "smolyak" && quad_name != "tensor")
    throw ParseError("/quadrature", "expected 'smolyak' or 'tensor'");
  const auto quad = quad_name == "tensor" ? GpcQuadrature::Tensor : GpcQuadrature::SmolyakGauss;
  const auto evaluations = projection_rule(s.dists, p_max, quad).points.size();
  auto a = wrap(project(s.model, s.dists, p_max, quad));
  a.nodes = a.lu_count = a.fb_count = evaluations;
  return a;
}

/// Uses the "surrogate" file named in the config if present, else builds.
inline Approximation obtain(const Study& s) {
  if (!s.config.contains("surrogate")) return build(s);
  const auto path = mapleja::detail::field<std::string>(s.config, "surrogate", "");
  std::ifstream in(path);
  if (!in) throw ParseError("/surrogate", "cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  const auto j = parse_json(buf.str());
  Approximation a = j.contains("gpc") ? wrap(gpc_from_json(j)) : wrap(surrogate_from_json(j));
  if (mapleja::detail::field<std::size_t>(j, "N", "") != s.dists.size())
    throw ParseError("/surrogate", "surrogate dimension differs from the model");
  return a;
}

inline CvErrors cross_validate(const Study& s, const Approximation& a) {
  const auto cv = detail::block(s.config, "cv");
  const auto n = detail::get_or<std::size_t>(cv, "size", 1000, "/cv");
  const auto seed = detail::get_or<std::uint64_t>(cv, "seed", s.seed + 1, "/cv");
  if (n == 0) throw ParseError("/cv/size", "must be positive");
  return cv_errors(a.evaluate, s.model, s.dists, n, seed);
}

class Runner {
 public:
  Runner(Study study, std::ostream& out) : s_(std::move(study)), out_(out) {}

  void write(const std::string& name, const std::string& content) {
    std::filesystem::create_directories(s_.out_dir);
    std::ofstream f(s_.out_dir / name, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + (s_.out_dir / name).string());
    f << content;
    outputs_.push_back(name);
    out_ << "wrote " << (s_.out_dir / name).string() << '\n';
  }

  void manifest(const std::string& command, const Json& results) {
    Json m;
    m["command"] = command;
    m["config"] = s_.config;
    m["config_hash"] = [&] {
      char buf[20];
      std::snprintf(buf, sizeof buf, "%016llx",
                    static_cast<unsigned long long>(fnv1a(s_.config.dump())));
      return std::string(buf);
    }();
    m["seed"] = s_.seed;
    m["versions"] = {{"mapleja", kVersion},
                     {"format", kFormatVersion},
                     {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." +
                                   std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                   std::to_string(EIGEN_MINOR_VERSION)}};
    m["results"] = results;
    auto files = outputs_;
    files.push_back("manifest.json");
    m["outputs"] = files;
    write("manifest.json", m.dump(2) + "\n");
  }

  int build_cmd() {
    auto a = build(s_);
    write("surrogate.json", a.serialized.dump() + "\n");
    Json results{{"nodes", a.nodes}, {"lu_count", a.lu_count}, {"fb_count", a.fb_count},
                 {"res_count", a.res_count}};
    if (a.report) {
      std::ostringstream csv;
      a.report->write_csv(csv);
      write("report.csv", csv.str());
    }
    if (a.decay) {
      std::ostringstream csv;
      csv << "total_degree,max_abs_coeff\n";
      for (const auto& e : *a.decay) csv << e.total_degree << ',' << detail::fmt17(e.max_abs_coeff) << '\n';
      write("decay.csv", csv.str());
    }
    if (s_.config.contains("cv")) {
      const auto e = cross_validate(s_, a);
      results["cv_mean_l1"] = e.mean_l1;
      results["cv_max_err"] = e.max_err;
    }
    manifest("build", results);
    return 0;
  }

  int converge_cmd() {
    const auto algo = detail::get_or<std::string>(s_.config, "algorithm", "adaptive");
    std::vector<std::size_t> sweep;
    if (s_.config.contains("budgets")) {
      sweep = mapleja::detail::field<std::vector<std::size_t>>(s_.config, "budgets", "");
    } else if (algo == "adaptive" || algo == "adaptive-adjoint") {
      const auto b = detail::get_or<std::size_t>(s_.config, "budget", 100);
      for (std::size_t k = 5; k < b; k *= 2) sweep.push_back(k);
      sweep.push_back(b);
    } else {
      const auto top = algo == "gpc" ? detail::get_or<std::size_t>(s_.config, "p_max", 4)
                                     : detail::get_or<std::size_t>(s_.config, "level", 3);
      for (std::size_t k = 0; k <= top; ++k) sweep.push_back(k);
    }
    if (sweep.empty()) throw ParseError("/budgets", "empty sweep");
    std::ostringstream csv;
    csv << "nodes,mean_l1,max_err,lu_count,fb_count,res_count\n";
    for (auto b : sweep) {
      if (b == 0 && (algo == "adaptive" || algo == "adaptive-adjoint"))
        throw ParseError("/budgets", "budgets must be positive");
      const auto a = build(s_, b);
      const auto e = cross_validate(s_, a);
      csv << a.nodes << ',' << detail::fmt17(e.mean_l1) << ',' << detail::fmt17(e.max_err) << ',' << a.lu_count
          << ',' << a.fb_count << ',' << a.res_count << '\n';
    }
    write("converge.csv", csv.str());
    manifest("converge", {{"points", sweep.size()}});
    return 0;
  }

  int stats_cmd() {
    const auto a = obtain(s_);
    const auto mc = detail::block(s_.config, "mc");
    const auto n = detail::get_or<std::size_t>(mc, "samples", 100000, "/mc");
    const auto alpha = detail::get_or<double>(mc, "alpha", 0.1, "/mc");
    if (n < 2) throw ParseError("/mc/samples", "need at least 2 samples");
    if (!(alpha > 0.0 && alpha < 1.0)) throw ParseError("/mc/alpha", "must lie in (0, 1)");
    const auto m = mc_moments(a.evaluate, s_.dists, n, s_.seed, alpha);
    std::ostringstream csv;
    csv << "sample_count,mean,std,failure_probability,alpha\n"
        << m.sample_count << ',' << detail::fmt17(m.mean) << ',' << detail::fmt17(m.std) << ','
        << detail::fmt17(m.failure_probability) << ',' << detail::fmt17(m.alpha) << '\n';
    write("moments.csv", csv.str());
    manifest("stats", {{"mean", m.mean}, {"std", m.std}, {"failure_probability", m.failure_probability}});
    return 0;
  }

  int sobol_cmd() {
    const auto a = obtain(s_);
    const auto sb = detail::block(s_.config, "sobol");
    const auto n = detail::get_or<std::size_t>(sb, "n_base", 10000, "/sobol");
    if (n < 1) throw ParseError("/sobol/n_base", "must be positive");
    auto modulus = [&](std::span<const double> y) { return std::abs(a.evaluate(y)); };
    const auto r = sobol_indices(modulus, s_.dists, n, s_.seed);
    std::ostringstream csv;
    csv << "parameter,main,total\n";
    for (std::size_t i = 0; i < r.main.size(); ++i)
      csv << i << ',' << detail::fmt17(r.main[i]) << ',' << detail::fmt17(r.total[i]) << '\n';
    write("sobol.csv", csv.str());
    manifest("sobol", {{"evaluations", r.evaluations}, {"variance", r.variance}});
    return 0;
  }

  int kde_cmd() {
    const auto a = obtain(s_);
    const auto kb = detail::block(s_.config, "kde");
    const auto n = detail::get_or<std::size_t>(kb, "samples", 100000, "/kde");
    const auto points = detail::get_or<std::size_t>(kb, "points", 200, "/kde");
    if (n < 2) throw ParseError("/kde/samples", "need at least 2 samples");
    if (points < 2) throw ParseError("/kde/points", "need at least 2 points");
    const auto rows = sample_inputs(s_.dists, n, s_.seed);
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = std::abs(a.evaluate(rows[i]));
    double mean = 0.0, ss = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(n);
    for (double x : v) ss += (x - mean) * (x - mean);
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    // Epanechnikov rule of thumb.
    double h = 2.345 * sd * std::pow(static_cast<double>(n), -0.2);
    if (kb.contains("bandwidth")) h = mapleja::detail::field<double>(kb, "bandwidth", "/kde");
    if (!(h > 0.0)) h = 1e-6 * std::max(1.0, mean);
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    std::vector<double> grid(points);
    for (std::size_t k = 0; k < points; ++k)
      grid[k] = (*lo - h) + (*hi - *lo + 2.0 * h) * static_cast<double>(k) / static_cast<double>(points - 1);
    const auto dens = kde_pdf(v, h, grid);
    std::ostringstream csv;
    csv << "T,density\n";
    for (std::size_t k = 0; k < points; ++k) csv << detail::fmt17(grid[k]) << ',' << detail::fmt17(dens[k]) << '\n';
    write("kde.csv", csv.str());
    manifest("kde", {{"bandwidth", h}});
    return 0;
  }

  int resonance_cmd() {
    if (!s_.frequency_first)
      throw ParseError("/with_frequency", "resonance extraction needs the frequency as parameter 0");
    const auto a = obtain(s_);
    const auto rb = detail::block(s_.config, "resonance");
    const auto n = detail::get_or<std::size_t>(rb, "samples", 1000, "/resonance");
    const auto starts = detail::get_or<int>(rb, "starts", 3, "/resonance");
    const auto threshold = detail::get_or<double>(rb, "threshold", 0.7, "/resonance");
    auto range = detail::get_or<std::vector<double>>(
        rb, "range", {s_.dists[0].lower(), s_.dists[0].upper()}, "/resonance");
    if (range.size() != 2 || !(range[1] > range[0]) || range[0] < s_.dists[0].lower() ||
        range[1] > s_.dists[0].upper())
      throw ParseError("/resonance/range", "must be [lo, hi] inside the frequency support");
    if (n < 1) throw ParseError("/resonance/samples", "must be positive");
    if (starts < 1) throw ParseError("/resonance/starts", "must be positive");
    const std::vector<Distribution> rest(s_.dists.begin() + 1, s_.dists.end());
    const auto rows = rest.empty() ? std::vector<std::vector<double>>(n)
                                   : sample_inputs(rest, n, s_.seed);
    std::vector<Resonance> res(n);
    mapleja::detail::for_each_chunk(n, [&](std::size_t i) {
      res[i] = extract_resonance(a.evaluate, rows[i], range[0], range[1], starts);
    });
    std::ostringstream csv;
    csv << "sample,f_res,s_res\n";
    double mf = 0.0, ms = 0.0;
    std::size_t fail = 0;
    for (std::size_t i = 0; i < n; ++i) {
      csv << i << ',' << detail::fmt17(res[i].frequency) << ',' << detail::fmt17(res[i].modulus) << '\n';
      mf += res[i].frequency;
      ms += res[i].modulus;
      fail += res[i].modulus >= threshold;
    }
    mf /= static_cast<double>(n);
    ms /= static_cast<double>(n);
    double vf = 0.0, vs = 0.0;
    for (const auto& r : res) {
      vf += (r.frequency - mf) * (r.frequency - mf);
      vs += (r.modulus - ms) * (r.modulus - ms);
    }
    const double denom = n > 1 ? static_cast<double>(n - 1) : 1.0;
    write("resonance.csv", csv.str());
    manifest("resonance", {{"f_res_mean", mf},
                           {"f_res_std", std::sqrt(vf / denom)},
                           {"s_res_mean", ms},
                           {"s_res_std", std::sqrt(vs / denom)},
                           {"failure_probability", static_cast<double>(fail) / static_cast<double>(n)}});
    return 0;
  }

  int gain_cmd() {
    const auto gb = detail::block(s_.config, "gain");
    std::vector<ConformalMap> maps;
    if (gb.contains("maps")) {
      const auto& jm = gb["maps"];
      if (!jm.is_array() || jm.empty()) throw ParseError("/gain/maps", "expected a non-empty array");
      for (std::size_t k = 0; k < jm.size(); ++k)
        maps.push_back(map_from_json(jm[k], "/gain/maps/" + std::to_string(k)));
    } else {
      maps.push_back(ConformalMap::sausage(9));
    }
    std::vector<double> eps;
    if (gb.contains("eps")) {
      eps = mapleja::detail::field<std::vector<double>>(gb, "eps", "/gain");
    } else {
      const double lo = detail::get_or<double>(gb, "eps_min", 0.05, "/gain");
      const double hi = detail::get_or<double>(gb, "eps_max", 2.0, "/gain");
      const auto pts = detail::get_or<std::size_t>(gb, "points", 20, "/gain");
      if (pts < 2 || !(hi > lo)) throw ParseError("/gain", "need points >= 2 and eps_max > eps_min");
      for (std::size_t k = 0; k < pts; ++k)
        eps.push_back(lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(pts - 1));
    }
    for (std::size_t k = 0; k < eps.size(); ++k)
      if (!(eps[k] > 0.0)) throw ParseError("/gain/eps/" + std::to_string(k), "must be positive");
    const auto samples = detail::get_or<int>(gb, "samples", 4096, "/gain");
    if (samples < 16) throw ParseError("/gain/samples", "need at least 16");
    std::ostringstream csv;
    csv << "map,order,alpha,eps,gain\n";
    for (const auto& g : maps)
      for (double e : eps)
        csv << to_string(g.kind()) << ',' << g.order() << ',' << detail::fmt17(g.alpha()) << ','
            << detail::fmt17(e) << ',' << detail::fmt17(estimate_gain(g, e, samples)) << '\n';
    write("gain.csv", csv.str());
    manifest("gain", Json::object());
    return 0;
  }

 private:
  Study s_;
  std::ostream& out_;
  std::vector<std::string> outputs_;
};

/// Entry point shared by the executable and the tests. `args` excludes the
/// program name.
inline int run_command(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  if (args.empty() || std::find(subcommands().begin(), subcommands().end(), args[0]) ==
                          subcommands().end()) {
    if (!args.empty() && (args[0] == "--help" || args[0] == "-h")) {
      out << usage();
      return 0;
    }
    err << (args.empty() ? "missing command\n" : "unknown command '" + args[0] + "'\n") << usage();
    return 64;
  }
  const std::string command = args[0];

  CLI::App app("mapleja " + command);
  std::string config_path, out_dir;
  std::optional<std::uint64_t> seed;
  unsigned threads = 0;
  app.add_option("--config", config_path, "study configuration (JSON)");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--seed", seed, "random seed");
  app.add_option("--threads", threads, "worker thread cap");
  std::vector<std::string> rest(args.rbegin(), args.rend() - 1);
  try {
    app.parse(rest);
  } catch (const CLI::CallForHelp&) {
    out << app.help() << usage();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n' << usage();
    return 64;
  }
  if (threads > 0) set_thread_limit(threads);

  try {
    Json cfg = Json::object();
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw ParseError(config_path, "cannot open config file");
      std::stringstream buf;
      buf << in.rdbuf();
      cfg = parse_json(buf.str());
      // A manifest carries its effective config; re-running it reproduces the run.
      if (cfg.is_object() && cfg.contains("config") && cfg.contains("config_hash"))
        cfg = Json(cfg["config"]);
    } else if (command != "gain") {
      throw ParseError("--config", "a study config is required for '" + command + "'");
    }
    if (!cfg.is_object()) throw ParseError("/", "config must be a JSON object");
    if (seed) cfg["seed"] = *seed;
    if (!out_dir.empty()) cfg["output"] = out_dir;
    if (!cfg.contains("seed")) cfg["seed"] = 1;
    if (!cfg.contains("output")) cfg["output"] = "out";
    Runner runner(make_study(cfg), out);
    if (command == "build") return runner.build_cmd();
    if (command == "converge") return runner.converge_cmd();
    if (command == "stats") return runner.stats_cmd();
    if (command == "sobol") return runner.sobol_cmd();
    if (command == "kde") return runner.kde_cmd();
    if (command == "resonance") return runner.resonance_cmd();
    return runner.gain_cmd();
  } catch (const ParseError& e) {
    err << "config error: " << e.what() << '\n';
    return 2;
  } catch (const ContractError& e) {
    err << "config error: " << e.what() << '\n';
    return 2;
  } catch (const SolveError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return 1;
  } catch (const ModelEvaluationError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "failure: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace mapleja::cli
