#include <gtest/gtest.h>

#include <cmath>
#include <memory>
#include <sstream>

#include "mapleja/adaptive.hpp"
#include "mapleja/stats.hpp"
#include "oracles.hpp"

using namespace mapleja;

namespace {

std::vector<Distribution> uniform_box(std::size_t n) { return {n, Distribution::uniform(-1, 1)}; }
std::vector<ConformalMap> maps_of(std::size_t n, ConformalMap g) { return {n, g}; }

AdaptiveConfig surplus(std::size_t budget) { return {budget, IndicatorKind::SurplusModulus, {}}; }
AdaptiveConfig adjoint(std::size_t budget) { return {budget, IndicatorKind::AdjointResidual, {}}; }

double cv_mean(const Surrogate& s, const ScalarModel& ref, std::size_t n = 1000) {
  auto sur = [&](std::span<const double> y) { return s.evaluate(y); };
  return cv_errors(sur, ref, s.distributions(), n, 99).mean_l1;
}

// A(y) fixed, so the interpolants are exact after the root.
class ConstantSystem final : public ParametricLinearModel {
 public:
  std::string name() const override { return "constant"; }
  std::size_t parameter_count() const override { return 2; }
  std::size_t size() const override { return 2; }
  std::vector<Distribution> distributions() const override { return uniform_box(2); }
  LinearSystem assemble(std::span<const double>) const override {
    LinearSystem s;
    s.matrix = CMatrix(2, 2);
    s.matrix << Complex(2, 1), 1.0, 0.5, Complex(3, -1);
    s.rhs = CVector(2);
    s.rhs << 1.0, Complex(0, 1);
    s.functional = CVector(2);
    s.functional << 0.0, 1.0;
    return s;
  }
};

}  // namespace

TEST(Adaptive, ConstantModel) {
  const ScalarModel f = [](std::span<const double>) { return Complex(2.5, -1); };
  const auto r = run_adaptive(f, surplus(10), uniform_box(2), maps_of(2, ConformalMap::sausage(9)));
  for (const auto& it : r.report.iterations) EXPECT_EQ(it.indicator, 0.0);
  EXPECT_LE(r.report.final_nodes, 10u + 1u);
  EXPECT_EQ(r.report.lu_count, r.report.final_nodes);
  EXPECT_EQ(r.surrogate.size(), r.report.final_nodes);
  for (double a : {-0.8, 0.0, 0.6})
    for (double b : {-1.0, 0.3})
      EXPECT_NEAR(std::abs(r.surrogate.evaluate(std::vector<double>{a, b}) - Complex(2.5, -1)), 0.0, 1e-13);
}

TEST(Adaptive, RefinesOnlyActiveDimension) {
  const ScalarModel f = [](std::span<const double> y) { return Complex(y[0]); };
  const auto r = run_adaptive(f, surplus(10), uniform_box(2), maps_of(2, ConformalMap::identity()));
  for (const auto& idx : r.surrogate.indices())
    if (idx[0] == 0 && idx[1] >= 1) EXPECT_EQ(std::abs(r.surrogate.surplus(idx)[0]), 0.0) << idx.str();
  for (const auto& it : r.report.iterations)
    if (it.indicator > 0.0) EXPECT_EQ(it.chosen[1], 0u);
}

TEST(Adaptive, TieBreakPicksLexicographicallyGreatest) {
  const ScalarModel f = [](std::span<const double>) { return Complex(1.0); };
  const auto r = run_adaptive(f, surplus(4), uniform_box(2), maps_of(2, ConformalMap::identity()));
  ASSERT_FALSE(r.report.iterations.empty());
  EXPECT_EQ(r.report.iterations[0].chosen, (MultiIndex{1, 0}));
}

TEST(Adaptive, BeatsIsotropicOnRungeProduct) {
  const ScalarModel f = [](std::span<const double> y) {
    return Complex(oracle::runge(y[0]) * oracle::runge(y[1]));
  };
  const auto iso = build_isotropic(f, uniform_box(2), maps_of(2, ConformalMap::identity()), 12);
  const auto ada = run_adaptive(f, surplus(iso.report.final_nodes), uniform_box(2),
                                maps_of(2, ConformalMap::identity()));
  EXPECT_LE(ada.report.final_nodes, iso.report.final_nodes + 1);
  EXPECT_LT(cv_mean(ada.surrogate, f), cv_mean(iso.surrogate, f));
}

TEST(Adaptive, ToleranceStopsEarly) {
  const ScalarModel f = [](std::span<const double> y) { return Complex(1.0 + y[0] + y[1]); };
  auto cfg = surplus(1000);
  cfg.tolerance = 1e-12;
  const auto r = run_adaptive(f, cfg, uniform_box(2), maps_of(2, ConformalMap::identity()));
  EXPECT_LT(r.report.final_nodes, 20u);
  EXPECT_NEAR(std::abs(r.surrogate.evaluate(std::vector<double>{0.3, -0.4}) - 0.9), 0.0, 1e-13);
}

TEST(Adaptive, ModelFailureNamesNode) {
  const ScalarModel f = [](std::span<const double> y) -> Complex {
    if (y[0] > 0.5) throw std::runtime_error("boom");
    return 1.0;
  };
  try {
    run_adaptive(f, surplus(20), uniform_box(1), maps_of(1, ConformalMap::identity()));
    FAIL();
  } catch (const ModelEvaluationError& e) {
    EXPECT_EQ(e.node(), std::vector<double>{1.0});
  }
}

TEST(Adaptive, Deterministic) {
  const ScalarModel f = [](std::span<const double> y) {
    return Complex(std::exp(y[0] * y[1]), 1.0 / (2.0 + y[2]));
  };
  const auto a = run_adaptive(f, surplus(80), uniform_box(3), maps_of(3, ConformalMap::sausage(9)));
  const auto b = run_adaptive(f, surplus(80), uniform_box(3), maps_of(3, ConformalMap::sausage(9)));
  EXPECT_EQ(a.surrogate.indices(), b.surrogate.indices());
  std::ostringstream ca, cb;
  a.report.write_csv(ca);
  b.report.write_csv(cb);
  EXPECT_EQ(ca.str(), cb.str());
  EXPECT_EQ(ca.str().substr(0, ca.str().find('\n')),
            "iteration,chosen_index,indicator,lu_count,fb_count,res_count,cv_error");
}

TEST(Adaptive, FinalSetIsDownwardClosed) {
  const ScalarModel f = [](std::span<const double> y) { return Complex(1.0 / (1.2 + y[0] + 0.3 * y[2])); };
  const auto r = run_adaptive(f, surplus(60), uniform_box(3), maps_of(3, ConformalMap::identity()));
  EXPECT_TRUE(is_downward_closed(r.surrogate.index_set()));
}

TEST(Adjoint, ConstantSystem) {
  ConstantSystem m;
  auto cfg = adjoint(50);
  const auto plain = run_adaptive_adjoint(m, cfg, uniform_box(2), maps_of(2, ConformalMap::identity()));
  for (const auto& it : plain.report.iterations) EXPECT_NEAR(it.indicator, 0.0, 1e-15);
  cfg.tolerance = 1e-12;
  const auto r = run_adaptive_adjoint(m, cfg, uniform_box(2), maps_of(2, ConformalMap::identity()));
  EXPECT_EQ(r.report.lu_count, 1u);
  EXPECT_EQ(r.report.res_count, 2u);
  EXPECT_EQ(r.report.fb_count, 2u);
  const auto sys = m.assemble({});
  const Complex exact = qoi(sys, sys.matrix.lu().solve(sys.rhs));
  EXPECT_NEAR(std::abs(r.qoi.evaluate(std::vector<double>{0.4, -0.9}) - exact), 0.0, 1e-14);
}

TEST(Adjoint, LadderAccounting) {
  auto m = std::make_shared<LadderModel>(LadderConfig{.n_params = 2});
  const auto r = run_adaptive_adjoint(*m, adjoint(60), m->distributions(),
                                      maps_of(2, ConformalMap::sausage(9)));
  EXPECT_LT(r.report.lu_count, r.report.res_count);
  EXPECT_LE(r.report.lu_count, 60u);
  EXPECT_EQ(r.report.fb_count, 2 * r.report.accepted);
  EXPECT_EQ(r.report.lu_count, r.report.accepted);
  EXPECT_EQ(r.qoi_core.index_set(), r.primal.index_set());
  EXPECT_EQ(r.qoi_core.index_set(), r.dual.index_set());
  EXPECT_TRUE(is_downward_closed(r.qoi.index_set()));
  for (std::size_t i = 1; i < r.report.iterations.size(); ++i) {
    EXPECT_GE(r.report.iterations[i].lu_count, r.report.iterations[i - 1].lu_count);
    EXPECT_GE(r.report.iterations[i].res_count, r.report.iterations[i - 1].res_count);
  }
}

TEST(Adjoint, ComparableToSurplusDrivenAtEqualCost) {
  auto m = std::make_shared<LadderModel>(LadderConfig{.n_params = 2});
  const auto g = maps_of(2, ConformalMap::sausage(9));
  const auto adj = run_adaptive_adjoint(*m, adjoint(60), m->distributions(), g);
  const auto f = qoi_model(m);
  const auto ref = run_adaptive(f, surplus(adj.report.lu_count), m->distributions(), g);
  const double e_adj = cv_mean(adj.qoi, f), e_ref = cv_mean(ref.surrogate, f);
  EXPECT_LE(e_adj, 2.0 * e_ref);
  EXPECT_LE(e_ref, 2.0 * e_adj);
}

TEST(Adjoint, CorrectionImprovesAccuracy) {
  auto m = std::make_shared<LadderModel>(LadderConfig{.n_params = 2});
  const auto r = run_adaptive_adjoint(*m, adjoint(60), m->distributions(),
                                      maps_of(2, ConformalMap::sausage(9)));
  const auto f = qoi_model(m);
  const auto rows = sample_inputs(m->distributions(), 1000, 5);
  double plain = 0.0, corrected = 0.0;
  for (const auto& y : rows) {
    const Complex exact = f(y);
    plain += std::abs(exact - r.qoi_core.evaluate(y));
    corrected += std::abs(exact - corrected_evaluate(r.qoi_core, r.primal, r.dual, *m, y));
  }
  EXPECT_LE(corrected, plain);
  for (const auto& idx : r.qoi_core.indices()) {
    auto sur = r.qoi_core;
    const auto y = sur.node(idx);
    const Complex c = corrected_evaluate(r.qoi_core, r.primal, r.dual, *m, y) - r.qoi_core.evaluate(y);
    EXPECT_NEAR(std::abs(c), 0.0, 1e-10);
  }
  EXPECT_THROW(corrected_evaluate(r.qoi, r.primal, r.dual, *m, rows[0]), ContractError);
}

TEST(Adjoint, CorrectedRateIsDoubled) {
  auto m = std::make_shared<LadderModel>(LadderConfig{.n_params = 1});
  const auto f = qoi_model(m);
  std::vector<double> sizes, plain, corrected;
  for (std::size_t core = 2; core <= 12; core += 2) {
    const auto r = run_adaptive_adjoint(*m, adjoint(core + 1), m->distributions(),
                                        maps_of(1, ConformalMap::identity()));
    double ep = 0.0, ec = 0.0;
    for (int k = 0; k <= 400; ++k) {
      const std::vector<double> y{-1.0 + 2.0 * k / 400};
      const Complex exact = f(y);
      ep = std::max(ep, std::abs(exact - r.qoi_core.evaluate(y)));
      ec = std::max(ec, std::abs(exact - corrected_evaluate(r.qoi_core, r.primal, r.dual, *m, y)));
    }
    if (ec < 1e-12) break;
    sizes.push_back(static_cast<double>(r.qoi_core.size()));
    plain.push_back(std::log10(ep));
    corrected.push_back(std::log10(ec));
  }
  ASSERT_GE(sizes.size(), 3u);
  auto slope = [&](const std::vector<double>& v) {
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < v.size(); ++i) mx += sizes[i], my += v[i];
    mx /= v.size();
    my /= v.size();
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      sxy += (sizes[i] - mx) * (v[i] - my);
      sxx += (sizes[i] - mx) * (sizes[i] - mx);
    }
    return sxy / sxx;
  };
  EXPECT_GE(slope(corrected) / slope(plain), 1.7);
}

TEST(Adjoint, BudgetBound) {
  auto m = std::make_shared<LadderModel>(LadderConfig{.n_params = 3});
  for (std::size_t b : {1u, 5u, 17u, 40u}) {
    const auto r = run_adaptive_adjoint(*m, adjoint(b), m->distributions(),
                                        maps_of(3, ConformalMap::identity()));
    EXPECT_LE(r.report.lu_count, b + 3);
    EXPECT_GE(r.report.res_count, r.report.lu_count - 1);
  }
}
