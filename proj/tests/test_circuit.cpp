#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "test_util.hpp"
#include "wmcgrad/brute.hpp"
#include "wmcgrad/circuit.hpp"
#include "wmcgrad/sat.hpp"

namespace wmcgrad {
namespace {

using testing::example_formula;
using testing::example_weights;
using testing::oracle_wmc;

TEST(Compile, ExampleValue) {
  const DecisionDnnf c = compile(example_formula());
  EXPECT_EQ(c.validate(), "");
  EXPECT_NEAR(wmc_eval(c, example_weights()).value, 0.475, 1e-15);
}

TEST(Compile, FalseAndTrue) {
  CnfFormula f;
  f.num_vars = 3;
  f.clauses = {{Literal(1)}, {}};
  EXPECT_EQ(compile(f).root(), DecisionDnnf::kFalseId);
  CnfFormula t;
  t.num_vars = 3;
  EXPECT_EQ(compile(t).root(), DecisionDnnf::kTrueId);
  EXPECT_EQ(wmc_eval(compile(t), WeightMap(3, 0.3)).value, 1.0);
}

TEST(Compile, NodeBudget) {
  RngStream rng(3);
  const CnfFormula f = testing::random_kcnf(40, 80, 3, rng);
  CompileOptions o;
  o.max_nodes = 10;
  EXPECT_THROW(compile(f, o), BudgetExceeded);
}

TEST(Compile, SingleModelValues) {
  CnfFormula f;
  f.num_vars = 6;
  for (int v = 1; v <= 6; ++v) f.clauses.push_back({Literal(v, v % 2 == 0)});
  const DecisionDnnf c = compile(f);
  EXPECT_NEAR(wmc_eval(c, WeightMap(6, 0.5)).value, std::ldexp(1.0, -6), 1e-18);
  WeightMap w(6);
  for (int v = 1; v <= 6; ++v) w.set(v, v % 2 == 0 ? 1.0 : 0.0);
  EXPECT_EQ(wmc_eval(c, w).value, 1.0);
}

TEST(Compile, EquivalentUnderBinaryWeights) {
  RngStream rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + static_cast<int>(rng.below(9));
    const CnfFormula f = testing::random_kcnf(n, static_cast<int>(rng.below(4 * n)), 3, rng);
    const DecisionDnnf c = compile(f);
    ASSERT_EQ(c.validate(), "");
    for (uint64_t code = 0; code < (uint64_t{1} << n); ++code) {
      WeightMap w(n);
      for (int v = 1; v <= n; ++v) w.set(v, (code >> (v - 1) & 1) ? 1.0 : 0.0);
      EXPECT_EQ(wmc_eval(c, w).value, testing::oracle_sat(f, code) ? 1.0 : 0.0);
    }
  }
}

TEST(Compile, OracleEquivalenceAllHeuristics) {
  RngStream rng(13);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 3 + static_cast<int>(rng.below(13));
    const CnfFormula f = testing::random_kcnf(n, static_cast<int>(rng.below(5 * n)), 3, rng);
    const WeightMap w = testing::random_weights(n, rng);
    const double truth = oracle_wmc(f, w);
    for (auto h : {BranchHeuristic::kMoms, BranchHeuristic::kMostOccurrences, BranchHeuristic::kLowestIndex}) {
      CompileOptions o;
      o.heuristic = h;
      EXPECT_NEAR(wmc_eval(compile(f, o), w).value, truth, 1e-12);
    }
    EXPECT_NEAR(wmc_brute(f, w).value, truth, 1e-12);
  }
}

TEST(Compile, DumpFormat) {
  std::ostringstream os;
  compile(example_formula()).dump(os);
  EXPECT_NE(os.str().find("root "), std::string::npos);
}

TEST(Gradient, Example) {
  const auto [r, g] = wmc_grad(compile(example_formula()), example_weights());
  EXPECT_NEAR(r.value, 0.475, 1e-15);
  EXPECT_EQ(g.of, GradientOf::kWmc);
  EXPECT_NEAR(g[1], 0.9, 1e-14);
  EXPECT_NEAR(g[2], -0.25, 1e-14);
  EXPECT_NEAR(g[3], 0.1, 1e-14);
  const GradientVector lg = log_gradient(g, r.value);
  EXPECT_EQ(lg.of, GradientOf::kLogWmc);
  EXPECT_NEAR(lg[1], 0.9 / 0.475, 1e-13);
}

TEST(Gradient, DummyVariable) {
  CnfFormula f = example_formula();
  f.num_vars = 4;
  f.clauses.push_back({Literal(4)});
  WeightMap w(std::vector<double>{0.5, 0.1, 0.25, 0.6});
  const auto g = wmc_grad(compile(f), w).second;
  EXPECT_NEAR(g[4], 0.475, 1e-12);
}

TEST(Gradient, FalseFormulaIsZero) {
  CnfFormula f;
  f.num_vars = 3;
  f.clauses = {{}};
  const auto g = wmc_grad(compile(f), example_weights()).second;
  for (double x : g.values) EXPECT_EQ(x, 0.0);
  EXPECT_THROW(log_gradient(g, 0.0), std::domain_error);
}

TEST(Gradient, AbsentVariableIsZero) {
  CnfFormula f;
  f.num_vars = 4;
  f.clauses = {{Literal(1), Literal(2)}};
  const auto g = wmc_grad(compile(f), WeightMap(4, 0.3)).second;
  EXPECT_EQ(g[3], 0.0);
  EXPECT_EQ(g[4], 0.0);
}

TEST(Gradient, ConditionedDifferences) {
  RngStream rng(19);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 3 + static_cast<int>(rng.below(13));
    const CnfFormula f = testing::random_kcnf(n, static_cast<int>(rng.below(5 * n)), 3, rng);
    const WeightMap w = testing::random_weights(n, rng);
    const auto g = wmc_grad(compile(f), w).second;
    for (int x = 1; x <= n; ++x)
      EXPECT_NEAR(g[x],
                  testing::oracle_conditioned(f, w, x, true) - testing::oracle_conditioned(f, w, x, false),
                  1e-10);
  }
}

TEST(Gradient, FiniteDifferences) {
  RngStream rng(31);
  const double h = 1e-5;
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 3 + static_cast<int>(rng.below(10));
    const CnfFormula f = testing::random_kcnf(n, 2 * n, 3, rng);
    const WeightMap w = testing::random_weights(n, rng, 0.1, 0.9);
    const DecisionDnnf c = compile(f);
    const auto g = wmc_grad(c, w).second;
    for (int x = 1; x <= n; ++x) {
      WeightMap up = w, down = w;
      up.set(x, w.prob(x) + h);
      down.set(x, w.prob(x) - h);
      const double fd = (wmc_eval(c, up).value - wmc_eval(c, down).value) / (2 * h);
      EXPECT_LE(std::abs(fd - g[x]), std::max(1e-7, 1e-4 * std::abs(g[x])));
    }
  }
}

TEST(Gradient, Multilinear) {
  RngStream rng(37);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 3 + static_cast<int>(rng.below(10));
    const CnfFormula f = testing::random_kcnf(n, 2 * n, 3, rng);
    const WeightMap w = testing::random_weights(n, rng);
    const DecisionDnnf c = compile(f);
    const int x = 1 + static_cast<int>(rng.below(static_cast<uint64_t>(n)));
    WeightMap w0 = w, w1 = w;
    w0.set(x, 0.0);
    w1.set(x, 1.0);
    const double t = w.prob(x);
    EXPECT_NEAR(wmc_eval(c, w).value, (1 - t) * wmc_eval(c, w0).value + t * wmc_eval(c, w1).value, 1e-12);
  }
}

TEST(ModelCount, HalfWeightsGiveCount) {
  RngStream rng(41);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 3 + static_cast<int>(rng.below(10));
    const CnfFormula f = testing::random_kcnf(n, 2 * n, 3, rng);
    const double wmc = wmc_eval(compile(f), WeightMap(n, 0.5)).value;
    const auto models = enumerate_models(f, 1u << n);
    EXPECT_EQ(std::ldexp(wmc, n), static_cast<double>(models.size()));
    EXPECT_EQ(models.size(), testing::oracle_models(f).size());
  }
}

TEST(Enumerate, Example) {
  auto models = enumerate_models(example_formula(), 100);
  ASSERT_EQ(models.size(), 4u);
  std::vector<uint64_t> codes;
  for (const auto& m : models) codes.push_back(m.index());
  std::sort(codes.begin(), codes.end());
  // {a,~b,~c}, {a,~b,c}, {~a,b,c}, {a,b,c}
  EXPECT_EQ(codes, (std::vector<uint64_t>{0b001, 0b101, 0b110, 0b111}));
}

TEST(Enumerate, EdgeCases) {
  CnfFormula f;
  f.num_vars = 1;
  f.clauses = {{}};
  EXPECT_TRUE(enumerate_models(f, 10).empty());
  CnfFormula t;
  t.num_vars = 1;
  EXPECT_EQ(enumerate_models(t, 10).size(), 2u);
  EXPECT_THROW(enumerate_models(example_formula(), 3), LimitExceeded);
}

TEST(Brute, LimitAndTrueFormula) {
  CnfFormula big;
  big.num_vars = 30;
  EXPECT_THROW(wmc_brute(big, WeightMap(30)), LimitExceeded);
  CnfFormula t;
  t.num_vars = 5;
  EXPECT_NEAR(wmc_brute(t, WeightMap(5, 0.3)).value, 1.0, 1e-15);
  EXPECT_EQ(brute_force_models(example_formula()).size(), 4u);
}

}  // namespace
}  // namespace wmcgrad
