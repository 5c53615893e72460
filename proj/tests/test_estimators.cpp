#include <gtest/gtest.h>

#include <cmath>

#include "test_util.hpp"
#include "wmcgrad/circuit.hpp"
#include "wmcgrad/estimator_config.hpp"
#include "wmcgrad/estimators.hpp"

namespace wmcgrad {
namespace {

using testing::example_formula;
using testing::example_weights;
using testing::oracle_conditioned;
using testing::oracle_wmc;

std::vector<double> exact_wmc_gradient(const CnfFormula& f, const WeightMap& w) {
  std::vector<double> g(f.num_vars);
  for (int x = 1; x <= f.num_vars; ++x)
    g[x - 1] = oracle_conditioned(f, w, x, true) - oracle_conditioned(f, w, x, false);
  return g;
}

double cosine(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0, na = 0, nb = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    d += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  return na == 0 || nb == 0 ? 0.0 : d / std::sqrt(na * nb);
}

void expect_vec_near(const std::vector<double>& a, const std::vector<double>& b, double tol) {
  ASSERT_EQ(a.size(), b.size());
  for (size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], tol) << "coordinate " << i + 1;
}

// --- unbiasedness by enumeration ---

TEST(Sfe, ExpectationIsExactGradient) {
  RngStream rng(101);
  for (int trial = 0; trial < 30; ++trial) {
    const CnfFormula f = trial == 0 ? example_formula() : testing::random_sat_3cnf(3 + trial % 10, 3.0, rng);
    const WeightMap w = trial == 0 ? example_weights() : testing::random_weights(f.num_vars, rng);
    std::vector<double> e(f.num_vars, 0.0);
    for (uint64_t code = 0; code < (uint64_t{1} << f.num_vars); ++code) {
      const Interpretation I = Interpretation::from_index(f.num_vars, code);
      const double p = interpretation_prob(I, w);
      const auto t = sfe_term(f, w, I);
      for (int v = 0; v < f.num_vars; ++v) e[v] += p * t[v];
    }
    expect_vec_near(e, exact_wmc_gradient(f, w), 1e-10);
  }
}

TEST(Sfe, AllMissesGiveZero) {
  CnfFormula f;
  f.num_vars = 20;
  for (int v = 1; v <= 20; ++v) f.clauses.push_back({Literal(v)});
  RngStream rng(102);
  for (bool rloo : {true, false}) {
    const auto r = sfe_grad(f, WeightMap(20, 0.5), 10000, rng, rloo);
    for (double x : r.gradient.values) EXPECT_EQ(x, 0.0);
    EXPECT_EQ(r.samples_used, 10000u);
  }
  EXPECT_THROW(sfe_grad(f, WeightMap(20), 1, rng, true), std::invalid_argument);
  EXPECT_NO_THROW(sfe_grad(f, WeightMap(20), 1, rng, false));
}

TEST(Sfe, RlooIsUnbiasedEmpirically) {
  // Example formula, mean of many RLOO estimates within 4 standard errors.
  RngStream rng(103);
  const auto truth = exact_wmc_gradient(example_formula(), example_weights());
  const int reps = 4000;
  std::vector<double> sum(3, 0.0), sq(3, 0.0);
  for (int i = 0; i < reps; ++i) {
    const auto g = sfe_grad(example_formula(), example_weights(), 10, rng, true).gradient.values;
    for (int v = 0; v < 3; ++v) {
      sum[v] += g[v];
      sq[v] += g[v] * g[v];
    }
  }
  for (int v = 0; v < 3; ++v) {
    const double mean = sum[v] / reps;
    const double se = std::sqrt((sq[v] / reps - mean * mean) / reps);
    EXPECT_NEAR(mean, truth[v], 4 * se);
  }
}

TEST(Indecater, ExpectationIsExactGradient) {
  RngStream rng(104);
  for (int trial = 0; trial < 30; ++trial) {
    const CnfFormula f = trial == 0 ? example_formula() : testing::random_sat_3cnf(3 + trial % 10, 3.0, rng);
    const WeightMap w = trial == 0 ? example_weights() : testing::random_weights(f.num_vars, rng);
    std::vector<double> e(f.num_vars, 0.0);
    for (uint64_t code = 0; code < (uint64_t{1} << f.num_vars); ++code) {
      const Interpretation I = Interpretation::from_index(f.num_vars, code);
      const double p = interpretation_prob(I, w);
      for (int v = 1; v <= f.num_vars; ++v) e[v - 1] += p * indecater_term(f, I, v);
    }
    expect_vec_near(e, exact_wmc_gradient(f, w), 1e-10);
  }
}

TEST(Indecater, SampledTermsMatchDefinition) {
  // The incremental flip bookkeeping in indecater_grad against the direct
  // term on single samples.
  RngStream gen(105);
  for (int trial = 0; trial < 50; ++trial) {
    const CnfFormula f = testing::random_kcnf(8, 20, 3, gen);
    const WeightMap w = testing::random_weights(8, gen);
    RngStream a(trial), b(trial);
    const auto r = indecater_grad(f, w, 1, a);
    const Interpretation I = sample_interpretations(w, 1, b)[0];
    for (int v = 1; v <= 8; ++v) EXPECT_EQ(r.gradient[v], indecater_term(f, I, v));
  }
}

TEST(Indecater, BinaryWeightsAreExact) {
  RngStream gen(106);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 4 + trial % 8;
    const CnfFormula f = testing::random_kcnf(n, 2 * n, 3, gen);
    WeightMap w(n);
    for (int v = 1; v <= n; ++v) w.set(v, gen.bernoulli(0.5) ? 1.0 : 0.0);
    const auto truth = exact_wmc_gradient(f, w);
    for (uint64_t seed = 0; seed < 10; ++seed) {
      RngStream rng(seed);
      const auto g = indecater_grad(f, w, 3, rng).gradient.values;
      for (int v = 0; v < n; ++v) EXPECT_EQ(g[v], truth[v]);
    }
  }
}

TEST(Indecater, SingleModelVarianceBound) {
  // Single-sample estimator C for a single-model formula: C is +-1 with
  // probability q (the other variables match the model) and 0 otherwise, so
  // Var[C] = q(1-q) <= E[C^2] = q <= (1-t)^(n-1) for weights in [t, 1-t].
  const int n = 6;
  CnfFormula f;
  f.num_vars = n;
  for (int v = 1; v <= n; ++v) f.clauses.push_back({Literal(v, v % 2 == 1)});
  const double t = 0.2;
  WeightMap w(n);
  RngStream gen(107);
  for (int v = 1; v <= n; ++v) w.set(v, t + (1 - 2 * t) * gen.uniform());
  const int reps = 40000;
  for (int x = 1; x <= n; ++x) {
    double sum = 0, sq = 0;
    RngStream rng(108 + x);
    for (int i = 0; i < reps; ++i) {
      const double c = indecater_grad(f, w, 1, rng).gradient[x];
      sum += c;
      sq += c * c;
    }
    const double mean = sum / reps, second = sq / reps;
    const double var = second - mean * mean;
    double q = 1.0;
    for (int v = 1; v <= n; ++v)
      if (v != x) q *= v % 2 == 1 ? w.prob(v) : 1 - w.prob(v);
    EXPECT_NEAR(second, q, 4 * std::sqrt(q / reps));
    EXPECT_LE(var, second + 1e-12);
    EXPECT_LE(q, std::pow(1 - t, n - 1));
  }
}

TEST(Weightme, ExampleExpectation) {
  const CnfFormula f = example_formula();
  const WeightMap w = example_weights();
  std::vector<double> e(3, 0.0);
  for (uint64_t code : testing::oracle_models(f)) {
    const Interpretation M = Interpretation::from_index(3, code);
    const double p = interpretation_prob(M, w) / 0.475;
    const auto t = weightme_term(w, M);
    for (int v = 0; v < 3; ++v) e[v] += p * t[v];
  }
  EXPECT_NEAR(e[0], 0.9 / 0.475, 1e-12);
  EXPECT_NEAR(e[0], 1.894736842105263, 1e-12);
  EXPECT_NEAR(e[1], -0.25 / 0.475, 1e-12);
  EXPECT_NEAR(e[2], 0.1 / 0.475, 1e-12);
}

TEST(Weightme, ExpectationIsExactLogGradient) {
  RngStream rng(109);
  for (int trial = 0; trial < 50; ++trial) {
    const CnfFormula f = testing::random_sat_3cnf(3 + trial % 10, 3.0, rng);
    const WeightMap w = testing::random_weights(f.num_vars, rng);
    const double wmc = oracle_wmc(f, w);
    std::vector<double> e(f.num_vars, 0.0);
    for (uint64_t code : testing::oracle_models(f)) {
      const Interpretation M = Interpretation::from_index(f.num_vars, code);
      const double p = interpretation_prob(M, w) / wmc;
      const auto t = weightme_term(w, M);
      for (int v = 0; v < f.num_vars; ++v) e[v] += p * t[v];
    }
    auto truth = exact_wmc_gradient(f, w);
    for (double& x : truth) x /= wmc;
    expect_vec_near(e, truth, 1e-10);
  }
}

TEST(Weightme, SingleModelIsConstant) {
  CnfFormula f;
  f.num_vars = 2;
  f.clauses = {{Literal(1)}, {Literal(2)}};
  const WeightMap w(std::vector<double>{0.3, 0.8});
  for (uint64_t seed = 0; seed < 20; ++seed) {
    RngStream rng(seed);
    const auto r = weightme_grad(f, w, SamplerKind::kExactModel, 1 + seed, rng);
    EXPECT_EQ(r.gradient.of, GradientOf::kLogWmc);
    EXPECT_DOUBLE_EQ(r.gradient[1], 1 / 0.3);
    EXPECT_DOUBLE_EQ(r.gradient[2], 1 / 0.8);
  }
}

TEST(Weightme, EmpiricalMeanWithinThreeSe) {
  RngStream gen(110);
  for (int trial = 0; trial < 3; ++trial) {
    const CnfFormula f = testing::random_sat_3cnf(10, 3.0, gen);
    const WeightMap w = testing::random_weights(10, gen, 0.2, 0.8);
    const double wmc = oracle_wmc(f, w);
    auto truth = exact_wmc_gradient(f, w);
    for (double& x : truth) x /= wmc;
    const DecisionDnnf c = compile(f);
    EstimatorOptions opts;
    opts.circuit = &c;
    RngStream rng(111 + trial);
    const size_t s = 20000;
    // Per-sample terms for the standard error.
    ExactModelSampler sampler(c, w);
    std::vector<double> sum(10, 0), sq(10, 0);
    for (size_t i = 0; i < s; ++i) {
      const auto t = weightme_term(w, sampler.draw(rng));
      for (int v = 0; v < 10; ++v) {
        sum[v] += t[v];
        sq[v] += t[v] * t[v];
      }
    }
    for (int v = 0; v < 10; ++v) {
      const double mean = sum[v] / s;
      const double se = std::sqrt(std::max(0.0, sq[v] / s - mean * mean) / s);  // backbone vars: constant term
      EXPECT_LE(std::abs(mean - truth[v]), 3 * se + 1e-12) << "trial " << trial << " var " << v + 1;
    }
    // And the estimator itself is the mean of those terms.
    RngStream r1(5), r2(5);
    const auto g = weightme_grad(f, w, SamplerKind::kExactModel, 7, r1, opts).gradient.values;
    std::vector<double> manual(10, 0);
    for (int i = 0; i < 7; ++i) {
      const auto t = weightme_term(w, sampler.draw(r2));
      for (int v = 0; v < 10; ++v) manual[v] += t[v] / 7;
    }
    expect_vec_near(g, manual, 1e-12);
  }
}

TEST(Weightme, QualityImprovesWithSamples) {
  RngStream gen(112);
  double prev_mean = -2, prev_se = 0;
  for (size_t s : {1u, 10u, 100u}) {
    double sum = 0, sq = 0;
    int count = 0;
    RngStream fgen = gen;
    for (int i = 0; i < 20; ++i) {
      const CnfFormula f = testing::random_sat_3cnf(4 + i % 9, 3.0, fgen);
      const WeightMap w = testing::random_weights(f.num_vars, fgen);
      const auto truth = exact_wmc_gradient(f, w);
      const DecisionDnnf c = compile(f);
      EstimatorOptions opts;
      opts.circuit = &c;
      RngStream rng = RngStream(s).split(i);
      for (int t = 0; t < 100; ++t) {
        const double cs = cosine(weightme_grad(f, w, SamplerKind::kExactModel, s, rng, opts).gradient.values, truth);
        sum += cs;
        sq += cs * cs;
        ++count;
      }
    }
    const double mean = sum / count;
    const double se = std::sqrt((sq / count - mean * mean) / count);
    EXPECT_GE(mean + 2 * std::hypot(se, prev_se), prev_mean) << "s = " << s;
    prev_mean = mean;
    prev_se = se;
  }
}

TEST(Weightme, HashAndUniformSamplers) {
  RngStream rng(113);
  const auto r = weightme_grad(example_formula(), example_weights(), SamplerKind::kHashModel, 100, rng);
  EXPECT_EQ(r.samples_used, 100u);
  EXPECT_GT(cosine(r.gradient.values, {0.9, -0.25, 0.1}), 0.9);
  const auto u = weightme_grad(example_formula(), example_weights(), SamplerKind::kUniformModel, 50, rng);
  for (double x : u.gradient.values) EXPECT_TRUE(std::isfinite(x));
  EXPECT_THROW(weightme_grad(example_formula(), example_weights(), SamplerKind::kInterpretation, 5, rng),
               std::invalid_argument);
  CnfFormula unsat;
  unsat.num_vars = 1;
  unsat.clauses = {{Literal(1)}, {Literal(-1)}};
  EXPECT_THROW(weightme_grad(unsat, WeightMap(1), SamplerKind::kExactModel, 5, rng), UnsatError);
}

// --- t-norms ---

TEST(Tnorm, ProductExample) {
  const auto r = tnorm_grad(example_formula(), example_weights(), TNorm::kProduct);
  EXPECT_NEAR(*r.value_estimate, 0.50875, 1e-15);
  EXPECT_NEAR(r.gradient[1], 0.8325, 1e-15);
  // Finite differences on all coordinates.
  for (int v = 1; v <= 3; ++v) {
    WeightMap up = example_weights(), down = example_weights();
    up.set(v, up.prob(v) + 1e-6);
    down.set(v, down.prob(v) - 1e-6);
    const double fd = (fuzzy_eval(example_formula(), up, TNorm::kProduct) -
                       fuzzy_eval(example_formula(), down, TNorm::kProduct)) / 2e-6;
    EXPECT_NEAR(r.gradient[v], fd, 1e-8);
  }
}

TEST(Tnorm, GoedelOneNonzero) {
  const auto r = tnorm_grad(example_formula(), example_weights(), TNorm::kGoedel);
  int nonzero = 0;
  for (double x : r.gradient.values) nonzero += x != 0.0;
  EXPECT_EQ(nonzero, 1);
  // min(max(0.5, 0.1), max(0.9, 0.25)) is attained by a in the first clause.
  EXPECT_EQ(r.gradient[1], 1.0);
  EXPECT_EQ(*r.value_estimate, 0.5);
}

TEST(Tnorm, ProductExactOnIndependentClauses) {
  CnfFormula f;
  f.num_vars = 5;
  f.clauses = {{Literal(1), Literal(-2)}, {Literal(3)}, {Literal(-4), Literal(5)}};
  const WeightMap w(std::vector<double>{0.2, 0.7, 0.4, 0.9, 0.35});
  expect_vec_near(tnorm_grad(f, w, TNorm::kProduct).gradient.values, exact_wmc_gradient(f, w), 1e-12);
}

// --- relaxations ---

TEST(Ste, BinaryWeightsMatchTnormAtSample) {
  const WeightMap w(std::vector<double>{1.0, 0.0, 1.0});
  RngStream rng(114);
  expect_vec_near(ste_grad(example_formula(), w, 5, rng).gradient.values,
                  tnorm_grad(example_formula(), w, TNorm::kProduct).gradient.values, 0.0);
}

TEST(Ste, Golden) {
  RngStream rng(2024);
  expect_vec_near(ste_grad(example_formula(), example_weights(), 10, rng).gradient.values, {0.9, 0.3, 0.1},
                  1e-15);
}

TEST(Ste, BiasAgainstProductTnorm) {
  // No closed form; the mean STE gradient differs from the product t-norm
  // gradient on the example, and the gap is reported here.
  RngStream rng(115);
  const auto r = ste_grad(example_formula(), example_weights(), 10000, rng);
  const auto p = tnorm_grad(example_formula(), example_weights(), TNorm::kProduct);
  double gap = 0.0;
  for (int v = 1; v <= 3; ++v) gap = std::max(gap, std::abs(r.gradient[v] - p.gradient[v]));
  RecordProperty("ste_product_max_gap", std::to_string(gap));
  EXPECT_GT(gap, 0.01);
}

TEST(Gumbel, HighTemperatureLimit) {
  const WeightMap half(3, 0.5);
  RngStream rng(116);
  const double temp = 1e6;
  const auto g = gumbel_grad(example_formula(), half, 10, temp, rng);
  const auto p = tnorm_grad(example_formula(), half, TNorm::kProduct);
  // dy/dw = y(1-y) / (temp w(1-w)) -> 1/temp at w = 1/2.
  for (int v = 1; v <= 3; ++v) EXPECT_NEAR(g.gradient[v] * temp, p.gradient[v], 1e-3);
  EXPECT_THROW(gumbel_grad(example_formula(), half, 10, 0.0, rng), std::invalid_argument);
}

TEST(Gumbel, Golden) {
  RngStream rng(2024);
  expect_vec_near(gumbel_grad(example_formula(), example_weights(), 10, 2.0, rng).gradient.values,
                  {0.2455666930595605, -0.12862368851470751, 0.13047474808001527}, 1e-12);
  const auto d = EstimatorConfig::defaults(EstimatorKind::kGumbel);
  EXPECT_EQ(d.samples, 10u);
  EXPECT_EQ(d.temperature, 2.0);
}

// --- model-based estimators ---

TEST(Kbest, Examples) {
  const auto all = kbest_grad(example_formula(), example_weights(), 4);
  expect_vec_near(all.gradient.values, {0.9, -0.25, 0.1}, 1e-12);
  const auto one = kbest_grad(example_formula(), example_weights(), 1);
  expect_vec_near(one.gradient.values, {0.675, -0.375, -0.45}, 1e-12);
  EXPECT_NEAR(*one.value_estimate, 0.3375, 1e-12);
  double prev = 0.0;
  for (int k = 1; k <= 5; ++k) {
    const double v = *kbest_grad(example_formula(), example_weights(), k).value_estimate;
    EXPECT_GE(v, prev);
    EXPECT_LE(v, 0.475 + 1e-12);
    prev = v;
  }
}

TEST(Kbest, LowerBound) {
  RngStream rng(117);
  for (int trial = 0; trial < 20; ++trial) {
    const CnfFormula f = testing::random_sat_3cnf(8, 3.0, rng);
    const WeightMap w = testing::random_weights(8, rng);
    const double wmc = oracle_wmc(f, w);
    for (int k : {1, 3, 10}) EXPECT_LE(*kbest_grad(f, w, k).value_estimate, wmc + 1e-12);
    expect_vec_near(koptimal_grad(f, w, 3).gradient.values, kbest_grad(f, w, 3).gradient.values, 1e-12);
  }
}

TEST(Mpe, GradientOfModelProbability) {
  const auto r = mpe_grad(example_formula(), example_weights());
  expect_vec_near(r.gradient.values, {0.675, -0.375, -0.45}, 1e-12);
}

TEST(Imle, Examples) {
  RngStream rng(118);
  const auto z = imle_grad(example_formula(), example_weights(), 1, 0.0, rng);
  expect_vec_near(z.gradient.values, {1, -1, -1}, 0.0);  // MPE {a, ~b, ~c}
  CnfFormula f;
  f.num_vars = 3;
  f.clauses = {{Literal(-1)}, {Literal(2)}, {Literal(-3)}};
  const auto s = imle_grad(f, WeightMap(3, 0.7), 25, 2.0, rng);
  expect_vec_near(s.gradient.values, {-1, 1, -1}, 0.0);
  EXPECT_THROW(imle_grad(f, WeightMap(3), 1, -1.0, rng), std::invalid_argument);
}

TEST(Imle, Golden) {
  RngStream rng(2024);
  expect_vec_near(imle_grad(example_formula(), example_weights(), 10, 1.0, rng).gradient.values, {0.8, -0.6, -0.4},
                  1e-15);
}

// --- semantic strengthening ---

TEST(SemanticStrengthening, Limits) {
  const auto zero = semantic_strengthening_grad(example_formula(), example_weights(), 0);
  const auto prod = tnorm_grad(example_formula(), example_weights(), TNorm::kProduct);
  expect_vec_near(zero.gradient.values, prod.gradient.values, 0.0);
  const auto full = semantic_strengthening_grad(example_formula(), example_weights(), 10);
  expect_vec_near(full.gradient.values, {0.9, -0.25, 0.1}, 1e-10);
  EXPECT_THROW(semantic_strengthening_grad(example_formula(), example_weights(), -1), std::invalid_argument);
}

TEST(SemanticStrengthening, FullBudgetIsExact) {
  RngStream rng(119);
  for (int trial = 0; trial < 20; ++trial) {
    const CnfFormula f = testing::random_sat_3cnf(7, 2.0, rng);
    const WeightMap w = testing::random_weights(7, rng);
    const int pairs = static_cast<int>(f.clauses.size() * f.clauses.size());
    const auto r = semantic_strengthening_grad(f, w, pairs);
    expect_vec_near(r.gradient.values, exact_wmc_gradient(f, w), 1e-10);
    // Clauses sharing no variable merge into separate groups; the product of
    // the groups is exact only when every shared-variable pair merged.
    EXPECT_NEAR(*r.value_estimate, oracle_wmc(f, w), 1e-10);
  }
}

TEST(SemanticStrengthening, MutualInformation) {
  const WeightMap w(std::vector<double>{0.3, 0.6, 0.2, 0.8});
  EXPECT_NEAR(clause_mutual_information({Literal(1), Literal(2)}, {Literal(3), Literal(-4)}, w), 0.0, 1e-15);
  EXPECT_GT(clause_mutual_information({Literal(1), Literal(2)}, {Literal(-2), Literal(3)}, w), 0.0);
  // Disjoint clauses: no merges, so any budget equals the product t-norm.
  CnfFormula f;
  f.num_vars = 4;
  f.clauses = {{Literal(1), Literal(2)}, {Literal(3), Literal(-4)}};
  expect_vec_near(semantic_strengthening_grad(f, w, 5).gradient.values,
                  tnorm_grad(f, w, TNorm::kProduct).gradient.values, 1e-15);
}

// --- CatLog and hybrid ---

TEST(Catlog, ExactInnerIsExact) {
  RngStream rng(120);
  for (int trial = 0; trial < 20; ++trial) {
    const CnfFormula f = testing::random_sat_3cnf(8, 3.0, rng);
    const WeightMap w = testing::random_weights(8, rng);
    expect_vec_near(catlog_grad(f, w, EstimatorKind::kExact, 1, 2.0, rng).gradient.values, exact_wmc_gradient(f, w),
                    1e-10);
  }
}

TEST(Catlog, ProductInner) {
  RngStream rng(121);
  const auto r = catlog_grad(example_formula(), example_weights(), EstimatorKind::kTnormProduct, 1, 2.0, rng);
  // fuzzy(phi|b) = 0.25, fuzzy(phi|~b) = 0.5
  EXPECT_NEAR(r.gradient[2], -0.25, 1e-15);
  // phi|a = (~b | c): 0.925; phi|~a = b & (~b | c): 0.1 * 0.925
  EXPECT_NEAR(r.gradient[1], 0.925 - 0.0925, 1e-15);
  CnfFormula f;
  f.num_vars = 4;
  f.clauses = {{Literal(1), Literal(2)}, {Literal(3), Literal(-4)}};
  const WeightMap w(std::vector<double>{0.3, 0.6, 0.2, 0.8});
  expect_vec_near(catlog_grad(f, w, EstimatorKind::kTnormProduct, 1, 2.0, rng).gradient.values,
                  exact_wmc_gradient(f, w), 1e-12);
  EXPECT_THROW(catlog_grad(f, w, EstimatorKind::kSfe, 1, 2.0, rng), std::invalid_argument);
}

TEST(Hybrid, Behaviour) {
  RngStream rng(122);
  CnfFormula f;
  f.num_vars = 4;
  f.clauses = {{Literal(1), Literal(2)}, {Literal(3), Literal(-4)}};
  const auto r = sample_tnorm_hybrid_grad(f, WeightMap(4, 0.5), 1000, rng);
  for (double x : r.gradient.values) EXPECT_EQ(x, 0.0);
  EXPECT_THROW(sample_tnorm_hybrid_grad(f, WeightMap(4), 0, rng), std::invalid_argument);
}

TEST(Hybrid, Golden) {
  RngStream rng(2024);
  expect_vec_near(sample_tnorm_hybrid_grad(example_formula(), example_weights(), 1, rng).gradient.values,
                  {0.0, -0.75, 0.1}, 1e-15);
}

// --- dispatch and configuration ---

TEST(Estimate, ExactSelfComparison) {
  RngStream rng(123);
  const auto r = estimate(EstimatorConfig::parse("exact"), example_formula(), example_weights(), rng);
  expect_vec_near(r.gradient.values, {0.9, -0.25, 0.1}, 1e-14);
  EXPECT_GE(r.wall_seconds, 0.0);
}

TEST(Estimate, EveryKindRuns) {
  const char* specs[] = {"exact",       "sfe:s=100",  "indecater:s=10",        "weightme:s=10",
                         "weightme:s=10,sampler=hash", "ste",         "gumbel",  "tnorm-product",
                         "tnorm-goedel", "kbest:k=3",  "koptimal:k=3",          "mpe",
                         "imle:s=3",    "semantic-strengthening:kappa=2",       "uniform-model:s=10",
                         "catlog:inner=gumbel,s=3,temp=2", "sample-tnorm-hybrid:s=3"};
  for (const char* s : specs) {
    RngStream rng(124);
    const auto cfg = EstimatorConfig::parse(s);
    const auto r = estimate(cfg, example_formula(), example_weights(), rng);
    EXPECT_EQ(r.gradient.num_vars(), 3) << s;
    for (double x : r.gradient.values) EXPECT_TRUE(std::isfinite(x)) << s;
  }
}

TEST(Config, Defaults) {
  EXPECT_EQ(EstimatorConfig::defaults(EstimatorKind::kSfe).samples, 10000u);
  EXPECT_EQ(EstimatorConfig::defaults(EstimatorKind::kWeightme).samples, 100u);
  EXPECT_EQ(EstimatorConfig::defaults(EstimatorKind::kSte).samples, 10u);
  EXPECT_EQ(EstimatorConfig::defaults(EstimatorKind::kKoptimal).k, 100);
  EXPECT_EQ(EstimatorConfig::defaults(EstimatorKind::kSemanticStrengthening).kappa, 100);
  EXPECT_TRUE(EstimatorConfig::defaults(EstimatorKind::kSfe).rloo);
}

TEST(Config, RoundTrip) {
  for (const char* s : {"weightme:s=100,sampler=hash", "gumbel:s=10,temp=2", "sfe:s=50,baseline=none", "kbest:k=7",
                        "catlog:inner=gumbel,s=10,temp=0.5", "semantic-strengthening:kappa=3",
                        "uniform-model:s=20,importance=1", "imle:s=4,noise=0.25", "tnorm-goedel"}) {
    const auto c = EstimatorConfig::parse(s);
    EXPECT_EQ(EstimatorConfig::parse(c.to_string()), c) << s;
    EXPECT_EQ(EstimatorConfig::parse(c.to_string()).to_string(), c.to_string());
  }
  EXPECT_EQ(EstimatorConfig::parse("weightme:s=100,sampler=hash").sampler, SamplerKind::kHashModel);
}

TEST(Config, Errors) {
  for (const char* s : {"nope", "sfe:s=0", "sfe:s=abc", "kbest:k=0", "gumbel:temp=-1", "weightme:sampler=interpretation",
                        "tnorm-product:s=3", "sfe:baseline=foo", "sfe:s", "catlog:inner=sfe"})
    EXPECT_THROW(EstimatorConfig::parse(s), std::invalid_argument) << s;
}

}  // namespace
}  // namespace wmcgrad
