#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>

#include "test_util.hpp"
#include "wmcgrad/circuit.hpp"
#include "wmcgrad/samplers.hpp"

namespace wmcgrad {
namespace {

using testing::example_formula;
using testing::example_weights;

// Exact P(M)/WMC by enumeration.
std::map<uint64_t, double> target_distribution(const CnfFormula& f, const WeightMap& w) {
  std::map<uint64_t, double> p;
  const std::vector<double> probs(w.probs().begin(), w.probs().end());
  double total = 0.0;
  for (uint64_t code : testing::oracle_models(f)) total += (p[code] = testing::oracle_prob(probs, code));
  for (auto& [code, x] : p) x /= total;
  return p;
}

double total_variation(const std::map<uint64_t, double>& target, const std::map<uint64_t, size_t>& counts,
                       size_t draws) {
  double tv = 0.0;
  std::map<uint64_t, double> all = target;
  for (const auto& [code, c] : counts) all.try_emplace(code, 0.0);
  for (const auto& [code, p] : all) {
    auto it = counts.find(code);
    const double q = it == counts.end() ? 0.0 : static_cast<double>(it->second) / static_cast<double>(draws);
    tv += std::abs(p - q);
  }
  return tv / 2;
}

// Upper 0.001 quantile of chi-square (Wilson-Hilferty).
double chi2_critical(double df) {
  const double z = 3.090232;
  const double a = 2.0 / (9.0 * df);
  return df * std::pow(1 - a + z * std::sqrt(a), 3);
}

TEST(Rng, Reproducible) {
  RngStream a(99), b(99);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next_u64(), b.next_u64());
  EXPECT_NE(RngStream(1).split(2).next_u64(), RngStream(1).split(3).next_u64());
  // Pinned first output of seed 0 so that a change of constants is noticed.
  EXPECT_EQ(RngStream(0).next_u64(), RngStream::mix(0x9e3779b97f4a7c15ull));
}

TEST(Interpretations, Basics) {
  RngStream rng(1);
  for (const auto& I : sample_interpretations(WeightMap(5, 1.0), 20, rng)) EXPECT_EQ(I, Interpretation(5, true));
  EXPECT_THROW(sample_interpretations(WeightMap(5), 0, rng), std::invalid_argument);
}

TEST(Interpretations, ExampleFrequency) {
  RngStream rng(2);
  const size_t s = 100000;
  size_t hits = 0, models = 0;
  for (const auto& I : sample_interpretations(example_weights(), s, rng)) {
    hits += I.index() == 0b001;
    models += evaluate(example_formula(), I);
  }
  const double se = std::sqrt(0.3375 * (1 - 0.3375) / s);
  EXPECT_NEAR(static_cast<double>(hits) / s, 0.3375, 3 * se);
  const double se2 = std::sqrt(0.475 * 0.525 / s);
  EXPECT_NEAR(static_cast<double>(models) / s, 0.475, 3 * se2);
}

TEST(ExactSampler, ExampleFrequency) {
  const DecisionDnnf c = compile(example_formula());
  ExactModelSampler sampler(c, example_weights());
  EXPECT_NEAR(sampler.wmc(), 0.475, 1e-15);
  RngStream rng(3);
  const size_t s = 100000;
  size_t hits = 0;
  for (size_t i = 0; i < s; ++i) {
    const Interpretation m = sampler.draw(rng);
    ASSERT_TRUE(evaluate(example_formula(), m));
    hits += m.index() == 0b001;
  }
  const double p = 0.3375 / 0.475;
  EXPECT_NEAR(static_cast<double>(hits) / s, p, 3 * std::sqrt(p * (1 - p) / s));
}

TEST(ExactSampler, Errors) {
  CnfFormula f;
  f.num_vars = 2;
  f.clauses = {{}};
  const DecisionDnnf c = compile(f);
  EXPECT_THROW(ExactModelSampler(c, WeightMap(2)), UnsatError);
  CnfFormula g;
  g.num_vars = 1;
  g.clauses = {{Literal(1)}};
  const DecisionDnnf cg = compile(g);
  EXPECT_THROW(ExactModelSampler(cg, WeightMap(1, 0.0)), std::domain_error);
}

TEST(ExactSampler, SingleModel) {
  CnfFormula f;
  f.num_vars = 4;
  f.clauses = {{Literal(1)}, {Literal(-2)}, {Literal(3)}, {Literal(-4)}};
  const DecisionDnnf c = compile(f);
  RngStream rng(4);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(exact_model_sample(c, WeightMap(4, 0.3), rng).index(), 0b0101u);
}

TEST(ExactSampler, ChiSquare) {
  RngStream rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 4 + static_cast<int>(rng.below(9));
    const CnfFormula f = testing::random_sat_3cnf(n, 2.0, rng);
    const WeightMap w = testing::random_weights(n, rng, 0.2, 0.8);
    const auto target = target_distribution(f, w);
    const DecisionDnnf c = compile(f);
    ExactModelSampler sampler(c, w);
    const size_t s = 100000;
    std::map<uint64_t, size_t> counts;
    for (size_t i = 0; i < s; ++i) ++counts[sampler.draw(rng).index()];
    // Pool cells with expected count below 5.
    double chi2 = 0.0, pooled_e = 0.0, pooled_o = 0.0;
    int df = -1;
    for (const auto& [code, p] : target) {
      const double e = p * s;
      const double o = static_cast<double>(counts[code]);
      if (e < 5) {
        pooled_e += e;
        pooled_o += o;
        continue;
      }
      chi2 += (o - e) * (o - e) / e;
      ++df;
    }
    if (pooled_e > 0) {
      chi2 += (pooled_o - pooled_e) * (pooled_o - pooled_e) / pooled_e;
      ++df;
    }
    for (const auto& [code, c] : counts) EXPECT_TRUE(target.count(code)) << "non-model sampled";
    if (df > 0) {
      EXPECT_LT(chi2, chi2_critical(df)) << "trial " << trial;
    }
    // Empirical TV of an exact sampler concentrates around
    // sum sqrt(p(1-p)/(2 pi s)), which exceeds 0.01 with many models.
    double expected_tv = 0.0;
    for (const auto& [code, p] : target) expected_tv += std::sqrt(p * (1 - p) / (2 * M_PI * s));
    EXPECT_LT(total_variation(target, counts, s), std::max(0.01, 1.5 * expected_tv)) << target.size() << " models";
  }
}

TEST(HashSampler, WholeSetFitsIsExact) {
  RngStream rng(6);
  SamplerSpec spec;
  spec.kind = SamplerKind::kHashModel;
  HashModelSampler sampler(example_formula(), example_weights(), spec, rng);
  EXPECT_TRUE(sampler.exact());
  EXPECT_EQ(sampler.num_xors(), 0);
}

TEST(HashSampler, Unsat) {
  CnfFormula f;
  f.num_vars = 2;
  f.clauses = {{Literal(1)}, {Literal(-1)}};
  RngStream rng(7);
  EXPECT_THROW(hash_model_sample(f, WeightMap(2), SamplerSpec{}, rng), UnsatError);
  EXPECT_THROW(uniform_model_sample(f, rng), UnsatError);
}

// Small pivot so that hashing is exercised, on both the cached and the SAT
// route.
class HashFidelity : public ::testing::TestWithParam<size_t> {};

TEST_P(HashFidelity, TotalVariation) {
  RngStream rng(8);
  for (int trial = 0; trial < 3; ++trial) {
    const int n = 10 + trial;
    const CnfFormula f = testing::random_sat_3cnf(n, 2.0, rng);
    const WeightMap w = testing::random_weights(n, rng, 0.3, 0.7);
    const auto target = target_distribution(f, w);
    SamplerSpec spec;
    spec.kind = SamplerKind::kHashModel;
    spec.pivot = 16;
    spec.model_cache_limit = GetParam();
    HashModelSampler sampler(f, w, spec, rng);
    EXPECT_FALSE(sampler.exact());
    EXPECT_EQ(sampler.cached(), GetParam() > 0);
    const size_t s = 40000;
    std::map<uint64_t, size_t> counts;
    for (size_t i = 0; i < s; ++i) {
      const Interpretation m = sampler.draw(rng);
      ASSERT_TRUE(evaluate(f, m));
      ++counts[m.index()];
    }
    EXPECT_LT(total_variation(target, counts, s), 0.05) << "trial " << trial << ", " << target.size() << " models";
  }
}

INSTANTIATE_TEST_SUITE_P(Routes, HashFidelity, ::testing::Values(size_t{0}, size_t{4096}));

TEST(HashSampler, SparseXorsStillSound) {
  RngStream rng(9);
  const CnfFormula f = testing::random_sat_3cnf(12, 1.5, rng);
  SamplerSpec spec;
  spec.kind = SamplerKind::kHashModel;
  spec.pivot = 8;
  spec.xor_density = 0.3;
  HashModelSampler sampler(f, WeightMap(12), spec, rng);
  for (int i = 0; i < 200; ++i) EXPECT_TRUE(evaluate(f, sampler.draw(rng)));
  spec.xor_density = 0.7;
  EXPECT_THROW(HashModelSampler(f, WeightMap(12), spec, rng), std::invalid_argument);
}

TEST(UniformSampler, ExampleFrequencies) {
  RngStream rng(10);
  const size_t s = 100000;
  std::map<uint64_t, size_t> counts;
  for (size_t i = 0; i < s; ++i) ++counts[uniform_model_sample(example_formula(), rng).index()];
  ASSERT_EQ(counts.size(), 4u);
  const double se = std::sqrt(0.25 * 0.75 / s);
  for (const auto& [code, c] : counts) EXPECT_NEAR(static_cast<double>(c) / s, 0.25, 3 * se);
}

TEST(Samplers, Deterministic) {
  const CnfFormula f = example_formula();
  const DecisionDnnf c = compile(f);
  SamplerSpec spec;
  spec.pivot = 2;
  for (int kind = 0; kind < 3; ++kind) {
    std::vector<uint64_t> a, b;
    for (auto* out : {&a, &b}) {
      RngStream rng(77);
      for (int i = 0; i < 50; ++i) {
        const Interpretation m = kind == 0   ? exact_model_sample(c, example_weights(), rng)
                                 : kind == 1 ? hash_model_sample(f, example_weights(), spec, rng)
                                             : uniform_model_sample(f, rng, spec);
        out->push_back(m.index());
      }
    }
    EXPECT_EQ(a, b);
  }
}

}  // namespace
}  // namespace wmcgrad
