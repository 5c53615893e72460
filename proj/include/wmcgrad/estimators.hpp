#pragma once

#include <optional>
#include <vector>

#include "wmcgrad/budget.hpp"
#include "wmcgrad/circuit.hpp"
#include "wmcgrad/estimator_config.hpp"
#include "wmcgrad/gradient.hpp"
#include "wmcgrad/logic.hpp"
#include "wmcgrad/mpe.hpp"
#include "wmcgrad/rng.hpp"
#include "wmcgrad/samplers.hpp"

namespace wmcgrad {

struct EstimatorReport {
  GradientVector gradient;  // gradient.of says whether this is of WMC or log WMC
  std::optional<double> value_estimate;
  size_t samples_used = 0;
  double wall_seconds = 0.0;
};

struct EstimatorOptions {
  // Compiled phi, when the caller already has one; estimators that need a
  // circuit compile their own otherwise.
  const DecisionDnnf* circuit = nullptr;
  CompileOptions compile;
  SamplerSpec sampler;  // hash and uniform model samplers
  MpeOptions mpe;
  Deadline deadline;
};

// One factor of a product, value f with partials df/dw(var).
struct Factor {
  double value = 1.0;
  std::vector<std::pair<int, double>> partials;
};

// 1 - prod w(~l) and its partials.
Factor clause_factor(const Clause& clause, const WeightMap& w);
// Value and gradient of a product of factors; the partials of factor i are
// scaled by the product of the other factors (prefix/suffix products, so
// zero factors are handled without division).
double product_rule(const std::vector<Factor>& factors, GradientVector& grad);

// Per-sample terms, exposed so that tests can take exact expectations.
// SFE without baseline: 1(I |= phi) * d/dw log P(I; w).
std::vector<double> sfe_term(const CnfFormula& phi, const WeightMap& w, const Interpretation& I);
// WeightME: 1(x in M)/w(x) - 1(x not in M)/(1 - w(x)), weights clamped.
std::vector<double> weightme_term(const WeightMap& w, const Interpretation& model);
// IndeCateR for variable x: 1(I[x:=1] |= phi) - 1(I[x:=0] |= phi).
double indecater_term(const CnfFormula& phi, const Interpretation& I, int var);
// Relaxed Bernoulli sample sigma((logit w + L) / temperature), L logistic.
std::vector<double> relaxed_bernoulli(const WeightMap& w, double temperature, RngStream& rng);

EstimatorReport exact_grad(const CnfFormula& phi, const WeightMap& w, const EstimatorOptions& opts = {});

// Unbiased for grad WMC. With rloo the baseline of sample i is the mean hit
// indicator of the other samples (needs s >= 2); otherwise plain REINFORCE.
EstimatorReport sfe_grad(const CnfFormula& phi, const WeightMap& w, size_t s, RngStream& rng, bool rloo = true);

// Per variable, the difference of hit indicators of one interpretation with
// x forced true and false (common random numbers for the other variables).
EstimatorReport indecater_grad(const CnfFormula& phi, const WeightMap& w, size_t s, RngStream& rng);

// Gradient of log WMC from s model samples. With the exact sampler the
// circuit's WMC is reported as value_estimate. With SamplerKind::kUniformModel
// the models are drawn uniformly; `importance` reweights them by P(M; w)
// (self-normalized), otherwise they are used as they are.
EstimatorReport weightme_grad(const CnfFormula& phi, const WeightMap& w, SamplerKind sampler, size_t s,
                              RngStream& rng, const EstimatorOptions& opts = {}, bool importance = false);

// Exact gradient of fuzzy_eval. Goedel: subgradient +-1 on the literal that
// attains the min-max; ties go to the lowest variable index.
EstimatorReport tnorm_grad(const CnfFormula& phi, const WeightMap& w, TNorm tnorm);

// Product t-norm evaluated at hard samples, gradient taken as if the samples
// were the weights.
EstimatorReport ste_grad(const CnfFormula& phi, const WeightMap& w, size_t s, RngStream& rng);

// Product t-norm at relaxed Bernoulli samples, differentiated through the
// relaxation: dy/dw = y(1 - y) / (temperature * w(1 - w)).
EstimatorReport gumbel_grad(const CnfFormula& phi, const WeightMap& w, size_t s, double temperature,
                            RngStream& rng);

// Gradient of the summed probability of the k most probable models.
EstimatorReport kbest_grad(const CnfFormula& phi, const WeightMap& w, int k, const EstimatorOptions& opts = {});
EstimatorReport koptimal_grad(const CnfFormula& phi, const WeightMap& w, int k,
                              const EstimatorOptions& opts = {});
EstimatorReport mpe_grad(const CnfFormula& phi, const WeightMap& w, const EstimatorOptions& opts = {});

// Average of 2z - 1 over s MPE models z under logistic-perturbed logits.
EstimatorReport imle_grad(const CnfFormula& phi, const WeightMap& w, size_t s, double noise_scale, RngStream& rng,
                          const EstimatorOptions& opts = {});

// Clause pairs sharing a variable are ranked by the mutual information of
// their satisfaction events; the top kappa pairs are merged into groups,
// each group is compiled, and the groups are multiplied as independent
// factors. kappa = 0 is the product t-norm.
EstimatorReport semantic_strengthening_grad(const CnfFormula& phi, const WeightMap& w, int kappa,
                                            const EstimatorOptions& opts = {});
// Mutual information (nats) between the satisfaction events of two clauses.
double clause_mutual_information(const Clause& a, const Clause& b, const WeightMap& w);

// inner(phi|x) - inner(phi|~x) per variable; inner is exact, tnorm-product,
// tnorm-goedel or gumbel (s samples, same noise in both branches).
EstimatorReport catlog_grad(const CnfFormula& phi, const WeightMap& w, EstimatorKind inner, size_t s,
                            double temperature, RngStream& rng, const EstimatorOptions& opts = {});

// Clauses satisfied by at least one of s sampled interpretations count as
// 1; the others enter through the product t-norm.
EstimatorReport sample_tnorm_hybrid_grad(const CnfFormula& phi, const WeightMap& w, size_t s, RngStream& rng);

// Dispatch on config.kind. Fills wall_seconds.
EstimatorReport estimate(const EstimatorConfig& config, const CnfFormula& phi, const WeightMap& w, RngStream& rng,
                         const EstimatorOptions& opts = {});

}  // namespace wmcgrad
