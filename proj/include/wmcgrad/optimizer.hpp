#pragma once

#include <optional>
#include <string>
#include <vector>

#include "wmcgrad/estimators.hpp"
#include "wmcgrad/logic.hpp"
#include "wmcgrad/rng.hpp"

namespace wmcgrad {

// w(x) = sigmoid(logit(x)); the induced weights are always in (0, 1).
struct Params {
  std::vector<double> logits;

  static Params from_weights(const WeightMap& w);
  WeightMap weights() const;
  int num_vars() const { return static_cast<int>(logits.size()); }
};

enum class InitMode { kGaussianHalf, kConceptSupervised };

struct InitSpec {
  InitMode mode = InitMode::kGaussianHalf;
  double sigma = 0.1;
  double fraction = 0.9;      // concept-supervised: share of supervised variables
  double confidence = 0.9;    // weight put on the target model's literal
  std::optional<Interpretation> target;  // default: first model found by the SAT solver
};

// gaussian-half: w = clamp(0.5 + N(0, sigma), 0.001, 0.999). Concept
// supervision first draws the same Gaussian weights, then sets a random
// ceil(fraction * n) subset of variables to `confidence` toward the target
// model. Throws UnsatError in supervised mode when phi has no model.
Params init_weights(const CnfFormula& phi, const InitSpec& spec, RngStream& rng);

enum class StepMethod { kSgd, kAdam };

// Gradient ascent on log WMC in logit space: d logit = grad_w * w(1 - w).
// Adam uses beta1 = 0.9, beta2 = 0.999, eps = 1e-8.
class Optimizer {
 public:
  Optimizer(StepMethod method, double lr, int num_vars);
  // Throws std::invalid_argument on a non-finite gradient.
  void step(Params& params, const GradientVector& grad_log_wmc);

 private:
  StepMethod method_;
  double lr_;
  std::vector<double> m_, v_;
  long t_ = 0;
};

// Single stateless step; with kAdam this is the first step of a fresh state.
Params step(const Params& params, const GradientVector& grad_log_wmc, double lr, StepMethod method);

struct TraceRow {
  int iteration = 0;
  double nll = 0.0;        // -ln WMC at the weights before the step
  double grad_norm = 0.0;  // of the log-WMC gradient that was applied
  double wall_ms = 0.0;    // since the start of training
};

struct TrainTrace {
  std::vector<TraceRow> rows;
  double best_nll = 0.0;
  int iterations_run = 0;
  bool exact_nll = false;  // NLL from the compiled circuit rather than the estimator
  bool converged = false;  // reached the early-stop threshold
  std::string error;       // set when the estimator failed and training stopped
  bool timed_out = false;  // estimator_options.deadline passed; error is set too
  Params final_params;
};

struct TrainConfig {
  int iterations = 1000;
  double lr = 0.05;
  StepMethod method = StepMethod::kAdam;
  double nll_threshold = 1e-2;
  bool track_exact = true;  // compile phi once to report exact NLL
  // Its deadline bounds the whole run and is also checked between iterations.
  EstimatorOptions estimator_options;
};

// Repeats: record NLL, early-stop below the threshold, estimate, step.
// Gradients of WMC are turned into gradients of log WMC by dividing by the
// exact WMC when it is tracked, else by the estimator's value when positive.
TrainTrace train(const CnfFormula& phi, const EstimatorConfig& estimator, const Params& init,
                 const TrainConfig& config, RngStream& rng);

void write_trace_csv(const TrainTrace& trace, std::ostream& out);

}  // namespace wmcgrad
