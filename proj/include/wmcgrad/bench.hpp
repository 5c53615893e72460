#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "wmcgrad/estimator_config.hpp"
#include "wmcgrad/generator.hpp"
#include "wmcgrad/gradient.hpp"
#include "wmcgrad/optimizer.hpp"

namespace wmcgrad {

struct Cosine {
  double value = 0.0;
  bool degenerate = false;  // one of the vectors is zero; value is then 0
};

// <a, b> / (|a| |b|). Throws std::invalid_argument on a length mismatch.
Cosine cosine_similarity(const GradientVector& a, const GradientVector& b);

enum class RunStatus { kOk, kTimeout, kError };
const char* to_string(RunStatus s);

// Estimator runs may overrun the per-gradient timeout by this much before
// being recorded as timeouts: deadlines are polled cooperatively, and the
// polynomial estimators do not poll at all.
inline constexpr double kTimeoutGraceSeconds = 1.0;

// Threads for suite runs: $WMCGRAD_THREADS when set and positive, otherwise
// the hardware concurrency.
int default_thread_count();

struct BenchmarkRecord {
  std::string instance;
  std::string estimator;
  uint64_t seed = 0;
  RunStatus status = RunStatus::kOk;
  double cosine = 0.0;
  bool degenerate = false;
  size_t samples_used = 0;
  double wall_seconds = 0.0;
  std::string message;  // error text for kError
};

struct SuiteConfig {
  std::vector<std::string> instance_paths;  // DIMACS files; globs are expanded by the caller
  std::vector<EstimatorConfig> estimators;
  double timeout_seconds = 300.0;
  std::vector<uint64_t> seeds{0};
  std::string output_path;
  int threads = 0;  // 0: default_thread_count()
  double init_sigma = 0.1;
  // Weights from the files instead of the Gaussian initialization.
  bool use_file_weights = false;
  SamplerSpec sampler;
  // Ground truth gets no timeout by default.
  CompileOptions ground_truth = unlimited_compile();

  static CompileOptions unlimited_compile() {
    CompileOptions o;
    o.unlimited = true;
    return o;
  }
};

// Loads the DIMACS files in config.instance_paths; ids are the paths.
std::vector<Instance> load_instances(const SuiteConfig& config);

// Weights the runs of `seed` on an instance start from.
WeightMap initial_weights(const Instance& inst, const SuiteConfig& config, uint64_t seed,
                          const WeightMap* file_weights = nullptr);

// For every (instance, estimator, seed): exact gradient by compilation, then
// the estimator under the timeout. Instances whose ground truth fails get
// one error record per estimator and seed. Records come back sorted by
// (instance order, estimator order, seed order).
std::vector<BenchmarkRecord> run_grad_eval(const std::vector<Instance>& instances, const SuiteConfig& config,
                                           const std::vector<WeightMap>* file_weights = nullptr);

struct SummaryRow {
  std::string estimator;
  size_t count = 0;     // ok runs
  size_t timeouts = 0;
  size_t errors = 0;
  double mean = 0.0;
  double std = 0.0;     // population standard deviation over ok runs
};

std::vector<SummaryRow> summarize(const std::vector<BenchmarkRecord>& records,
                                  const std::vector<EstimatorConfig>& estimators);

// CSV layout, version 1. The first line is "# wmcgrad grad-eval csv v1".
// Columns: row,instance,estimator,seed,status,cosine,std,count,degenerate,samples_used
// "record" rows carry one run; "summary" rows carry mean (in cosine) and std
// over the ok runs of an estimator, with count, and status "timeout" or
// "error" if any run of that estimator had one. Wall times are not in this
// file so that repeated runs compare byte for byte; write_timing_csv emits
// them separately.
void write_grad_eval_csv(const std::vector<BenchmarkRecord>& records, const std::vector<SummaryRow>& summary,
                         std::ostream& out);
void write_timing_csv(const std::vector<BenchmarkRecord>& records, std::ostream& out);

struct OptimizeConfig {
  SuiteConfig suite;
  TrainConfig train;     // iterations default to 10^4 in the CLI
  InitSpec init;         // mode, sigma and supervision fraction
};

struct OptimizeRecord {
  std::string instance;
  std::string estimator;
  uint64_t seed = 0;
  std::string init;      // "gaussian" or "supervised"
  RunStatus status = RunStatus::kOk;
  double best_nll = 0.0;
  int iterations = 0;
  bool solved = false;   // best_nll below the training threshold
  double wall_seconds = 0.0;
  std::string message;
};

// One training run per (instance, estimator, seed). Concept supervision
// targets the instance's planted model when it has one. Sorted by
// (estimator order, best_nll, instance, seed): per estimator, best to worst.
std::vector<OptimizeRecord> run_optimize(const std::vector<Instance>& instances, const OptimizeConfig& config);

// "# wmcgrad optimize csv v1", then
// instance,estimator,seed,init,status,best_nll,iterations,solved
void write_optimize_csv(const std::vector<OptimizeRecord>& records, std::ostream& out);

// Exact-gradient training on a planted formula while the SFE estimate is
// compared against the exact gradient at every iteration.
struct TransitionConfig {
  int num_vars = 20;
  double clause_ratio = 4.2;
  size_t sfe_samples = 1000;
  bool rloo = false;
  double cosine_threshold = 0.9;
  double stop_nll = 0.05;
  int max_iterations = 5000;
  double lr = 0.05;
  double init_sigma = 0.1;
};

struct TransitionRow {
  int iteration = 0;
  double nll = 0.0;
  double cosine = 0.0;
};

struct TransitionResult {
  std::vector<TransitionRow> rows;
  // First iteration from which the cosine stays at or above the threshold
  // until training stops; -1 if the last row is below it.
  int crossing = -1;
  double nll_at_crossing = 0.0;
  // The run starts below the threshold, crosses, and crosses only once NLL
  // is below ln(sfe_samples), the point where a model is expected among the
  // samples.
  bool passed = false;
};

TransitionResult tractability_transition(const TransitionConfig& config, uint64_t seed);
void write_transition_csv(const TransitionResult& result, std::ostream& out);

}  // namespace wmcgrad
