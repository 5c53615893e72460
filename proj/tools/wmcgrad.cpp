// wmcgrad command-line entry point.
//
//   wmcgrad count <file.cnf>
//   wmcgrad sample <file.cnf> [--sampler exact|hash|uniform] [--count N] [--seed S]
//   wmcgrad grad-eval [files...] [--suite random|single] [--estimators ...] [--seeds ...]
//   wmcgrad optimize [files...] [--suite optimization] [--supervision 0.9] ...
//   wmcgrad transition [--seeds ...]
//
// Exit codes: 0 success, 1 bad input or unsatisfiable (sample), 2 missing file.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "wmcgrad/bench.hpp"
#include "wmcgrad/circuit.hpp"
#include "wmcgrad/dimacs.hpp"
#include "wmcgrad/generator.hpp"
#include "wmcgrad/samplers.hpp"

using namespace wmcgrad;

namespace {

struct MissingFile : std::runtime_error {
  using std::runtime_error::runtime_error;
};

DimacsInstance load(const std::string& path) {
  if (!std::filesystem::exists(path)) throw MissingFile("no such file: " + path);
  return read_dimacs_file(path);
}

std::string literal_line(const Interpretation& m) {
  std::string line;
  for (int v = 1; v <= m.num_vars(); ++v) line += (m.value(v) ? "" : "-") + std::to_string(v) + " ";
  return line + "0";
}

// Writes to `path`, or stdout when it is empty or "-".
template <class F>
void emit(const std::string& path, F&& write) {
  if (path.empty() || path == "-") {
    write(std::cout);
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  write(out);
}

std::vector<EstimatorConfig> parse_estimators(const std::vector<std::string>& specs) {
  std::vector<EstimatorConfig> out;
  for (const auto& s : specs) out.push_back(EstimatorConfig::parse(s));
  return out;
}

const std::vector<std::string> kGradEvalDefaults = {
    "exact", "weightme:s=100", "uniform-model:s=100", "mpe", "koptimal:k=100", "tnorm-product", "tnorm-goedel",
    "ste:s=10", "gumbel:s=10,temp=2", "sfe:s=10000", "semantic-strengthening:kappa=100"};
const std::vector<std::string> kOptimizeDefaults = {"exact", "weightme:s=10", "tnorm-product", "tnorm-goedel",
                                                    "ste:s=10", "gumbel:s=10,temp=2"};

std::vector<Instance> suite_instances(const std::vector<std::string>& paths, const std::string& suite, int size,
                                      uint64_t suite_seed, std::vector<WeightMap>* file_weights) {
  std::vector<Instance> out;
  for (const auto& p : paths) {
    auto d = load(p);
    Instance inst;
    inst.id = p;
    inst.phi = std::move(d.formula);
    if (file_weights) file_weights->push_back(d.weights);
    out.push_back(std::move(inst));
  }
  if (suite == "random") {
    for (auto& i : random_suite(size, 50, 200, suite_seed)) out.push_back(std::move(i));
  } else if (suite == "single") {
    for (auto& i : single_model_suite(size, 20, suite_seed)) out.push_back(std::move(i));
  } else if (suite == "optimization") {
    for (auto& i : optimization_suite(suite_seed)) out.push_back(std::move(i));
  } else if (!suite.empty()) {
    throw std::invalid_argument("unknown suite '" + suite + "'");
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weighted model counting and its gradients"};
  app.require_subcommand(1);

  // count
  auto* count = app.add_subcommand("count", "Exact weighted model count of a DIMACS file");
  std::string count_path;
  double count_timeout = 300.0;
  count->add_option("path", count_path, "DIMACS file")->required();
  count->add_option("--timeout", count_timeout, "Compilation time limit in seconds");

  // sample
  auto* sample = app.add_subcommand("sample", "Draw models of a DIMACS file");
  std::string sample_path, sampler_name = "exact";
  size_t sample_count = 10;
  uint64_t sample_seed = 0;
  sample->add_option("path", sample_path, "DIMACS file")->required();
  sample->add_option("--sampler", sampler_name, "exact, hash or uniform")->capture_default_str();
  sample->add_option("--count,-n", sample_count, "Number of models")->capture_default_str();
  sample->add_option("--seed", sample_seed, "RNG seed")->capture_default_str();

  // shared suite flags
  struct SuiteFlags {
    std::vector<std::string> paths;
    std::vector<std::string> estimators;
    std::string suite;
    int suite_size = 20;
    uint64_t suite_seed = 1;
    double timeout = 300.0;
    std::vector<uint64_t> seeds{0};
    std::string out;
    std::string timing_out;
    int threads = 0;
    bool file_weights = false;
  };
  auto add_suite_flags = [](CLI::App* cmd, SuiteFlags& f) {
    cmd->add_option("paths", f.paths, "DIMACS files");
    cmd->add_option("--estimators,-e", f.estimators, "Estimator specs, e.g. weightme:s=100,sampler=hash");
    cmd->add_option("--suite", f.suite, "Generated suite: random, single or optimization");
    cmd->add_option("--suite-size", f.suite_size, "Instances in a generated suite")->capture_default_str();
    cmd->add_option("--suite-seed", f.suite_seed, "Seed of the generated suite")->capture_default_str();
    cmd->add_option("--timeout", f.timeout, "Per-gradient (grad-eval) or per-run (optimize) limit, seconds")
        ->capture_default_str();
    cmd->add_option("--seeds", f.seeds, "Seeds")->expected(1, -1);
    cmd->add_option("--out,-o", f.out, "CSV output path (default stdout)");
    cmd->add_option("--timing-out", f.timing_out, "Wall-time CSV path");
    cmd->add_option("--threads", f.threads, "Worker threads (default $WMCGRAD_THREADS or all cores)");
    cmd->add_flag("--file-weights", f.file_weights, "Use the weights in the files instead of N(1/2, sigma)");
  };

  auto* grad_eval = app.add_subcommand("grad-eval", "Cosine similarity of estimators to the exact gradient");
  SuiteFlags ge;
  add_suite_flags(grad_eval, ge);
  double ge_sigma = 0.1;
  grad_eval->add_option("--sigma", ge_sigma, "Std of the Gaussian weight initialization")->capture_default_str();

  auto* optimize = app.add_subcommand("optimize", "Maximize log WMC with each estimator");
  SuiteFlags op;
  add_suite_flags(optimize, op);
  int iterations = 10000;
  double lr = 0.05, supervision = 0.0, op_sigma = 0.1, threshold = 1e-2;
  std::string method = "adam";
  optimize->add_option("--iterations", iterations, "Maximum iterations")->capture_default_str();
  optimize->add_option("--lr", lr, "Learning rate")->capture_default_str();
  optimize->add_option("--method", method, "adam or sgd")->capture_default_str();
  optimize->add_option("--supervision", supervision, "Concept-supervised fraction; 0 disables")->capture_default_str();
  optimize->add_option("--sigma", op_sigma, "Std of the Gaussian weight initialization")->capture_default_str();
  optimize->add_option("--threshold", threshold, "Early-stop NLL")->capture_default_str();

  auto* transition = app.add_subcommand("transition", "SFE cosine along exact-gradient training");
  std::vector<uint64_t> tr_seeds{0};
  std::string tr_out;
  TransitionConfig tr;
  transition->add_option("--seeds", tr_seeds, "Seeds")->expected(1, -1);
  transition->add_option("--vars", tr.num_vars, "Variables")->capture_default_str();
  transition->add_option("--samples", tr.sfe_samples, "SFE samples")->capture_default_str();
  transition->add_flag("--rloo", tr.rloo, "Leave-one-out baseline for the SFE");
  transition->add_option("--stop-nll", tr.stop_nll, "Stop training below this NLL")->capture_default_str();
  transition->add_option("--out,-o", tr_out, "Per-iteration CSV of the first seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (count->parsed()) {
      const auto d = load(count_path);
      CompileOptions co;
      co.time_limit_seconds = count_timeout;
      Stopwatch sw;
      const DecisionDnnf c = compile(d.formula, co);
      WmcResult r = wmc_eval(c, d.weights);
      r.normalization_exponent += d.normalization_exponent;
      std::printf("%.15g\n", r.scaled());
      std::fprintf(stderr, "c nodes %zu decisions %zu cache_hits %zu\nc seconds %.3f\n", c.stats().node_count,
                   c.stats().decision_nodes, c.stats().cache_hits, sw.seconds());
      return 0;
    }
    if (sample->parsed()) {
      const auto d = load(sample_path);
      const SamplerKind kind = sampler_kind_from_string(sampler_name);
      RngStream rng(sample_seed);
      if (kind == SamplerKind::kExactModel) {
        const DecisionDnnf c = compile(d.formula);
        const ExactModelSampler s(c, d.weights);
        for (size_t i = 0; i < sample_count; ++i) std::puts(literal_line(s.draw(rng)).c_str());
      } else if (kind == SamplerKind::kHashModel || kind == SamplerKind::kUniformModel) {
        SamplerSpec spec;
        spec.kind = kind;
        const WeightMap w = kind == SamplerKind::kUniformModel ? WeightMap(d.formula.num_vars) : d.weights;
        HashModelSampler s(d.formula, w, spec, rng);
        for (size_t i = 0; i < sample_count; ++i) std::puts(literal_line(s.draw(rng)).c_str());
      } else {
        throw std::invalid_argument("sample needs a model sampler: exact, hash or uniform");
      }
      return 0;
    }
    if (grad_eval->parsed() || optimize->parsed()) {
      SuiteFlags& f = grad_eval->parsed() ? ge : op;
      std::vector<WeightMap> file_weights;
      const auto instances = suite_instances(f.paths, f.suite, f.suite_size, f.suite_seed, &file_weights);
      if (instances.empty()) throw std::invalid_argument("no instances: give DIMACS files or --suite");
      SuiteConfig sc;
      sc.timeout_seconds = f.timeout;
      sc.seeds = f.seeds;
      sc.threads = f.threads;
      sc.use_file_weights = f.file_weights;
      sc.output_path = f.out;
      if (grad_eval->parsed()) {
        sc.estimators = parse_estimators(f.estimators.empty() ? kGradEvalDefaults : f.estimators);
        sc.init_sigma = ge_sigma;
        file_weights.resize(instances.size());
        const auto records = run_grad_eval(instances, sc, &file_weights);
        const auto summary = summarize(records, sc.estimators);
        emit(f.out, [&](std::ostream& o) { write_grad_eval_csv(records, summary, o); });
        if (!f.timing_out.empty()) emit(f.timing_out, [&](std::ostream& o) { write_timing_csv(records, o); });
      } else {
        sc.estimators = parse_estimators(f.estimators.empty() ? kOptimizeDefaults : f.estimators);
        OptimizeConfig oc;
        oc.suite = sc;
        oc.train.iterations = iterations;
        oc.train.lr = lr;
        oc.train.nll_threshold = threshold;
        if (method == "adam") oc.train.method = StepMethod::kAdam;
        else if (method == "sgd") oc.train.method = StepMethod::kSgd;
        else throw std::invalid_argument("method must be adam or sgd");
        oc.init.sigma = op_sigma;
        if (supervision > 0) {
          oc.init.mode = InitMode::kConceptSupervised;
          oc.init.fraction = supervision;
        }
        const auto records = run_optimize(instances, oc);
        emit(f.out, [&](std::ostream& o) { write_optimize_csv(records, o); });
      }
      return 0;
    }
    if (transition->parsed()) {
      int passed = 0;
      for (size_t i = 0; i < tr_seeds.size(); ++i) {
        const auto r = tractability_transition(tr, tr_seeds[i]);
        passed += r.passed;
        std::printf("seed %llu crossing %d nll_at_crossing %.4f iterations %zu %s\n",
                    static_cast<unsigned long long>(tr_seeds[i]), r.crossing, r.nll_at_crossing, r.rows.size(),
                    r.passed ? "pass" : "fail");
        if (i == 0 && !tr_out.empty()) emit(tr_out, [&](std::ostream& o) { write_transition_csv(r, o); });
      }
      std::printf("passed %d/%zu\n", passed, tr_seeds.size());
      return 0;
    }
  } catch (const MissingFile& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const UnsatError&) {
    std::fprintf(stderr, "error: formula is unsatisfiable\n");
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
