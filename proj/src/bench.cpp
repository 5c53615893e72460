#include "wmcgrad/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <limits>
#include <stdexcept>
#include <thread>

#include "wmcgrad/budget.hpp"
#include "wmcgrad/circuit.hpp"
#include "wmcgrad/dimacs.hpp"
#include "wmcgrad/estimators.hpp"
#include "wmcgrad/sat.hpp"

namespace wmcgrad {
namespace {

// FNV-1a, so that RNG streams depend on instance and estimator names rather
// than on their position in a suite.
uint64_t name_hash(const std::string& s) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Runs job(i) for i in [0, count) on up to `threads` threads. Each job writes
// only its own slot, so no locking is needed.
void parallel_for(size_t count, int threads, const std::function<void(size_t)>& job) {
  const size_t t = std::min<size_t>(count, static_cast<size_t>(std::max(1, threads)));
  if (t <= 1) {
    for (size_t i = 0; i < count; ++i) job(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::vector<std::thread> pool;
  for (size_t k = 0; k < t; ++k)
    pool.emplace_back([&] {
      for (size_t i; (i = next.fetch_add(1)) < count;) job(i);
    });
  for (auto& th : pool) th.join();
}

int resolve_threads(int requested) { return requested > 0 ? requested : default_thread_count(); }

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", x);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

Cosine cosine_similarity(const GradientVector& a, const GradientVector& b) {
  if (a.num_vars() != b.num_vars()) throw std::invalid_argument("cosine_similarity: length mismatch");
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (int i = 0; i < a.num_vars(); ++i) {
    dot += a.values[i] * b.values[i];
    na += a.values[i] * a.values[i];
    nb += b.values[i] * b.values[i];
  }
  if (na == 0.0 || nb == 0.0) return {0.0, true};
  return {std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0), false};
}

const char* to_string(RunStatus s) {
  switch (s) {
    case RunStatus::kOk: return "ok";
    case RunStatus::kTimeout: return "timeout";
    case RunStatus::kError: return "error";
  }
  return "?";
}

int default_thread_count() {
  if (const char* env = std::getenv("WMCGRAD_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<Instance> load_instances(const SuiteConfig& config) {
  std::vector<Instance> out;
  for (const auto& path : config.instance_paths) {
    auto d = read_dimacs_file(path);
    Instance inst;
    inst.id = path;
    inst.phi = std::move(d.formula);
    out.push_back(std::move(inst));
  }
  return out;
}

WeightMap initial_weights(const Instance& inst, const SuiteConfig& config, uint64_t seed,
                          const WeightMap* file_weights) {
  if (config.use_file_weights && file_weights) return *file_weights;
  RngStream rng = RngStream(seed).split(name_hash(inst.id));
  InitSpec spec;
  spec.sigma = config.init_sigma;
  return init_weights(inst.phi, spec, rng).weights();
}

std::vector<BenchmarkRecord> run_grad_eval(const std::vector<Instance>& instances, const SuiteConfig& config,
                                           const std::vector<WeightMap>* file_weights) {
  if (!(config.timeout_seconds > 0)) throw std::invalid_argument("timeout must be positive");
  const int threads = resolve_threads(config.threads);
  const size_t ni = instances.size(), ne = config.estimators.size(), ns = config.seeds.size();

  // Ground truth first, one compilation per instance.
  std::vector<std::optional<DecisionDnnf>> circuits(ni);
  std::vector<std::string> failures(ni);
  parallel_for(ni, threads, [&](size_t i) {
    try {
      circuits[i].emplace(compile(instances[i].phi, config.ground_truth));
    } catch (const std::exception& e) {
      failures[i] = std::string("ground truth: ") + e.what();
    }
  });

  std::vector<BenchmarkRecord> records(ni * ne * ns);
  parallel_for(records.size(), threads, [&](size_t job) {
    const size_t i = job / (ne * ns), e = job / ns % ne, k = job % ns;
    const Instance& inst = instances[i];
    const EstimatorConfig& est = config.estimators[e];
    BenchmarkRecord& r = records[job];
    r.instance = inst.id;
    r.estimator = est.to_string();
    r.seed = config.seeds[k];
    if (!circuits[i]) {
      r.status = RunStatus::kError;
      r.message = failures[i];
      return;
    }
    const WeightMap w =
        initial_weights(inst, config, r.seed, file_weights && i < file_weights->size() ? &(*file_weights)[i] : nullptr);
    const GradientVector truth = wmc_grad(*circuits[i], w).second;
    RngStream rng = RngStream(r.seed).split(name_hash(inst.id)).split(name_hash(r.estimator));
    EstimatorOptions opts;
    opts.sampler = config.sampler;
    opts.deadline = Deadline::after(config.timeout_seconds);
    opts.compile.time_limit_seconds = config.timeout_seconds;
    Stopwatch sw;
    try {
      const EstimatorReport rep = estimate(est, inst.phi, w, rng, opts);
      r.wall_seconds = sw.seconds();
      if (r.wall_seconds > config.timeout_seconds + kTimeoutGraceSeconds) {
        r.status = RunStatus::kTimeout;
        return;
      }
      const Cosine c = cosine_similarity(truth, rep.gradient);
      r.cosine = c.value;
      r.degenerate = c.degenerate;
      r.samples_used = rep.samples_used;
    } catch (const BudgetExceeded& ex) {
      // Compilation and search budgets are time-derived here as well.
      r.wall_seconds = sw.seconds();
      r.status = RunStatus::kTimeout;
      r.message = ex.what();
    } catch (const std::exception& ex) {
      r.wall_seconds = sw.seconds();
      r.status = RunStatus::kError;
      r.message = ex.what();
    }
  });
  return records;
}

std::vector<SummaryRow> summarize(const std::vector<BenchmarkRecord>& records,
                                  const std::vector<EstimatorConfig>& estimators) {
  std::vector<SummaryRow> out;
  for (const auto& est : estimators) {
    SummaryRow s;
    s.estimator = est.to_string();
    double sum = 0.0;
    for (const auto& r : records) {
      if (r.estimator != s.estimator) continue;
      if (r.status == RunStatus::kTimeout) ++s.timeouts;
      else if (r.status == RunStatus::kError) ++s.errors;
      else {
        ++s.count;
        sum += r.cosine;
      }
    }
    if (s.count > 0) {
      s.mean = sum / static_cast<double>(s.count);
      double ss = 0.0;
      for (const auto& r : records)
        if (r.estimator == s.estimator && r.status == RunStatus::kOk) ss += (r.cosine - s.mean) * (r.cosine - s.mean);
      s.std = std::sqrt(ss / static_cast<double>(s.count));
    }
    out.push_back(s);
  }
  return out;
}

void write_grad_eval_csv(const std::vector<BenchmarkRecord>& records, const std::vector<SummaryRow>& summary,
                         std::ostream& out) {
  out << "# wmcgrad grad-eval csv v1\n";
  out << "row,instance,estimator,seed,status,cosine,std,count,degenerate,samples_used\n";
  for (const auto& r : records)
    out << "record," << csv_field(r.instance) << ',' << csv_field(r.estimator) << ',' << r.seed << ','
        << to_string(r.status) << ',' << fmt(r.cosine) << ",,1," << (r.degenerate ? 1 : 0) << ',' << r.samples_used
        << '\n';
  for (const auto& s : summary) {
    const char* status = s.timeouts ? "timeout" : s.errors ? "error" : "ok";
    out << "summary,*," << csv_field(s.estimator) << ",*," << status << ',' << fmt(s.mean) << ',' << fmt(s.std) << ','
        << s.count << ",,\n";
  }
}

void write_timing_csv(const std::vector<BenchmarkRecord>& records, std::ostream& out) {
  out << "# wmcgrad timing csv v1\n";
  out << "instance,estimator,seed,status,wall_seconds,message\n";
  for (const auto& r : records)
    out << csv_field(r.instance) << ',' << csv_field(r.estimator) << ',' << r.seed << ',' << to_string(r.status) << ','
        << fmt(r.wall_seconds) << ',' << csv_field(r.message) << '\n';
}

std::vector<OptimizeRecord> run_optimize(const std::vector<Instance>& instances, const OptimizeConfig& config) {
  if (!(config.suite.timeout_seconds > 0)) throw std::invalid_argument("timeout must be positive");
  const auto& suite = config.suite;
  const size_t ni = instances.size(), ne = suite.estimators.size(), ns = suite.seeds.size();
  std::vector<OptimizeRecord> records(ni * ne * ns);
  parallel_for(records.size(), resolve_threads(suite.threads), [&](size_t job) {
    const size_t i = job / (ne * ns), e = job / ns % ne, k = job % ns;
    const Instance& inst = instances[i];
    OptimizeRecord& r = records[job];
    r.instance = inst.id;
    r.estimator = suite.estimators[e].to_string();
    r.seed = suite.seeds[k];
    r.init = config.init.mode == InitMode::kConceptSupervised ? "supervised" : "gaussian";
    Stopwatch sw;
    try {
      // Same initial weights for every estimator at a given seed.
      RngStream init_rng = RngStream(r.seed).split(name_hash(inst.id));
      InitSpec spec = config.init;
      if (spec.mode == InitMode::kConceptSupervised && !spec.target && inst.planted.num_vars() == inst.phi.num_vars &&
          inst.phi.num_vars > 0)
        spec.target = inst.planted;
      const Params init = init_weights(inst.phi, spec, init_rng);
      RngStream rng = RngStream(r.seed).split(name_hash(inst.id)).split(name_hash(r.estimator));
      TrainConfig tc = config.train;
      tc.estimator_options.sampler = suite.sampler;
      tc.estimator_options.deadline = Deadline::after(suite.timeout_seconds);
      const TrainTrace trace = train(inst.phi, suite.estimators[e], init, tc, rng);
      r.best_nll = trace.best_nll;
      r.iterations = trace.iterations_run;
      r.solved = trace.best_nll < tc.nll_threshold;
      if (trace.timed_out) r.status = RunStatus::kTimeout;
      else if (!trace.error.empty()) r.status = RunStatus::kError;
      r.message = trace.error;
    } catch (const std::exception& ex) {
      r.status = RunStatus::kError;
      r.message = ex.what();
      r.best_nll = std::numeric_limits<double>::infinity();
    }
    r.wall_seconds = sw.seconds();
  });
  auto est_index = [&](const std::string& name) {
    for (size_t e = 0; e < ne; ++e)
      if (suite.estimators[e].to_string() == name) return e;
    return ne;
  };
  std::stable_sort(records.begin(), records.end(), [&](const OptimizeRecord& a, const OptimizeRecord& b) {
    const size_t ea = est_index(a.estimator), eb = est_index(b.estimator);
    if (ea != eb) return ea < eb;
    if (a.best_nll != b.best_nll) return a.best_nll < b.best_nll;
    if (a.instance != b.instance) return a.instance < b.instance;
    return a.seed < b.seed;
  });
  return records;
}

void write_optimize_csv(const std::vector<OptimizeRecord>& records, std::ostream& out) {
  out << "# wmcgrad optimize csv v1\n";
  out << "instance,estimator,seed,init,status,best_nll,iterations,solved\n";
  for (const auto& r : records)
    out << csv_field(r.instance) << ',' << csv_field(r.estimator) << ',' << r.seed << ',' << r.init << ','
        << to_string(r.status) << ',' << fmt(r.best_nll) << ',' << r.iterations << ',' << (r.solved ? 1 : 0) << '\n';
}

TransitionResult tractability_transition(const TransitionConfig& config, uint64_t seed) {
  RngStream root(seed);
  RngStream gen = root.split(1);
  PlantedSpec ps;
  ps.num_vars = config.num_vars;
  ps.clause_ratio = config.clause_ratio;
  const Instance inst = planted_cnf(ps, gen);
  const DecisionDnnf circuit = compile(inst.phi);
  RngStream init_rng = root.split(2);
  InitSpec is;
  is.sigma = config.init_sigma;
  Params params = init_weights(inst.phi, is, init_rng);
  RngStream rng = root.split(3);
  Optimizer opt(StepMethod::kAdam, config.lr, params.num_vars());

  TransitionResult res;
  for (int it = 0; it < config.max_iterations; ++it) {
    const WeightMap w = params.weights();
    const auto [wmc, grad] = wmc_grad(circuit, w);
    const double value = wmc.scaled();
    const double nll = -std::log(value);
    const EstimatorReport sfe = sfe_grad(inst.phi, w, config.sfe_samples, rng, config.rloo);
    res.rows.push_back({it, nll, cosine_similarity(grad, sfe.gradient).value});
    if (nll < config.stop_nll) break;
    opt.step(params, log_gradient(grad, value));
  }
  for (size_t i = res.rows.size(); i-- > 0;) {
    if (res.rows[i].cosine < config.cosine_threshold) break;
    res.crossing = res.rows[i].iteration;
    res.nll_at_crossing = res.rows[i].nll;
  }
  res.passed = res.crossing > 0 && res.rows.front().cosine < config.cosine_threshold &&
               res.nll_at_crossing < std::log(static_cast<double>(config.sfe_samples));
  return res;
}

void write_transition_csv(const TransitionResult& result, std::ostream& out) {
  out << "# wmcgrad transition csv v1\n";
  out << "iteration,nll,cosine\n";
  for (const auto& r : result.rows) out << r.iteration << ',' << fmt(r.nll) << ',' << fmt(r.cosine) << '\n';
}

}  // namespace wmcgrad
