#include "wmcgrad/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "wmcgrad/sat.hpp"

namespace wmcgrad {
namespace {

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

void check_finite(const GradientVector& g) {
  for (double x : g.values)
    if (!std::isfinite(x)) throw std::invalid_argument("non-finite gradient");
}

}  // namespace

Params Params::from_weights(const WeightMap& w) {
  Params p;
  p.logits.resize(w.num_vars());
  for (int v = 1; v <= w.num_vars(); ++v) {
    const double q = std::clamp(w.prob(v), 1e-12, 1.0 - 1e-12);
    p.logits[v - 1] = std::log(q) - std::log1p(-q);
  }
  return p;
}

WeightMap Params::weights() const {
  std::vector<double> probs(logits.size());
  for (size_t i = 0; i < logits.size(); ++i) probs[i] = sigmoid(logits[i]);
  return WeightMap(std::move(probs));
}

Params init_weights(const CnfFormula& phi, const InitSpec& spec, RngStream& rng) {
  if (!(spec.fraction >= 0 && spec.fraction <= 1)) throw std::invalid_argument("fraction must lie in [0, 1]");
  const int n = phi.num_vars;
  WeightMap w(n);
  for (int v = 1; v <= n; ++v) w.set(v, std::clamp(0.5 + spec.sigma * rng.normal(), 0.001, 0.999));
  if (spec.mode == InitMode::kConceptSupervised) {
    Interpretation target;
    if (spec.target) {
      target = *spec.target;
    } else {
      const auto r = solve(SatInstance{phi, {}, {}});
      if (!r.satisfiable) throw UnsatError();
      target = r.model;
    }
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 1);
    for (int i = n - 1; i > 0; --i) std::swap(order[i], order[rng.below(static_cast<uint64_t>(i) + 1)]);
    const int count = static_cast<int>(std::ceil(spec.fraction * n - 1e-9));
    for (int i = 0; i < count; ++i) {
      const int v = order[i];
      w.set(v, target.value(v) ? spec.confidence : 1.0 - spec.confidence);
    }
  }
  return Params::from_weights(w);
}

Optimizer::Optimizer(StepMethod method, double lr, int num_vars)
    : method_(method), lr_(lr), m_(num_vars, 0.0), v_(num_vars, 0.0) {}

void Optimizer::step(Params& params, const GradientVector& g) {
  check_finite(g);
  if (g.num_vars() != params.num_vars()) throw std::invalid_argument("gradient length mismatch");
  ++t_;
  constexpr double b1 = 0.9, b2 = 0.999, eps = 1e-8;
  for (int i = 0; i < params.num_vars(); ++i) {
    const double w = sigmoid(params.logits[i]);
    const double d = g.values[i] * w * (1.0 - w);
    if (method_ == StepMethod::kSgd) {
      params.logits[i] += lr_ * d;
      continue;
    }
    m_[i] = b1 * m_[i] + (1 - b1) * d;
    v_[i] = b2 * v_[i] + (1 - b2) * d * d;
    const double mh = m_[i] / (1 - std::pow(b1, static_cast<double>(t_)));
    const double vh = v_[i] / (1 - std::pow(b2, static_cast<double>(t_)));
    params.logits[i] += lr_ * mh / (std::sqrt(vh) + eps);
  }
}

Params step(const Params& params, const GradientVector& grad_log_wmc, double lr, StepMethod method) {
  Optimizer opt(method, lr, params.num_vars());
  Params out = params;
  opt.step(out, grad_log_wmc);
  return out;
}

TrainTrace train(const CnfFormula& phi, const EstimatorConfig& estimator, const Params& init,
                 const TrainConfig& config, RngStream& rng) {
  if (config.iterations < 1) throw std::invalid_argument("iterations must be at least 1");
  TrainTrace trace;
  trace.best_nll = std::numeric_limits<double>::infinity();
  std::optional<DecisionDnnf> circuit;
  if (config.track_exact) {
    try {
      circuit.emplace(compile(phi, config.estimator_options.compile));
      trace.exact_nll = true;
    } catch (const BudgetExceeded&) {
    }
  }
  EstimatorOptions opts = config.estimator_options;
  if (circuit) opts.circuit = &*circuit;
  Optimizer opt(config.method, config.lr, init.num_vars());
  Params params = init;
  Stopwatch sw;
  for (int it = 0; it < config.iterations; ++it) {
    const WeightMap w = params.weights();
    std::optional<double> exact_wmc;
    double exact_nll = 0.0, estimated_wmc = 0.0;
    if (circuit) {
      const WmcResult r = wmc_eval(*circuit, w);
      exact_wmc = r.scaled();
      exact_nll = r.value > 0 ? -(std::log(r.value) + r.normalization_exponent * std::log(2.0))
                              : std::numeric_limits<double>::infinity();
    }
    EstimatorReport report;
    bool failed = false;
    if (!exact_wmc || exact_nll >= config.nll_threshold) {
      try {
        opts.deadline.check();
        report = estimate(estimator, phi, w, rng, opts);
        if (report.value_estimate) estimated_wmc = *report.value_estimate;
      } catch (const TimeoutError& e) {
        trace.error = e.what();
        trace.timed_out = true;
        failed = true;
      } catch (const std::exception& e) {
        trace.error = e.what();
        failed = true;
      }
    }
    const double wmc = exact_wmc ? *exact_wmc : estimated_wmc;
    TraceRow row;
    row.iteration = it;
    if (exact_wmc) row.nll = exact_nll;
    else row.nll = wmc > 0 ? -std::log(wmc) : std::numeric_limits<double>::infinity();
    trace.best_nll = std::min(trace.best_nll, row.nll);
    trace.iterations_run = it + 1;
    if (failed) {
      row.wall_ms = sw.millis();
      trace.rows.push_back(row);
      break;
    }
    if (row.nll < config.nll_threshold) {
      trace.converged = true;
      row.wall_ms = sw.millis();
      trace.rows.push_back(row);
      break;
    }
    GradientVector g = report.gradient;
    if (g.of == GradientOf::kWmc) {
      if (wmc > 0) {
        for (double& x : g.values) x /= wmc;
      }
      g.of = GradientOf::kLogWmc;
    }
    double norm = 0.0;
    for (double x : g.values) norm += x * x;
    row.grad_norm = std::sqrt(norm);
    try {
      opt.step(params, g);
    } catch (const std::exception& e) {
      trace.error = e.what();
      row.wall_ms = sw.millis();
      trace.rows.push_back(row);
      break;
    }
    row.wall_ms = sw.millis();
    trace.rows.push_back(row);
  }
  trace.final_params = params;
  return trace;
}

void write_trace_csv(const TrainTrace& trace, std::ostream& out) {
  out << "iteration,nll,grad_norm,wall_ms\n";
  char buf[128];
  for (const auto& r : trace.rows) {
    std::snprintf(buf, sizeof buf, "%d,%.10g,%.10g,%.3f\n", r.iteration, r.nll, r.grad_norm, r.wall_ms);
    out << buf;
  }
}

}  // namespace wmcgrad
