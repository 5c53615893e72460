#include "wmcgrad/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <tuple>

namespace wmcgrad {
namespace {

void require_samples(size_t s, size_t min = 1) {
  if (s < min) throw std::invalid_argument("sample count must be at least " + std::to_string(min));
}

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double logit(double p) { return std::log(p) - std::log1p(-p); }

WeightMap binary_weights(const Interpretation& I) {
  WeightMap z(I.num_vars());
  for (int v = 1; v <= I.num_vars(); ++v) z.set(v, I.value(v) ? 1.0 : 0.0);
  return z;
}

double product_tnorm(const CnfFormula& phi, const WeightMap& w, GradientVector& grad) {
  std::vector<Factor> factors;
  factors.reserve(phi.clauses.size());
  for (const Clause& c : phi.clauses) factors.push_back(clause_factor(c, w));
  return product_rule(factors, grad);
}

void scale(GradientVector& g, double f) {
  for (double& x : g.values) x *= f;
}

// Gradient of sum_M P(M; w) over a set of full models.
EstimatorReport model_sum_grad(const std::vector<Interpretation>& models, const WeightMap& w) {
  const int n = w.num_vars();
  EstimatorReport r;
  r.gradient = GradientVector(n, GradientOf::kWmc);
  double total = 0.0;
  std::vector<double> prefix(n + 1);
  for (const auto& m : models) {
    prefix[0] = 1.0;
    for (int v = 1; v <= n; ++v) prefix[v] = prefix[v - 1] * w(Literal(v, m.value(v)));
    total += prefix[n];
    double suffix = 1.0;
    for (int v = n; v >= 1; --v) {
      const double others = prefix[v - 1] * suffix;
      r.gradient[v] += m.value(v) ? others : -others;
      suffix *= w(Literal(v, m.value(v)));
    }
  }
  r.value_estimate = total;
  r.samples_used = models.size();
  return r;
}

struct OwnedCircuit {
  std::optional<DecisionDnnf> owned;
  const DecisionDnnf* ptr = nullptr;
};

OwnedCircuit circuit_for(const CnfFormula& phi, const EstimatorOptions& opts) {
  OwnedCircuit c;
  if (opts.circuit) {
    c.ptr = opts.circuit;
    return c;
  }
  CompileOptions co = opts.compile;
  if (opts.deadline.bounded())
    co.time_limit_seconds = std::min(co.time_limit_seconds, std::max(1e-3, opts.deadline.remaining_seconds()));
  c.owned.emplace(compile(phi, co));
  c.ptr = &*c.owned;
  return c;
}

MpeOptions mpe_options(const EstimatorOptions& opts) {
  MpeOptions m = opts.mpe;
  if (opts.deadline.bounded() && !m.deadline.bounded()) m.deadline = opts.deadline;
  return m;
}

}  // namespace

Factor clause_factor(const Clause& clause, const WeightMap& w) {
  Factor f;
  const size_t k = clause.size();
  double miss = 1.0;
  for (Literal l : clause) miss *= w(~l);
  f.value = 1.0 - miss;
  // d(1 - prod w(~l))/dw(x) = +-prod_{others} w(~l'), sign + for positive x.
  std::vector<double> prefix(k + 1, 1.0);
  for (size_t i = 0; i < k; ++i) prefix[i + 1] = prefix[i] * w(~clause[i]);
  double suffix = 1.0;
  f.partials.resize(k);
  for (size_t i = k; i-- > 0;) {
    const double others = prefix[i] * suffix;
    f.partials[i] = {clause[i].var(), clause[i].positive() ? others : -others};
    suffix *= w(~clause[i]);
  }
  return f;
}

double product_rule(const std::vector<Factor>& factors, GradientVector& grad) {
  const size_t m = factors.size();
  std::vector<double> prefix(m + 1, 1.0);
  for (size_t i = 0; i < m; ++i) prefix[i + 1] = prefix[i] * factors[i].value;
  double suffix = 1.0;
  for (size_t i = m; i-- > 0;) {
    const double others = prefix[i] * suffix;
    if (others != 0.0)
      for (auto [var, d] : factors[i].partials) grad[var] += d * others;
    suffix *= factors[i].value;
  }
  return prefix[m];
}

std::vector<double> sfe_term(const CnfFormula& phi, const WeightMap& w, const Interpretation& I) {
  const WeightMap wc = w.clamped();
  std::vector<double> out(w.num_vars(), 0.0);
  if (!evaluate(phi, I)) return out;
  for (int v = 1; v <= w.num_vars(); ++v) out[v - 1] = I.value(v) ? 1.0 / wc.prob(v) : -1.0 / (1.0 - wc.prob(v));
  return out;
}

std::vector<double> weightme_term(const WeightMap& w, const Interpretation& model) {
  const WeightMap wc = w.clamped();
  std::vector<double> out(w.num_vars());
  for (int v = 1; v <= w.num_vars(); ++v)
    out[v - 1] = model.value(v) ? 1.0 / wc.prob(v) : -1.0 / (1.0 - wc.prob(v));
  return out;
}

double indecater_term(const CnfFormula& phi, const Interpretation& I, int var) {
  Interpretation hi = I, lo = I;
  hi.set(var, true);
  lo.set(var, false);
  return (evaluate(phi, hi) ? 1.0 : 0.0) - (evaluate(phi, lo) ? 1.0 : 0.0);
}

std::vector<double> relaxed_bernoulli(const WeightMap& w, double temperature, RngStream& rng) {
  if (!(temperature > 0)) throw std::invalid_argument("temperature must be positive");
  const WeightMap wc = w.clamped();
  std::vector<double> y(w.num_vars());
  for (int v = 1; v <= w.num_vars(); ++v) y[v - 1] = sigmoid((logit(wc.prob(v)) + rng.logistic()) / temperature);
  return y;
}

EstimatorReport exact_grad(const CnfFormula& phi, const WeightMap& w, const EstimatorOptions& opts) {
  const auto c = circuit_for(phi, opts);
  auto [res, grad] = wmc_grad(*c.ptr, w);
  EstimatorReport r;
  r.gradient = std::move(grad);
  r.value_estimate = res.value;
  return r;
}

EstimatorReport sfe_grad(const CnfFormula& phi, const WeightMap& w, size_t s, RngStream& rng, bool rloo) {
  require_samples(s, rloo ? 2 : 1);
  const int n = w.num_vars();
  const WeightMap wc = w.clamped();
  const auto samples = sample_interpretations(w, s, rng);
  std::vector<double> f(s);
  double hits = 0.0;
  for (size_t i = 0; i < s; ++i) hits += f[i] = evaluate(phi, samples[i]) ? 1.0 : 0.0;
  EstimatorReport r;
  r.gradient = GradientVector(n, GradientOf::kWmc);
  for (size_t i = 0; i < s; ++i) {
    const double coef = rloo ? f[i] - (hits - f[i]) / static_cast<double>(s - 1) : f[i];
    if (coef == 0.0) continue;
    for (int v = 1; v <= n; ++v)
      r.gradient[v] += coef * (samples[i].value(v) ? 1.0 / wc.prob(v) : -1.0 / (1.0 - wc.prob(v)));
  }
  scale(r.gradient, 1.0 / static_cast<double>(s));
  r.value_estimate = hits / static_cast<double>(s);
  r.samples_used = s;
  return r;
}

EstimatorReport indecater_grad(const CnfFormula& phi, const WeightMap& w, size_t s, RngStream& rng) {
  require_samples(s);
  const int n = w.num_vars();
  std::vector<std::vector<int>> pos(n + 1), neg(n + 1);
  for (size_t c = 0; c < phi.clauses.size(); ++c)
    for (Literal l : phi.clauses[c]) (l.positive() ? pos : neg)[l.var()].push_back(static_cast<int>(c));
  EstimatorReport r;
  r.gradient = GradientVector(n, GradientOf::kWmc);
  std::vector<int> true_count(phi.clauses.size());
  double hits = 0.0;
  for (const auto& I : sample_interpretations(w, s, rng)) {
    long unsat = 0;
    for (size_t c = 0; c < phi.clauses.size(); ++c) {
      int t = 0;
      for (Literal l : phi.clauses[c]) t += I.satisfies(l) ? 1 : 0;
      true_count[c] = t;
      if (t == 0) ++unsat;
    }
    hits += unsat == 0 ? 1.0 : 0.0;
    for (int v = 1; v <= n; ++v) {
      // Clauses that the current value of v alone satisfies, and clauses
      // unsatisfied now that the flipped value would satisfy.
      const auto& same = I.value(v) ? pos[v] : neg[v];
      const auto& other = I.value(v) ? neg[v] : pos[v];
      long flipped = unsat;
      for (int c : other)
        if (true_count[c] == 0) --flipped;
      for (int c : same)
        if (true_count[c] == 1) ++flipped;
      const double f_cur = unsat == 0 ? 1.0 : 0.0;
      const double f_flip = flipped == 0 ? 1.0 : 0.0;
      r.gradient[v] += I.value(v) ? f_cur - f_flip : f_flip - f_cur;
    }
  }
  scale(r.gradient, 1.0 / static_cast<double>(s));
  r.value_estimate = hits / static_cast<double>(s);
  r.samples_used = s;
  return r;
}

EstimatorReport weightme_grad(const CnfFormula& phi, const WeightMap& w, SamplerKind sampler, size_t s,
                              RngStream& rng, const EstimatorOptions& opts, bool importance) {
  require_samples(s);
  const int n = w.num_vars();
  EstimatorReport r;
  r.gradient = GradientVector(n, GradientOf::kLogWmc);
  std::vector<Interpretation> models;
  models.reserve(s);
  switch (sampler) {
    case SamplerKind::kExactModel: {
      const auto c = circuit_for(phi, opts);
      ExactModelSampler es(*c.ptr, w);
      r.value_estimate = es.wmc();
      for (size_t i = 0; i < s; ++i) models.push_back(es.draw(rng));
      break;
    }
    case SamplerKind::kHashModel:
    case SamplerKind::kUniformModel: {
      SamplerSpec spec = opts.sampler;
      if (opts.deadline.bounded()) spec.solver.deadline = opts.deadline;
      HashModelSampler hs(phi, sampler == SamplerKind::kHashModel ? w : WeightMap(n, 0.5), spec, rng);
      for (size_t i = 0; i < s; ++i) {
        opts.deadline.check();
        models.push_back(hs.draw(rng));
      }
      break;
    }
    case SamplerKind::kInterpretation:
      throw std::invalid_argument("weightme needs a model sampler");
  }
  std::vector<double> coef(models.size(), 1.0 / static_cast<double>(models.size()));
  if (importance && sampler == SamplerKind::kUniformModel) {
    std::vector<double> lp(models.size());
    for (size_t i = 0; i < models.size(); ++i) lp[i] = log_interpretation_prob(models[i], w);
    const double mx = *std::max_element(lp.begin(), lp.end());
    double total = 0.0;
    for (size_t i = 0; i < models.size(); ++i) total += coef[i] = std::exp(lp[i] - mx);
    for (double& c : coef) c /= total;
  }
  for (size_t i = 0; i < models.size(); ++i) {
    const auto t = weightme_term(w, models[i]);
    for (int v = 1; v <= n; ++v) r.gradient[v] += coef[i] * t[v - 1];
  }
  r.samples_used = s;
  return r;
}

EstimatorReport tnorm_grad(const CnfFormula& phi, const WeightMap& w, TNorm tnorm) {
  EstimatorReport r;
  r.gradient = GradientVector(w.num_vars(), GradientOf::kWmc);
  if (tnorm == TNorm::kProduct) {
    r.value_estimate = product_tnorm(phi, w, r.gradient);
    return r;
  }
  // Goedel: min over clauses of max over literals. The active literal is the
  // argmax within the argmin clause; ties prefer the lower variable index.
  double value = 1.0;
  Literal active;
  bool have = false;
  for (const Clause& c : phi.clauses) {
    double best = 0.0;
    Literal arg;
    for (Literal l : c)
      if (arg.dimacs() == 0 || w(l) > best || (w(l) == best && l.var() < arg.var())) {
        best = w(l);
        arg = l;
      }
    if (arg.dimacs() == 0) {  // empty clause
      value = 0.0;
      have = false;
      break;
    }
    if (!have || best < value || (best == value && arg.var() < active.var())) {
      value = best;
      active = arg;
      have = true;
    }
  }
  r.value_estimate = value;
  if (have) r.gradient[active.var()] = active.positive() ? 1.0 : -1.0;
  return r;
}

EstimatorReport ste_grad(const CnfFormula& phi, const WeightMap& w, size_t s, RngStream& rng) {
  require_samples(s);
  EstimatorReport r;
  r.gradient = GradientVector(w.num_vars(), GradientOf::kWmc);
  double value = 0.0;
  for (const auto& I : sample_interpretations(w, s, rng)) value += product_tnorm(phi, binary_weights(I), r.gradient);
  scale(r.gradient, 1.0 / static_cast<double>(s));
  r.value_estimate = value / static_cast<double>(s);
  r.samples_used = s;
  return r;
}

EstimatorReport gumbel_grad(const CnfFormula& phi, const WeightMap& w, size_t s, double temperature,
                            RngStream& rng) {
  require_samples(s);
  const int n = w.num_vars();
  const WeightMap wc = w.clamped();
  EstimatorReport r;
  r.gradient = GradientVector(n, GradientOf::kWmc);
  double value = 0.0;
  for (size_t i = 0; i < s; ++i) {
    const auto y = relaxed_bernoulli(w, temperature, rng);
    GradientVector gy(n, GradientOf::kWmc);
    value += product_tnorm(phi, WeightMap(y), gy);
    for (int v = 1; v <= n; ++v) {
      const double p = wc.prob(v);
      const double yv = y[v - 1];
      r.gradient[v] += gy[v] * yv * (1.0 - yv) / (temperature * p * (1.0 - p));
    }
  }
  scale(r.gradient, 1.0 / static_cast<double>(s));
  r.value_estimate = value / static_cast<double>(s);
  r.samples_used = s;
  return r;
}

EstimatorReport kbest_grad(const CnfFormula& phi, const WeightMap& w, int k, const EstimatorOptions& opts) {
  std::vector<Interpretation> models;
  for (auto& m : top_k_models(phi, w.clamped(), k, mpe_options(opts))) models.push_back(std::move(m.model));
  return model_sum_grad(models, w);
}

EstimatorReport koptimal_grad(const CnfFormula& phi, const WeightMap& w, int k, const EstimatorOptions& opts) {
  return model_sum_grad(k_optimal_dnf(phi, w.clamped(), k, mpe_options(opts)), w);
}

EstimatorReport mpe_grad(const CnfFormula& phi, const WeightMap& w, const EstimatorOptions& opts) {
  return model_sum_grad({mpe(phi, w.clamped(), mpe_options(opts)).model}, w);
}

EstimatorReport imle_grad(const CnfFormula& phi, const WeightMap& w, size_t s, double noise_scale, RngStream& rng,
                          const EstimatorOptions& opts) {
  require_samples(s);
  if (!(noise_scale >= 0)) throw std::invalid_argument("noise scale must be non-negative");
  const int n = w.num_vars();
  const WeightMap wc = w.clamped();
  EstimatorReport r;
  r.gradient = GradientVector(n, GradientOf::kWmc);
  WeightMap perturbed(n);
  for (size_t i = 0; i < s; ++i) {
    for (int v = 1; v <= n; ++v) perturbed.set(v, sigmoid(logit(wc.prob(v)) + noise_scale * rng.logistic()));
    const auto z = mpe(phi, perturbed.clamped(), mpe_options(opts)).model;
    for (int v = 1; v <= n; ++v) r.gradient[v] += z.value(v) ? 1.0 : -1.0;
  }
  scale(r.gradient, 1.0 / static_cast<double>(s));
  r.samples_used = s;
  return r;
}

double clause_mutual_information(const Clause& a, const Clause& b, const WeightMap& w) {
  const double pa = clause_prob(a, w);
  const double pb = clause_prob(b, w);
  // P(neither satisfied): every literal of both clauses false.
  double p00 = 1.0;
  std::vector<Literal> lits(a.begin(), a.end());
  for (Literal l : b)
    if (std::find(lits.begin(), lits.end(), l) == lits.end()) lits.push_back(l);
  for (Literal l : lits)
    if (std::find(lits.begin(), lits.end(), ~l) != lits.end()) {
      p00 = 0.0;
      break;
    }
  if (p00 != 0.0)
    for (Literal l : lits) p00 *= w(~l);
  const double p11 = 1.0 - (1.0 - pa) - (1.0 - pb) + p00;
  const double cells[4][3] = {
      {p11, pa, pb}, {pa - p11, pa, 1.0 - pb}, {pb - p11, 1.0 - pa, pb}, {p00, 1.0 - pa, 1.0 - pb}};
  double mi = 0.0;
  for (const auto& c : cells)
    if (c[0] > 0.0 && c[1] > 0.0 && c[2] > 0.0) mi += c[0] * std::log(c[0] / (c[1] * c[2]));
  return std::max(0.0, mi);
}

EstimatorReport semantic_strengthening_grad(const CnfFormula& phi, const WeightMap& w, int kappa,
                                            const EstimatorOptions& opts) {
  if (kappa < 0) throw std::invalid_argument("kappa must be non-negative");
  const size_t m = phi.clauses.size();
  const int n = w.num_vars();
  std::vector<int> parent(m);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  if (kappa > 0) {
    std::vector<std::vector<int>> occ(n + 1);
    for (size_t c = 0; c < m; ++c)
      for (Literal l : phi.clauses[c])
        if (occ[l.var()].empty() || occ[l.var()].back() != static_cast<int>(c)) occ[l.var()].push_back(static_cast<int>(c));
    std::vector<std::pair<int, int>> pairs;
    for (int v = 1; v <= n; ++v)
      for (size_t i = 0; i < occ[v].size(); ++i)
        for (size_t j = i + 1; j < occ[v].size(); ++j) pairs.emplace_back(occ[v][i], occ[v][j]);
    std::sort(pairs.begin(), pairs.end());
    pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
    std::vector<std::tuple<double, int, int>> ranked;
    ranked.reserve(pairs.size());
    for (auto [i, j] : pairs) ranked.emplace_back(clause_mutual_information(phi.clauses[i], phi.clauses[j], w), i, j);
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const auto& a, const auto& b) { return std::get<0>(a) > std::get<0>(b); });
    const size_t take = std::min(ranked.size(), static_cast<size_t>(kappa));
    for (size_t t = 0; t < take; ++t) {
      const int a = find(std::get<1>(ranked[t])), b = find(std::get<2>(ranked[t]));
      if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
  }
  // Groups in order of their first clause; singletons use the clause formula
  // so that kappa = 0 reproduces the product t-norm bit for bit.
  std::vector<std::vector<int>> groups;
  std::vector<int> group_of(m, -1);
  for (size_t c = 0; c < m; ++c) {
    const int root = find(static_cast<int>(c));
    if (group_of[root] < 0) {
      group_of[root] = static_cast<int>(groups.size());
      groups.emplace_back();
    }
    groups[group_of[root]].push_back(static_cast<int>(c));
  }
  std::vector<Factor> factors;
  factors.reserve(groups.size());
  for (const auto& g : groups) {
    if (g.size() == 1) {
      factors.push_back(clause_factor(phi.clauses[g[0]], w));
      continue;
    }
    CnfFormula sub;
    sub.num_vars = phi.num_vars;
    for (int c : g) sub.clauses.push_back(phi.clauses[c]);
    EstimatorOptions sub_opts = opts;
    sub_opts.circuit = nullptr;
    const auto circuit = circuit_for(sub, sub_opts);
    auto [res, grad] = wmc_grad(*circuit.ptr, w);
    Factor f;
    f.value = res.value;
    for (int v = 1; v <= n; ++v)
      if (grad[v] != 0.0) f.partials.emplace_back(v, grad[v]);
    factors.push_back(std::move(f));
  }
  EstimatorReport r;
  r.gradient = GradientVector(n, GradientOf::kWmc);
  r.value_estimate = product_rule(factors, r.gradient);
  return r;
}

EstimatorReport catlog_grad(const CnfFormula& phi, const WeightMap& w, EstimatorKind inner, size_t s,
                            double temperature, RngStream& rng, const EstimatorOptions& opts) {
  const int n = w.num_vars();
  std::vector<std::vector<double>> noise_draws;
  if (inner == EstimatorKind::kGumbel) {
    require_samples(s);
    for (size_t i = 0; i < s; ++i) noise_draws.push_back(relaxed_bernoulli(w, temperature, rng));
  }
  auto value = [&](const CnfFormula& f) -> double {
    switch (inner) {
      case EstimatorKind::kExact: {
        EstimatorOptions o = opts;
        o.circuit = nullptr;
        return wmc_eval(*circuit_for(f, o).ptr, w).value;
      }
      case EstimatorKind::kTnormProduct: return fuzzy_eval(f, w, TNorm::kProduct);
      case EstimatorKind::kTnormGoedel: return fuzzy_eval(f, w, TNorm::kGoedel);
      case EstimatorKind::kGumbel: {
        double total = 0.0;
        for (const auto& y : noise_draws) total += fuzzy_eval(f, WeightMap(y), TNorm::kProduct);
        return total / static_cast<double>(noise_draws.size());
      }
      default: throw std::invalid_argument("catlog inner must be exact, tnorm-product, tnorm-goedel or gumbel");
    }
  };
  EstimatorReport r;
  r.gradient = GradientVector(n, GradientOf::kWmc);
  for (int v = 1; v <= n; ++v) {
    opts.deadline.check();
    r.gradient[v] = value(condition(phi, Literal(v, true))) - value(condition(phi, Literal(v, false)));
  }
  r.value_estimate = value(phi);
  r.samples_used = noise_draws.size();
  return r;
}

EstimatorReport sample_tnorm_hybrid_grad(const CnfFormula& phi, const WeightMap& w, size_t s, RngStream& rng) {
  require_samples(s);
  const auto samples = sample_interpretations(w, s, rng);
  std::vector<Factor> factors;
  for (const Clause& c : phi.clauses) {
    bool hit = false;
    for (const auto& I : samples)
      if (evaluate_clause(c, I)) {
        hit = true;
        break;
      }
    if (!hit) factors.push_back(clause_factor(c, w));
  }
  EstimatorReport r;
  r.gradient = GradientVector(w.num_vars(), GradientOf::kWmc);
  r.value_estimate = product_rule(factors, r.gradient);
  r.samples_used = s;
  return r;
}

EstimatorReport estimate(const EstimatorConfig& cfg, const CnfFormula& phi, const WeightMap& w, RngStream& rng,
                         const EstimatorOptions& opts) {
  Stopwatch sw;
  EstimatorReport r;
  switch (cfg.kind) {
    case EstimatorKind::kExact: r = exact_grad(phi, w, opts); break;
    case EstimatorKind::kSfe: r = sfe_grad(phi, w, cfg.samples, rng, cfg.rloo); break;
    case EstimatorKind::kIndecater: r = indecater_grad(phi, w, cfg.samples, rng); break;
    case EstimatorKind::kWeightme: r = weightme_grad(phi, w, cfg.sampler, cfg.samples, rng, opts); break;
    case EstimatorKind::kUniformModel:
      r = weightme_grad(phi, w, SamplerKind::kUniformModel, cfg.samples, rng, opts, cfg.importance);
      break;
    case EstimatorKind::kSte: r = ste_grad(phi, w, cfg.samples, rng); break;
    case EstimatorKind::kGumbel: r = gumbel_grad(phi, w, cfg.samples, cfg.temperature, rng); break;
    case EstimatorKind::kTnormProduct: r = tnorm_grad(phi, w, TNorm::kProduct); break;
    case EstimatorKind::kTnormGoedel: r = tnorm_grad(phi, w, TNorm::kGoedel); break;
    case EstimatorKind::kKbest: r = kbest_grad(phi, w, cfg.k, opts); break;
    case EstimatorKind::kKoptimal: r = koptimal_grad(phi, w, cfg.k, opts); break;
    case EstimatorKind::kMpe: r = mpe_grad(phi, w, opts); break;
    case EstimatorKind::kImle: r = imle_grad(phi, w, cfg.samples, cfg.noise_scale, rng, opts); break;
    case EstimatorKind::kSemanticStrengthening: r = semantic_strengthening_grad(phi, w, cfg.kappa, opts); break;
    case EstimatorKind::kCatlog: r = catlog_grad(phi, w, cfg.inner, cfg.samples, cfg.temperature, rng, opts); break;
    case EstimatorKind::kSampleTnormHybrid: r = sample_tnorm_hybrid_grad(phi, w, cfg.samples, rng); break;
  }
  for (double x : r.gradient.values)
    if (!std::isfinite(x)) throw std::runtime_error(cfg.to_string() + " produced a non-finite gradient");
  r.wall_seconds = sw.seconds();
  return r;
}

}  // namespace wmcgrad
