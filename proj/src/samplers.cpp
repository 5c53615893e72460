#include "wmcgrad/samplers.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace wmcgrad {

const char* to_string(SamplerKind kind) {
  switch (kind) {
    case SamplerKind::kInterpretation: return "interpretation";
    case SamplerKind::kExactModel: return "exact";
    case SamplerKind::kHashModel: return "hash";
    case SamplerKind::kUniformModel: return "uniform";
  }
  return "?";
}

SamplerKind sampler_kind_from_string(const std::string& name) {
  if (name == "interpretation") return SamplerKind::kInterpretation;
  if (name == "exact") return SamplerKind::kExactModel;
  if (name == "hash") return SamplerKind::kHashModel;
  if (name == "uniform") return SamplerKind::kUniformModel;
  throw std::invalid_argument("unknown sampler '" + name + "'");
}

std::vector<Interpretation> sample_interpretations(const WeightMap& w, size_t s, RngStream& rng) {
  if (s == 0) throw std::invalid_argument("sample count must be at least 1");
  std::vector<Interpretation> out;
  out.reserve(s);
  for (size_t i = 0; i < s; ++i) {
    Interpretation I(w.num_vars());
    for (int v = 1; v <= w.num_vars(); ++v) I.set(v, rng.bernoulli(w.prob(v)));
    out.push_back(std::move(I));
  }
  return out;
}

ExactModelSampler::ExactModelSampler(const DecisionDnnf& circuit, const WeightMap& w)
    : circuit_(&circuit), w_(w), values_(node_values(circuit, w)) {
  if (circuit.root() == DecisionDnnf::kFalseId) throw UnsatError();
  if (!(wmc() > 0.0)) throw std::domain_error("weighted model count is zero");
}

Interpretation ExactModelSampler::draw(RngStream& rng) const {
  const int n = w_.num_vars();
  Interpretation out(n);
  std::vector<uint8_t> fixed(n + 1, 0);
  std::vector<NodeId> stack{circuit_->root()};
  while (!stack.empty()) {
    const NodeId id = stack.back();
    stack.pop_back();
    const auto& node = circuit_->node(id);
    switch (node.kind) {
      case DecisionDnnf::Kind::kTrue:
      case DecisionDnnf::Kind::kFalse:
        break;
      case DecisionDnnf::Kind::kLiteral:
        out.set(node.lit.var(), node.lit.positive());
        fixed[node.lit.var()] = 1;
        break;
      case DecisionDnnf::Kind::kAnd: {
        const auto ch = circuit_->children(id);
        for (size_t i = ch.size(); i-- > 0;) stack.push_back(ch[i]);
        break;
      }
      case DecisionDnnf::Kind::kDecision: {
        const double p_high = w_.prob(node.var) * values_[node.high] / values_[id];
        const bool high = rng.uniform() < p_high;
        out.set(node.var, high);
        fixed[node.var] = 1;
        stack.push_back(high ? node.high : node.low);
        break;
      }
    }
  }
  for (int v = 1; v <= n; ++v)
    if (!fixed[v]) out.set(v, rng.bernoulli(w_.prob(v)));
  return out;
}

Interpretation exact_model_sample(const DecisionDnnf& circuit, const WeightMap& w, RngStream& rng) {
  return ExactModelSampler(circuit, w).draw(rng);
}

namespace {

double log_sum_exp(const std::vector<double>& xs) {
  double mx = -std::numeric_limits<double>::infinity();
  for (double x : xs) mx = std::max(mx, x);
  if (!std::isfinite(mx)) return mx;
  double sum = 0.0;
  for (double x : xs) sum += std::exp(x - mx);
  return mx + std::log(sum);
}

// Cells of a fresh solver are retired by a unit clause; after this many the
// solver is rebuilt to shed the dead clauses.
constexpr int kSolverRecycle = 64;
constexpr int kCalibrationCells = 16;
constexpr int kEstimateTrials = 3;

}  // namespace

HashModelSampler::HashModelSampler(const CnfFormula& phi, const WeightMap& w, const SamplerSpec& spec,
                                   RngStream& rng)
    : phi_(phi), w_(w), spec_(spec) {
  if (spec_.pivot < 1) throw std::invalid_argument("pivot must be at least 1");
  if (!(spec_.xor_density > 0 && spec_.xor_density <= 0.5)) throw std::invalid_argument("xor_density must lie in (0, 0.5]");
  if (w_.num_vars() < phi_.num_vars) throw std::invalid_argument("weight map too short");
  const size_t probe = std::max(static_cast<size_t>(spec_.pivot), spec_.model_cache_limit) + 1;
  std::vector<Interpretation> all;
  {
    Solver full(phi_.num_vars, spec_.solver);
    full.add_formula(phi_);
    all = enumerate_projected(full, phi_.num_vars, probe);
  }
  reset_solver();
  if (all.empty()) throw UnsatError();
  std::sort(all.begin(), all.end());
  if (static_cast<int>(all.size()) <= spec_.pivot) {
    models_ = std::move(all);
    for (const auto& m : models_) model_logw_.push_back(log_weight(m));
    models_log_total_ = log_sum_exp(model_logw_);
    return;
  }
  if (all.size() <= spec_.model_cache_limit) {
    cache_ = std::move(all);
    for (const auto& m : cache_) {
      std::vector<uint64_t> words((phi_.num_vars + 63) / 64, 0);
      for (int v = 1; v <= phi_.num_vars; ++v)
        if (m.value(v)) words[(v - 1) / 64] |= uint64_t{1} << ((v - 1) % 64);
      cache_bits_.push_back(std::move(words));
    }
  }
  m_ = estimate_xors(rng);
  if (spec_.weight_correction) {
    // Calibrate the acceptance bound on a few usable cells.
    for (int found = 0, tries = 0; found < kCalibrationCells && tries < 8 * kCalibrationCells; ++tries) {
      const auto c = cell(m_, rng);
      if (!c || c->empty() || static_cast<int>(c->size()) > spec_.pivot) continue;
      std::vector<double> lw;
      for (const auto& m : *c) lw.push_back(log_weight(m));
      const double lt = log_sum_exp(lw);
      if (!have_bound_ || lt > log_bound_) log_bound_ = lt;
      have_bound_ = true;
      ++found;
    }
  }
}

HashModelSampler::~HashModelSampler() = default;
HashModelSampler::HashModelSampler(HashModelSampler&&) noexcept = default;

void HashModelSampler::reset_solver() {
  SolverOptions opts = spec_.solver;
  opts.conflict_budget = std::min(opts.conflict_budget, spec_.cell_conflict_budget);
  solver_ = std::make_unique<Solver>(phi_.num_vars, opts);
  solver_->add_formula(phi_);
  solver_uses_ = 0;
}

double HashModelSampler::log_weight(const Interpretation& m) const {
  return log_interpretation_prob(m, w_);
}

// Models of phi in a random cell, sorted; at most pivot + 1 of them.
std::optional<std::vector<Interpretation>> HashModelSampler::cell(int m, RngStream& rng) {
  ++cells_;
  const int n = phi_.num_vars;
  const size_t words = (static_cast<size_t>(n) + 63) / 64;
  // Each variable joins a constraint with probability 1/2: one random bit per
  // variable, 64 at a time, then one bit for the parity.
  std::vector<std::vector<uint64_t>> masks(m, std::vector<uint64_t>(words, 0));
  std::vector<bool> parities(m);
  const bool half = spec_.xor_density == 0.5;
  for (int i = 0; i < m; ++i) {
    if (half) {
      for (size_t k = 0; k < words; ++k) {
        masks[i][k] = rng.next_u64();
        if (k + 1 == words && n % 64 != 0) masks[i][k] &= (uint64_t{1} << (n % 64)) - 1;
      }
    } else {
      for (int v = 1; v <= n; ++v)
        if (rng.bernoulli(spec_.xor_density)) masks[i][(v - 1) / 64] |= uint64_t{1} << ((v - 1) % 64);
    }
    parities[i] = (rng.next_u64() & 1) != 0;
  }
  const size_t limit = static_cast<size_t>(spec_.pivot) + 1;
  std::vector<Interpretation> out;
  if (cached()) {
    for (size_t j = 0; j < cache_.size() && out.size() < limit; ++j) {
      bool in = true;
      for (int i = 0; i < m && in; ++i) {
        int par = 0;
        for (size_t k = 0; k < words; ++k) par ^= std::popcount(masks[i][k] & cache_bits_[j][k]) & 1;
        in = (par != 0) == parities[i];
      }
      if (in) out.push_back(cache_[j]);
    }
    return out;
  }
  if (++solver_uses_ > kSolverRecycle) reset_solver();
  const Literal guard(solver_->new_var(), true);
  for (int i = 0; i < m; ++i) {
    ParityConstraint xc;
    for (int v = 1; v <= n; ++v)
      if ((masks[i][(v - 1) / 64] >> ((v - 1) % 64)) & 1) xc.vars.push_back(v);
    xc.parity = parities[i];
    solver_->add_parity(xc, guard);
  }
  const Literal assume[] = {guard};
  try {
    out = enumerate_projected(*solver_, n, limit, assume, guard);
  } catch (const TimeoutError&) {
    throw;
  } catch (const BudgetExceeded&) {
    ++aborted_;
    reset_solver();
    return std::nullopt;
  }
  solver_->add_clause({~guard});
  solver_->simplify();
  std::sort(out.begin(), out.end());
  return out;
}

int HashModelSampler::estimate_xors(RngStream& rng) {
  // Smallest m whose cell fits the pivot, found by stepping one XOR at a time
  // (the first trial from m = 1, later ones from the previous answer). Each
  // trial yields an estimate |cell| * 2^m of the model count; the median of a
  // few trials sets m so that cells hold about pivot/2 models. Stepping
  // rather than galloping keeps clear of large m, where cells are empty and
  // proving so with long XORs is expensive for the solver.
  const int n = phi_.num_vars;
  auto fits = [&](const std::optional<std::vector<Interpretation>>& c) {
    return !c || static_cast<int>(c->size()) <= spec_.pivot;
  };
  auto size_of = [](const std::optional<std::vector<Interpretation>>& c) {
    return c ? static_cast<double>(c->size()) : 0.0;
  };
  std::vector<double> log2_counts;
  int prev = 1;
  for (int t = 0; t < kEstimateTrials; ++t) {
    int m = std::max(1, prev - 1);
    auto c = cell(m, rng);
    if (fits(c)) {
      while (m > 1) {
        auto below = cell(m - 1, rng);
        if (!fits(below)) break;
        --m;
        c = std::move(below);
      }
    } else {
      while (!fits(c) && m < n) c = cell(++m, rng);
    }
    prev = m;
    log2_counts.push_back(std::log2(std::max(size_of(c), 0.5)) + m);
  }
  std::sort(log2_counts.begin(), log2_counts.end());
  const double log2_count = log2_counts[log2_counts.size() / 2];
  const int m = static_cast<int>(std::lround(log2_count - std::log2(spec_.pivot / 2.0)));
  return std::clamp(m, 1, n);
}

const Interpretation& HashModelSampler::pick(const std::vector<Interpretation>& models,
                                             const std::vector<double>& logw, double log_total,
                                             RngStream& rng) const {
  double u = rng.uniform();
  for (size_t i = 0; i < models.size(); ++i) {
    u -= std::exp(logw[i] - log_total);
    if (u < 0.0) return models[i];
  }
  return models.back();
}

Interpretation HashModelSampler::draw(RngStream& rng) {
  if (exact()) return pick(models_, model_logw_, models_log_total_, rng);
  int empty_run = 0, full_run = 0, rejections = 0;
  for (int attempt = 0; attempt < spec_.max_cell_attempts; ++attempt) {
    spec_.solver.deadline.check();
    const auto cc = cell(m_, rng);
    if (!cc) continue;
    const auto& c = *cc;
    if (c.empty()) {
      full_run = 0;
      // Persistent emptiness means m is too large for this formula.
      if (++empty_run >= 8 && m_ > 1) {
        --m_;
        empty_run = 0;
      }
      continue;
    }
    if (static_cast<int>(c.size()) > spec_.pivot) {
      empty_run = 0;
      if (++full_run >= 8 && m_ < phi_.num_vars) {
        ++m_;
        full_run = 0;
      }
      continue;
    }
    empty_run = full_run = 0;
    std::vector<double> lw;
    lw.reserve(c.size());
    for (const auto& m : c) lw.push_back(log_weight(m));
    const double lt = log_sum_exp(lw);
    if (spec_.weight_correction) {
      if (!have_bound_ || lt > log_bound_) {
        log_bound_ = lt;
        have_bound_ = true;
      } else if (rejections < spec_.max_rejections && !(std::log(rng.uniform_open()) < lt - log_bound_)) {
        ++rejections;
        continue;
      }
    }
    return pick(c, lw, lt, rng);
  }
  throw BudgetExceeded("hash sampler found no usable cell");
}

Interpretation hash_model_sample(const CnfFormula& phi, const WeightMap& w, const SamplerSpec& spec,
                                 RngStream& rng) {
  HashModelSampler sampler(phi, w, spec, rng);
  return sampler.draw(rng);
}

Interpretation uniform_model_sample(const CnfFormula& phi, RngStream& rng, const SamplerSpec& spec) {
  return hash_model_sample(phi, WeightMap(phi.num_vars, 0.5), spec, rng);
}

}  // namespace wmcgrad
