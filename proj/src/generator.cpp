#include "wmcgrad/generator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "wmcgrad/sat.hpp"

namespace wmcgrad {
namespace {

Clause draw_clause(const PlantedSpec& spec, const Interpretation& planted, RngStream& rng) {
  const int n = spec.num_vars;
  const int width = std::min(spec.clause_width, n);
  const int span = spec.window > 0 ? std::min(spec.window, n) : n;
  for (;;) {
    const int base = span < n ? 1 + static_cast<int>(rng.below(static_cast<uint64_t>(n - span + 1))) : 1;
    std::vector<int> vars;
    while (static_cast<int>(vars.size()) < width) {
      const int v = base + static_cast<int>(rng.below(static_cast<uint64_t>(span)));
      if (std::find(vars.begin(), vars.end(), v) == vars.end()) vars.push_back(v);
    }
    Clause c;
    bool sat = false;
    for (int v : vars) {
      const Literal l(v, rng.bernoulli(0.5));
      sat = sat || planted.satisfies(l);
      c.push_back(l);
    }
    if (sat) return c;
  }
}

Interpretation random_interpretation(int n, RngStream& rng) {
  Interpretation I(n);
  for (int v = 1; v <= n; ++v) I.set(v, rng.bernoulli(0.5));
  return I;
}

bool unique_model(const CnfFormula& phi, const Interpretation& model) {
  SatInstance inst{phi, {}, {}};
  Clause block;
  for (int v = 1; v <= phi.num_vars; ++v) block.push_back(Literal(v, !model.value(v)));
  inst.base.clauses.push_back(block);
  return !solve(inst).satisfiable;
}

}  // namespace

Instance planted_cnf(const PlantedSpec& spec, RngStream& rng) {
  if (spec.num_vars < 1 || spec.clause_width < 1) throw std::invalid_argument("bad planted spec");
  Instance inst;
  inst.planted = random_interpretation(spec.num_vars, rng);
  inst.phi.num_vars = spec.num_vars;
  const auto m = static_cast<size_t>(std::llround(spec.clause_ratio * spec.num_vars));
  for (size_t i = 0; i < m; ++i) inst.phi.clauses.push_back(draw_clause(spec, inst.planted, rng));
  inst.id = "planted-n" + std::to_string(spec.num_vars);
  return inst;
}

Instance planted_single_model(const PlantedSpec& spec, RngStream& rng, size_t max_clauses) {
  Instance inst = planted_cnf(spec, rng);
  const size_t batch = std::max(1, spec.num_vars / 4);
  while (!unique_model(inst.phi, inst.planted)) {
    if (inst.phi.clauses.size() >= max_clauses) throw LimitExceeded("no single-model instance within clause limit");
    for (size_t i = 0; i < batch; ++i) inst.phi.clauses.push_back(draw_clause(spec, inst.planted, rng));
  }
  inst.id = "single-n" + std::to_string(spec.num_vars);
  return inst;
}

Instance xor_chain(int num_vars, RngStream& rng) {
  // Below 4 variables the 3-variable parities cannot reach full rank.
  if (num_vars < 4 || num_vars > 64) throw std::invalid_argument("xor_chain needs 4 <= n <= 64");
  Instance inst;
  inst.planted = random_interpretation(num_vars, rng);
  inst.phi.num_vars = num_vars;
  // Row-echelon basis keyed by pivot bit, to keep only independent equations.
  std::vector<uint64_t> basis(num_vars, 0);
  int rank = 0;
  while (rank < num_vars) {
    int vars[3];
    for (int i = 0; i < 3;) {
      const int v = 1 + static_cast<int>(rng.below(static_cast<uint64_t>(num_vars)));
      if (std::find(vars, vars + i, v) == vars + i) vars[i++] = v;
    }
    uint64_t row = 0;
    for (int v : vars) row |= uint64_t{1} << (v - 1);
    uint64_t r = row;
    for (int b = num_vars - 1; b >= 0 && r; --b)
      if ((r >> b & 1) && basis[b]) r ^= basis[b];
    if (!r) continue;
    basis[63 - __builtin_clzll(r)] = r;
    ++rank;
    bool parity = false;
    for (int v : vars) parity ^= inst.planted.value(v);
    // Forbid each of the 4 assignments with the wrong parity.
    for (int mask = 0; mask < 8; ++mask) {
      if ((__builtin_popcount(mask) & 1) == static_cast<int>(parity)) continue;
      Clause c;
      for (int i = 0; i < 3; ++i) c.push_back(Literal(vars[i], !(mask >> i & 1)));
      inst.phi.clauses.push_back(c);
    }
  }
  inst.id = "xor-n" + std::to_string(num_vars);
  return inst;
}

std::vector<Instance> random_suite(int count, int min_vars, int max_vars, uint64_t seed) {
  std::vector<Instance> out;
  RngStream root(seed);
  for (int i = 0; i < count; ++i) {
    RngStream rng = root.split(static_cast<uint64_t>(i));
    PlantedSpec spec;
    spec.num_vars = min_vars + static_cast<int>(rng.below(static_cast<uint64_t>(max_vars - min_vars + 1)));
    spec.clause_ratio = 4.0;
    spec.window = 12;
    Instance inst = planted_cnf(spec, rng);
    inst.id = "random-" + std::to_string(i) + "-n" + std::to_string(spec.num_vars);
    out.push_back(std::move(inst));
  }
  return out;
}

std::vector<Instance> single_model_suite(int count, int num_vars, uint64_t seed) {
  std::vector<Instance> out;
  RngStream root(seed);
  for (int i = 0; i < count; ++i) {
    RngStream rng = root.split(static_cast<uint64_t>(i));
    PlantedSpec spec;
    spec.num_vars = num_vars;
    spec.clause_ratio = 4.0;
    Instance inst = planted_single_model(spec, rng);
    inst.id = "single-" + std::to_string(i) + "-n" + std::to_string(num_vars);
    out.push_back(std::move(inst));
  }
  return out;
}

std::vector<Instance> optimization_suite(uint64_t seed) {
  std::vector<Instance> out;
  RngStream root(seed);
  const int planted_sizes[] = {12, 16, 24, 32, 48, 64};
  for (int i = 0; i < 6; ++i) {
    RngStream rng = root.split(static_cast<uint64_t>(i));
    PlantedSpec spec;
    spec.num_vars = planted_sizes[i];
    spec.clause_ratio = 4.2;
    spec.window = spec.num_vars > 24 ? 16 : 0;
    Instance inst = planted_cnf(spec, rng);
    inst.id = "planted-" + std::to_string(i) + "-n" + std::to_string(spec.num_vars);
    out.push_back(std::move(inst));
  }
  const int xor_sizes[] = {8, 12, 16, 24};
  for (int i = 0; i < 4; ++i) {
    RngStream rng = root.split(100 + static_cast<uint64_t>(i));
    Instance inst = xor_chain(xor_sizes[i], rng);
    inst.id = "xor-" + std::to_string(i) + "-n" + std::to_string(inst.phi.num_vars);
    out.push_back(std::move(inst));
  }
  return out;
}

}  // namespace wmcgrad
