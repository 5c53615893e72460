#include "wmcgrad/logic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace wmcgrad {

bool CnfFormula::has_empty_clause() const {
  return std::any_of(clauses.begin(), clauses.end(), [](const Clause& c) { return c.empty(); });
}

bool normalize_clause(Clause& clause) {
  Clause out;
  out.reserve(clause.size());
  for (Literal l : clause) {
    if (std::find(out.begin(), out.end(), ~l) != out.end()) return false;
    if (std::find(out.begin(), out.end(), l) == out.end()) out.push_back(l);
  }
  clause = std::move(out);
  return true;
}

void WeightMap::set(int var, double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("weight outside [0,1]");
  prob_[var - 1] = p;
}

WeightMap WeightMap::clamped() const {
  WeightMap out = *this;
  for (double& p : out.prob_) p = std::clamp(p, clamp_margin_, 1.0 - clamp_margin_);
  return out;
}

bool WeightMap::is_binary() const {
  return std::all_of(prob_.begin(), prob_.end(), [](double p) { return p == 0.0 || p == 1.0; });
}

Interpretation Interpretation::from_literals(int num_vars, std::span<const Literal> lits) {
  Interpretation out(num_vars);
  for (Literal l : lits) out.set(l.var(), l.positive());
  return out;
}

Interpretation Interpretation::from_index(int num_vars, uint64_t code) {
  Interpretation out(num_vars);
  for (int v = 1; v <= num_vars; ++v) out.set(v, (code >> (v - 1)) & 1u);
  return out;
}

std::vector<Literal> Interpretation::literals() const {
  std::vector<Literal> out;
  out.reserve(bits_.size());
  for (int v = 1; v <= num_vars(); ++v) out.emplace_back(v, value(v));
  return out;
}

uint64_t Interpretation::index() const {
  uint64_t code = 0;
  for (int v = 1; v <= num_vars() && v <= 64; ++v)
    if (value(v)) code |= uint64_t{1} << (v - 1);
  return code;
}

Implicant::Implicant(std::vector<Literal> lits) : lits_(std::move(lits)) {
  for (size_t i = 0; i < lits_.size(); ++i)
    for (size_t j = i + 1; j < lits_.size(); ++j)
      if (lits_[i] == ~lits_[j]) throw std::invalid_argument("inconsistent implicant");
  std::sort(lits_.begin(), lits_.end(), [](Literal a, Literal b) { return a.var() < b.var(); });
  lits_.erase(std::unique(lits_.begin(), lits_.end()), lits_.end());
}

bool Implicant::contains(int var) const {
  return std::any_of(lits_.begin(), lits_.end(), [var](Literal l) { return l.var() == var; });
}

CnfFormula condition(const CnfFormula& phi, Literal lit) {
  if (lit.var() < 1 || lit.var() > phi.num_vars)
    throw std::out_of_range("conditioning literal out of range");
  CnfFormula out;
  out.num_vars = phi.num_vars;
  out.clauses.reserve(phi.clauses.size());
  for (const Clause& c : phi.clauses) {
    if (std::find(c.begin(), c.end(), lit) != c.end()) continue;
    Clause reduced;
    reduced.reserve(c.size());
    for (Literal l : c)
      if (l != ~lit) reduced.push_back(l);
    out.clauses.push_back(std::move(reduced));
  }
  return out;
}

CnfFormula condition(const CnfFormula& phi, std::span<const Literal> lits) {
  CnfFormula out = phi;
  for (Literal l : lits) out = condition(out, l);
  return out;
}

bool evaluate_clause(const Clause& clause, const Interpretation& interp) {
  return std::any_of(clause.begin(), clause.end(), [&](Literal l) { return interp.satisfies(l); });
}

bool evaluate(const CnfFormula& phi, const Interpretation& interp) {
  return std::all_of(phi.clauses.begin(), phi.clauses.end(),
                     [&](const Clause& c) { return evaluate_clause(c, interp); });
}

double interpretation_prob(const Interpretation& interp, const WeightMap& w) {
  double p = 1.0;
  for (int v = 1; v <= interp.num_vars(); ++v) p *= w(Literal(v, interp.value(v)));
  return p;
}

double log_interpretation_prob(const Interpretation& interp, const WeightMap& w) {
  double lp = 0.0;
  for (int v = 1; v <= interp.num_vars(); ++v) lp += std::log(w(Literal(v, interp.value(v))));
  return lp;
}

double clause_prob(const Clause& clause, const WeightMap& w) {
  double miss = 1.0;
  for (Literal l : clause) miss *= w(~l);
  return 1.0 - miss;
}

double fuzzy_eval(const CnfFormula& phi, const WeightMap& w, TNorm tnorm) {
  if (tnorm == TNorm::kProduct) {
    double value = 1.0;
    for (const Clause& c : phi.clauses) value *= clause_prob(c, w);
    return value;
  }
  double value = 1.0;
  for (const Clause& c : phi.clauses) {
    double best = 0.0;
    for (Literal l : c) best = std::max(best, w(l));
    value = std::min(value, best);
  }
  return value;
}

bool is_implicant(const CnfFormula& phi, const Implicant& pi) {
  // A CNF is valid iff every clause is tautological; all remaining
  // non-tautological clauses are falsifiable.
  const CnfFormula rest = condition(phi, pi.literals());
  return std::all_of(rest.clauses.begin(), rest.clauses.end(), [](Clause c) {
    return !normalize_clause(c);
  });
}

std::string to_string(Literal lit) { return std::to_string(lit.dimacs()); }

std::string to_string(const Interpretation& interp) {
  std::string out;
  for (int v = 1; v <= interp.num_vars(); ++v) {
    if (v > 1) out += ' ';
    out += std::to_string(interp.value(v) ? v : -v);
  }
  return out;
}

}  // namespace wmcgrad
