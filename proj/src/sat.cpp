#include "wmcgrad/sat.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

namespace wmcgrad {
namespace {

constexpr int kNoReason = -1;
constexpr double kVarDecay = 0.95;
constexpr double kClauseDecay = 0.999;
constexpr int kRestartBase = 100;

double luby(double y, int x) {
  int size = 1, seq = 0;
  while (size < x + 1) {
    ++seq;
    size = 2 * size + 1;
  }
  while (size - 1 != x) {
    size = (size - 1) >> 1;
    --seq;
    x = x % size;
  }
  return std::pow(y, seq);
}

}  // namespace

Solver::Solver(int num_vars, SolverOptions options) : opts_(options) {
  for (int i = 0; i < num_vars; ++i) new_var();
}

int Solver::new_var() {
  const int v = num_vars();
  assigns_.push_back(0);
  phase_.push_back(1);  // prefer false
  levels_.push_back(0);
  reasons_.push_back(kNoReason);
  seen_.push_back(0);
  activity_.push_back(0.0);
  heap_pos_.push_back(-1);
  level_stamp_.push_back(0);
  model_.push_back(0);
  watches_.emplace_back();
  watches_.emplace_back();
  heap_insert(v);
  return v + 1;
}

void Solver::heap_up(size_t i) {
  const int v = heap_[i];
  while (i > 0) {
    const size_t parent = (i - 1) / 2;
    if (!heap_less(v, heap_[parent])) break;
    heap_[i] = heap_[parent];
    heap_pos_[heap_[i]] = static_cast<int>(i);
    i = parent;
  }
  heap_[i] = v;
  heap_pos_[v] = static_cast<int>(i);
}

void Solver::heap_down(size_t i) {
  const int v = heap_[i];
  for (;;) {
    size_t child = 2 * i + 1;
    if (child >= heap_.size()) break;
    if (child + 1 < heap_.size() && heap_less(heap_[child + 1], heap_[child])) ++child;
    if (!heap_less(heap_[child], v)) break;
    heap_[i] = heap_[child];
    heap_pos_[heap_[i]] = static_cast<int>(i);
    i = child;
  }
  heap_[i] = v;
  heap_pos_[v] = static_cast<int>(i);
}

void Solver::heap_insert(int v) {
  if (heap_pos_[v] >= 0) return;
  heap_.push_back(v);
  heap_pos_[v] = static_cast<int>(heap_.size() - 1);
  heap_up(heap_.size() - 1);
}

int Solver::heap_pop() {
  const int top = heap_[0];
  heap_pos_[top] = -1;
  heap_[0] = heap_.back();
  heap_.pop_back();
  if (!heap_.empty()) {
    heap_pos_[heap_[0]] = 0;
    heap_down(0);
  }
  return top;
}

void Solver::bump_var(int v) {
  if ((activity_[v] += var_inc_) > 1e100) {
    for (double& a : activity_) a *= 1e-100;
    var_inc_ *= 1e-100;
  }
  if (heap_pos_[v] >= 0) heap_up(static_cast<size_t>(heap_pos_[v]));
}

void Solver::bump_clause(ClauseData& c) {
  if ((c.activity += clause_inc_) > 1e20) {
    for (auto& d : clauses_)
      if (d.learnt) d.activity *= 1e-20;
    clause_inc_ *= 1e-20;
  }
}

void Solver::enqueue(Lit l, int reason) {
  const int v = var_of(l);
  assigns_[v] = (l & 1) ? -1 : 1;
  levels_[v] = level();
  reasons_[v] = reason;
  trail_.push_back(l);
}

int Solver::attach(std::vector<Lit> lits, bool learnt, int lbd) {
  const int cref = static_cast<int>(clauses_.size());
  watches_[lits[0]].push_back({cref, lits[1]});
  watches_[lits[1]].push_back({cref, lits[0]});
  clauses_.push_back({std::move(lits), 0.0, lbd, learnt, false});
  if (learnt) ++num_learnts_;
  return cref;
}

bool Solver::add_clause(std::span<const Literal> input) {
  if (!ok_) return false;
  cancel_until(0);
  std::vector<Lit> lits;
  lits.reserve(input.size());
  for (Literal l : input) {
    if (l.var() < 1 || l.var() > num_vars()) throw std::out_of_range("clause literal out of range");
    lits.push_back(encode(l));
  }
  std::sort(lits.begin(), lits.end());
  std::vector<Lit> kept;
  for (size_t i = 0; i < lits.size(); ++i) {
    if (i > 0 && lits[i] == lits[i - 1]) continue;
    if (i > 0 && lits[i] == (lits[i - 1] ^ 1)) return true;  // tautology
    const int8_t val = value(lits[i]);
    if (val > 0) return true;
    if (val == 0) kept.push_back(lits[i]);
  }
  if (kept.empty()) return ok_ = false;
  if (kept.size() == 1) {
    enqueue(kept[0], kNoReason);
    if (propagate() != kNoReason) ok_ = false;
    return ok_;
  }
  attach(std::move(kept), false, 0);
  return true;
}

void Solver::add_formula(const CnfFormula& phi) {
  while (num_vars() < phi.num_vars) new_var();
  for (const Clause& c : phi.clauses)
    if (!add_clause(c)) return;
}

void Solver::add_parity(const ParityConstraint& xc, Literal guard) {
  std::vector<Literal> lits;
  for (int v : xc.vars) lits.emplace_back(v, true);
  bool parity = xc.parity;
  // Reduce to at most 3 literals: t <-> a ^ b ^ c, i.e. a ^ b ^ c ^ t = 0.
  const bool guarded = guard.dimacs() != 0;
  auto emit_xor = [this, guard, guarded](const std::vector<Literal>& xs, bool p) {
    const size_t k = xs.size();
    for (uint32_t mask = 0; mask < (1u << k); ++mask) {
      // mask bit set = literal assigned true; block assignments with wrong parity
      if ((std::popcount(mask) % 2 == 1) == p) continue;
      Clause c;
      for (size_t i = 0; i < k; ++i) c.push_back(((mask >> i) & 1) ? ~xs[i] : xs[i]);
      if (guarded) c.push_back(~guard);
      add_clause(c);
    }
  };
  while (lits.size() > 3) {
    const Literal t(new_var(), true);
    std::vector<Literal> chunk{lits[0], lits[1], lits[2], t};
    emit_xor(chunk, false);
    lits.erase(lits.begin(), lits.begin() + 3);
    lits.push_back(t);
  }
  if (lits.empty()) {
    if (parity && guarded) {
      add_clause({~guard});
    } else if (parity) {
      cancel_until(0);
      ok_ = false;
    }
    return;
  }
  emit_xor(lits, parity);
}

int Solver::propagate() {
  int confl = kNoReason;
  while (qhead_ < trail_.size()) {
    const Lit p = trail_[qhead_++];
    const Lit false_lit = p ^ 1;
    auto& ws = watches_[false_lit];
    size_t i = 0, j = 0;
    while (i < ws.size()) {
      const Watcher w = ws[i];
      if (value(w.blocker) > 0) {
        ws[j++] = ws[i++];
        continue;
      }
      auto& c = clauses_[w.cref].lits;
      if (c[0] == false_lit) std::swap(c[0], c[1]);
      ++i;
      const Lit first = c[0];
      if (first != w.blocker && value(first) > 0) {
        ws[j++] = {w.cref, first};
        continue;
      }
      bool moved = false;
      for (size_t k = 2; k < c.size(); ++k) {
        if (value(c[k]) >= 0) {
          std::swap(c[1], c[k]);
          watches_[c[1]].push_back({w.cref, first});
          moved = true;
          break;
        }
      }
      if (moved) continue;
      ws[j++] = {w.cref, first};
      if (value(first) < 0) {
        confl = w.cref;
        qhead_ = trail_.size();
        while (i < ws.size()) ws[j++] = ws[i++];
      } else {
        enqueue(first, w.cref);
      }
    }
    ws.resize(j);
    if (confl != kNoReason) break;
  }
  return confl;
}

bool Solver::redundant(Lit l) const {
  // Local minimization: l is implied by other literals of the learnt clause.
  const int r = reasons_[var_of(l)];
  if (r == kNoReason) return false;
  const auto& c = clauses_[r].lits;
  for (size_t k = 1; k < c.size(); ++k) {
    const int v = var_of(c[k]);
    if (!seen_[v] && levels_[v] > 0) return false;
  }
  return true;
}

void Solver::analyze(int confl, std::vector<Lit>& learnt, int& bt_level, int& lbd) {
  learnt.clear();
  learnt.push_back(0);
  int path = 0;
  Lit p = -1;
  size_t index = trail_.size();
  do {
    auto& cd = clauses_[confl];
    if (cd.learnt) bump_clause(cd);
    const auto& c = cd.lits;
    for (size_t k = (p == -1 ? 0 : 1); k < c.size(); ++k) {
      const Lit q = c[k];
      const int v = var_of(q);
      if (seen_[v] || levels_[v] == 0) continue;
      seen_[v] = 1;
      bump_var(v);
      if (levels_[v] >= level())
        ++path;
      else
        learnt.push_back(q);
    }
    while (!seen_[var_of(trail_[--index])]) {
    }
    p = trail_[index];
    confl = reasons_[var_of(p)];
    seen_[var_of(p)] = 0;
    --path;
  } while (path > 0);
  learnt[0] = p ^ 1;

  analyze_stack_.assign(learnt.begin(), learnt.end());
  size_t keep = 1;
  for (size_t k = 1; k < learnt.size(); ++k)
    if (!redundant(learnt[k])) learnt[keep++] = learnt[k];
  learnt.resize(keep);
  for (Lit l : analyze_stack_) seen_[var_of(l)] = 0;

  bt_level = 0;
  if (learnt.size() > 1) {
    size_t max_i = 1;
    for (size_t k = 2; k < learnt.size(); ++k)
      if (levels_[var_of(learnt[k])] > levels_[var_of(learnt[max_i])]) max_i = k;
    std::swap(learnt[1], learnt[max_i]);
    bt_level = levels_[var_of(learnt[1])];
  }
  ++stamp_;
  lbd = 0;
  for (Lit l : learnt) {
    const int lv = levels_[var_of(l)];
    if (static_cast<size_t>(lv) >= level_stamp_.size()) level_stamp_.resize(lv + 1, 0);
    if (level_stamp_[lv] != stamp_) {
      level_stamp_[lv] = stamp_;
      ++lbd;
    }
  }
}

void Solver::cancel_until(int lvl) {
  if (level() <= lvl) return;
  for (size_t i = trail_.size(); i-- > static_cast<size_t>(trail_lim_[lvl]);) {
    const int v = var_of(trail_[i]);
    phase_[v] = static_cast<int8_t>(trail_[i] & 1);
    assigns_[v] = 0;
    reasons_[v] = kNoReason;
    heap_insert(v);
  }
  trail_.resize(trail_lim_[lvl]);
  trail_lim_.resize(lvl);
  qhead_ = trail_.size();
}

int Solver::pick_branch() {
  while (!heap_.empty()) {
    const int v = heap_pop();
    if (assigns_[v] == 0) return 2 * v + phase_[v];
  }
  return -1;
}

void Solver::rebuild_watches() {
  for (auto& ws : watches_) ws.clear();
  for (size_t cref = 0; cref < clauses_.size(); ++cref) {
    const auto& c = clauses_[cref];
    if (c.deleted) continue;
    watches_[c.lits[0]].push_back({static_cast<int>(cref), c.lits[1]});
    watches_[c.lits[1]].push_back({static_cast<int>(cref), c.lits[0]});
  }
}

void Solver::simplify() {
  if (!ok_) return;
  cancel_until(0);
  if (propagate() != kNoReason) {
    ok_ = false;
    return;
  }
  for (auto& c : clauses_) {
    if (c.deleted) continue;
    bool sat = false;
    for (Lit l : c.lits)
      if (value(l) > 0) {
        sat = true;
        break;
      }
    if (!sat) continue;
    c.deleted = true;
    if (c.learnt) --num_learnts_;
    std::vector<Lit>().swap(c.lits);
  }
  rebuild_watches();
}

void Solver::reduce_db() {
  std::vector<int> learnts;
  for (size_t cref = 0; cref < clauses_.size(); ++cref)
    if (clauses_[cref].learnt && !clauses_[cref].deleted) learnts.push_back(static_cast<int>(cref));
  std::sort(learnts.begin(), learnts.end(), [this](int a, int b) {
    const auto& ca = clauses_[a];
    const auto& cb = clauses_[b];
    if (ca.lbd != cb.lbd) return ca.lbd > cb.lbd;
    return ca.activity < cb.activity;
  });
  size_t removed = 0;
  for (int cref : learnts) {
    if (removed >= learnts.size() / 2) break;
    auto& c = clauses_[cref];
    if (c.lbd <= 2 || c.lits.size() <= 2) continue;
    const int v0 = var_of(c.lits[0]);
    const bool locked = reasons_[v0] == cref && value(c.lits[0]) > 0;
    if (locked) continue;
    c.deleted = true;
    c.lits.clear();
    c.lits.shrink_to_fit();
    --num_learnts_;
    ++removed;
  }
  rebuild_watches();
}

// Returns 1 = SAT, 0 = UNSAT, -1 = restart.
int Solver::search(int conflict_limit, std::span<const Lit> assumptions) {
  int local_conflicts = 0;
  std::vector<Lit> learnt;
  for (;;) {
    const int confl = propagate();
    if (confl != kNoReason) {
      ++total_conflicts_;
      ++local_conflicts;
      if (++call_conflicts_ > opts_.conflict_budget) throw BudgetExceeded("conflict budget exceeded");
      if ((call_conflicts_ & 255) == 0) opts_.deadline.check();
      if (level() == 0) {
        ok_ = false;
        return 0;
      }
      int bt = 0, lbd = 0;
      analyze(confl, learnt, bt, lbd);
      cancel_until(bt);
      if (learnt.size() == 1) {
        enqueue(learnt[0], kNoReason);
      } else {
        const int cref = attach(learnt, true, lbd);
        bump_clause(clauses_[cref]);
        enqueue(learnt[0], cref);
      }
      var_inc_ /= kVarDecay;
      clause_inc_ /= kClauseDecay;
      continue;
    }
    if (conflict_limit >= 0 && local_conflicts >= conflict_limit) {
      cancel_until(0);
      return -1;
    }
    if (static_cast<double>(num_learnts_) >= max_learnts_) {
      reduce_db();
      max_learnts_ *= 1.1;
    }
    Lit next = -1;
    while (level() < static_cast<int>(assumptions.size())) {
      const Lit a = assumptions[level()];
      const int8_t val = value(a);
      if (val > 0) {
        trail_lim_.push_back(static_cast<int>(trail_.size()));
      } else if (val < 0) {
        return 0;
      } else {
        next = a;
        break;
      }
    }
    if (next == -1) {
      next = pick_branch();
      if (next == -1) return 1;
    }
    trail_lim_.push_back(static_cast<int>(trail_.size()));
    enqueue(next, kNoReason);
  }
}

bool Solver::solve(std::span<const Literal> assumptions) {
  if (!ok_) return false;
  cancel_until(0);
  std::vector<Lit> assume;
  for (Literal l : assumptions) {
    if (l.var() < 1 || l.var() > num_vars()) throw std::out_of_range("assumption out of range");
    assume.push_back(encode(l));
  }
  if (propagate() != kNoReason) {
    ok_ = false;
    return false;
  }
  call_conflicts_ = 0;
  max_learnts_ = std::max(2000.0, static_cast<double>(clauses_.size()) / 3.0 +
                                      static_cast<double>(num_learnts_));
  opts_.deadline.check();
  int status = -1;
  for (int restarts = 0; status == -1; ++restarts) {
    try {
      status = search(static_cast<int>(luby(2.0, restarts) * kRestartBase), assume);
    } catch (...) {
      cancel_until(0);
      throw;
    }
  }
  if (status == 1)
    for (int v = 0; v < num_vars(); ++v) model_[v] = assigns_[v] > 0 ? 1 : 0;
  cancel_until(0);
  return status == 1;
}

Interpretation Solver::model(int n) const {
  Interpretation out(n);
  for (int v = 1; v <= n; ++v) out.set(v, model_value(v));
  return out;
}

SatResult solve(const SatInstance& instance, const SolverOptions& options) {
  Solver solver(instance.base.num_vars, options);
  solver.add_formula(instance.base);
  for (const auto& xc : instance.parity_constraints) {
    for (int v : xc.vars)
      if (v < 1 || v > instance.base.num_vars)
        throw std::out_of_range("parity constraint over undeclared variable");
    solver.add_parity(xc);
  }
  SatResult r;
  r.satisfiable = solver.solve(instance.assumptions);
  if (r.satisfiable) r.model = solver.model(instance.base.num_vars);
  return r;
}

bool is_satisfiable(const CnfFormula& phi, const SolverOptions& options) {
  return solve(SatInstance{phi, {}, {}}, options).satisfiable;
}

std::vector<Interpretation> enumerate_projected(Solver& solver, int num_vars, size_t max_count,
                                                std::span<const Literal> assumptions,
                                                Literal guard) {
  std::vector<Interpretation> out;
  Clause block;
  while (out.size() < max_count && solver.solve(assumptions)) {
    out.push_back(solver.model(num_vars));
    block.clear();
    for (int v = 1; v <= num_vars; ++v) block.emplace_back(v, !solver.model_value(v));
    if (guard.dimacs() != 0) block.push_back(~guard);
    if (!solver.add_clause(block)) break;
  }
  return out;
}

std::vector<Interpretation> enumerate_models(const CnfFormula& phi, size_t limit,
                                             const SolverOptions& options) {
  Solver solver(phi.num_vars, options);
  solver.add_formula(phi);
  auto models = enumerate_projected(solver, phi.num_vars, limit + 1);
  if (models.size() > limit)
    throw LimitExceeded("formula has more than " + std::to_string(limit) + " models");
  std::sort(models.begin(), models.end(),
            [](const Interpretation& a, const Interpretation& b) { return a.bits() < b.bits(); });
  return models;
}

}  // namespace wmcgrad
