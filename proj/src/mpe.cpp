#include "wmcgrad/mpe.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

namespace wmcgrad {
namespace {

constexpr double kTieTolerance = 1e-10;

class BranchAndBound {
 public:
  BranchAndBound(const CnfFormula& phi, const WeightMap& w, const MpeOptions& opts)
      : n_(phi.num_vars), opts_(opts), value_(n_ + 1, 0), occ_(2 * static_cast<size_t>(n_) + 2) {
    log_w_.resize(2 * static_cast<size_t>(n_) + 2);
    best_lw_.resize(n_ + 1);
    for (int v = 1; v <= n_; ++v) {
      log_w_[code(Literal(v, true))] = std::log(w.prob(v));
      log_w_[code(Literal(v, false))] = std::log(1.0 - w.prob(v));
      best_lw_[v] = std::max(log_w_[code(Literal(v, true))], log_w_[code(Literal(v, false))]);
      rest_ += best_lw_[v];
    }
    for (const Clause& c : phi.clauses) add_clause(c);
  }

  void add_clause(const Clause& c) {
    const int id = static_cast<int>(clauses_.size());
    clauses_.push_back(c);
    n_true_.push_back(0);
    n_false_.push_back(0);
    for (Literal l : c) occ_[code(l)].push_back(id);
    if (c.empty()) has_empty_ = true;
  }

  std::optional<MpeResult> run() {
    have_best_ = false;
    nodes_ = 0;
    if (has_empty_) return std::nullopt;
    // Top-level unit clauses.
    std::vector<int> units;
    bool ok = true;
    for (size_t i = 0; i < clauses_.size() && ok; ++i)
      if (clauses_[i].size() == 1) {
        const Literal l = clauses_[i][0];
        const int cur = lit_value(l);
        if (cur < 0) ok = false;
        if (cur == 0) ok = assign(l);
      }
    if (ok) search();
    undo_to(0);
    if (!have_best_) return std::nullopt;
    return MpeResult{best_, best_lp_};
  }

 private:
  static size_t code(Literal l) { return 2 * static_cast<size_t>(l.var()) + (l.positive() ? 1 : 0); }
  int lit_value(Literal l) const {
    const int v = value_[l.var()];
    return l.positive() ? v : -v;
  }

  // Assigns l and propagates units. Returns false on conflict; the trail keeps
  // everything assigned so far either way.
  bool assign(Literal first) {
    std::vector<Literal> queue{first};
    while (!queue.empty()) {
      const Literal l = queue.back();
      queue.pop_back();
      const int cur = lit_value(l);
      if (cur > 0) continue;
      if (cur < 0) return false;
      value_[l.var()] = l.positive() ? 1 : -1;
      trail_.push_back(l);
      cur_lp_ += log_w_[code(l)];
      rest_ -= best_lw_[l.var()];
      for (int id : occ_[code(l)])
        if (n_true_[id]++ == 0) --unsat_count_;
      bool conflict = false;
      for (int id : occ_[code(~l)]) {
        ++n_false_[id];
        if (conflict || n_true_[id] > 0) continue;
        const size_t size = clauses_[id].size();
        if (n_false_[id] == size) {
          conflict = true;
        } else if (n_false_[id] + 1 == size) {
          for (Literal x : clauses_[id])
            if (lit_value(x) == 0) {
              queue.push_back(x);
              break;
            }
        }
      }
      if (conflict) return false;
    }
    return true;
  }

  void undo_to(size_t mark) {
    while (trail_.size() > mark) {
      const Literal l = trail_.back();
      trail_.pop_back();
      value_[l.var()] = 0;
      cur_lp_ -= log_w_[code(l)];
      rest_ += best_lw_[l.var()];
      for (int id : occ_[code(l)])
        if (--n_true_[id] == 0) ++unsat_count_;
      for (int id : occ_[code(~l)]) --n_false_[id];
    }
  }

  bool improves(double lp, const Interpretation& m) const {
    if (!have_best_) return true;
    if (lp > best_lp_ + kTieTolerance) return true;
    const bool tie = (lp == best_lp_) || std::abs(lp - best_lp_) <= kTieTolerance;
    return tie && m < best_;
  }

  void record_leaf() {
    Interpretation m(n_);
    double lp = 0.0;
    for (int v = 1; v <= n_; ++v) {
      bool val;
      if (value_[v] != 0) {
        val = value_[v] > 0;
      } else {
        // free variable: most probable value, false on ties
        val = log_w_[code(Literal(v, true))] > log_w_[code(Literal(v, false))];
      }
      m.set(v, val);
      lp += log_w_[code(Literal(v, val))];
    }
    if (improves(lp, m)) {
      best_ = std::move(m);
      best_lp_ = lp;
      have_best_ = true;
    }
  }

  int choose_var() const {
    size_t best_len = SIZE_MAX;
    int best = 0;
    for (size_t id = 0; id < clauses_.size(); ++id) {
      if (n_true_[id] > 0) continue;
      const size_t open = clauses_[id].size() - n_false_[id];
      if (open < best_len) {
        for (Literal l : clauses_[id])
          if (lit_value(l) == 0) {
            if (open < best_len || l.var() < best) best = l.var();
            best_len = open;
            break;
          }
      }
    }
    return best;
  }

  void search() {
    if (++nodes_ > opts_.node_budget) throw BudgetExceeded("mpe node budget exceeded");
    if ((nodes_ & 1023) == 0) opts_.deadline.check();
    if (have_best_ && cur_lp_ + rest_ < best_lp_ - kTieTolerance) return;
    const int var = choose_var();
    if (var == 0) {
      record_leaf();
      return;
    }
    const Literal pos(var, true);
    const bool pos_first = log_w_[code(pos)] > log_w_[code(~pos)];
    for (const Literal l : {pos_first ? pos : ~pos, pos_first ? ~pos : pos}) {
      const size_t mark = trail_.size();
      if (assign(l)) search();
      undo_to(mark);
    }
  }

  int n_;
  MpeOptions opts_;
  std::vector<int8_t> value_;
  std::vector<std::vector<int>> occ_;
  std::vector<double> log_w_;
  std::vector<double> best_lw_;
  std::vector<Clause> clauses_;
  std::vector<size_t> n_true_;
  std::vector<size_t> n_false_;
  std::vector<Literal> trail_;
  bool has_empty_ = false;
  long unsat_count_ = 0;
  double cur_lp_ = 0.0;
  double rest_ = 0.0;
  bool have_best_ = false;
  double best_lp_ = -std::numeric_limits<double>::infinity();
  Interpretation best_;
  uint64_t nodes_ = 0;

 public:
  void block(const Interpretation& m) {
    Clause c;
    for (int v = 1; v <= n_; ++v) c.emplace_back(v, !m.value(v));
    add_clause(c);
  }
};

}  // namespace

MpeResult mpe(const CnfFormula& phi, const WeightMap& w, const MpeOptions& options) {
  BranchAndBound bb(phi, w, options);
  auto r = bb.run();
  if (!r) throw UnsatError();
  return std::move(*r);
}

std::vector<MpeResult> top_k_models(const CnfFormula& phi, const WeightMap& w, int k,
                                    const MpeOptions& options) {
  if (k < 1) throw std::invalid_argument("k must be at least 1");
  BranchAndBound bb(phi, w, options);
  std::vector<MpeResult> out;
  while (static_cast<int>(out.size()) < k) {
    auto r = bb.run();
    if (!r) break;
    bb.block(r->model);
    out.push_back(std::move(*r));
  }
  if (out.empty()) throw UnsatError();
  return out;
}

std::vector<Interpretation> k_optimal_dnf(const CnfFormula& phi, const WeightMap& w, int k,
                                          const MpeOptions& options) {
  if (k < 1) throw std::invalid_argument("k must be at least 1");
  // Each round maximizes the uncovered mass: the blocking clauses remove the
  // covered models, and a full model has no overlap with the others.
  BranchAndBound bb(phi, w, options);
  std::vector<Interpretation> chosen;
  while (static_cast<int>(chosen.size()) < k) {
    auto r = bb.run();
    if (!r) break;
    bb.block(r->model);
    chosen.push_back(std::move(r->model));
  }
  if (chosen.empty()) throw UnsatError();
  return chosen;
}

}  // namespace wmcgrad
