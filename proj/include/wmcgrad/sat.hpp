#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "wmcgrad/budget.hpp"
#include "wmcgrad/logic.hpp"

namespace wmcgrad {

// XOR over `vars` equals `parity`.
struct ParityConstraint {
  std::vector<int> vars;
  bool parity = false;
};

struct SatInstance {
  CnfFormula base;
  std::vector<ParityConstraint> parity_constraints;
  std::vector<Literal> assumptions;
};

struct SolverOptions {
  uint64_t conflict_budget = 1'000'000;  // per solve() call
  Deadline deadline;
};

// Incremental CDCL solver: two watched literals, first-UIP learning, VSIDS,
// phase saving, Luby restarts and LBD-based clause database reduction.
// Clauses may be added between solve() calls.
class Solver {
 public:
  explicit Solver(int num_vars = 0, SolverOptions options = {});

  int num_vars() const { return static_cast<int>(assigns_.size()); }
  int new_var();

  // Returns false once the clause set is known to be unsatisfiable.
  bool add_clause(std::span<const Literal> lits);
  bool add_clause(std::initializer_list<Literal> lits) {
    return add_clause(std::span<const Literal>(lits.begin(), lits.size()));
  }
  void add_formula(const CnfFormula& phi);
  // Tseitin encoding in chunks of three with fresh auxiliary variables. With a
  // guard literal g every emitted clause gets ~g, so the constraint is active
  // only under the assumption g.
  void add_parity(const ParityConstraint& xc, Literal guard = Literal());

  // Throws BudgetExceeded (conflict budget) or TimeoutError (deadline).
  bool solve(std::span<const Literal> assumptions = {});

  bool model_value(int var) const { return model_[var - 1] != 0; }
  // Model restricted to variables 1..n.
  Interpretation model(int n) const;

  // Drops clauses satisfied at the top level, e.g. after a guard was retired.
  void simplify();

  bool okay() const { return ok_; }
  uint64_t conflicts() const { return total_conflicts_; }
  void set_options(const SolverOptions& opts) { opts_ = opts; }

 private:
  using Lit = int;  // 2 * (var - 1) + (negative ? 1 : 0)

  struct ClauseData {
    std::vector<Lit> lits;
    double activity = 0.0;
    int lbd = 0;
    bool learnt = false;
    bool deleted = false;
  };
  struct Watcher {
    int cref;
    Lit blocker;
  };

  static Lit encode(Literal l) { return 2 * (l.var() - 1) + (l.positive() ? 0 : 1); }
  static int var_of(Lit l) { return l >> 1; }

  int8_t value(Lit l) const {
    const int8_t a = assigns_[var_of(l)];
    return (l & 1) ? static_cast<int8_t>(-a) : a;
  }
  int level() const { return static_cast<int>(trail_lim_.size()); }

  void enqueue(Lit l, int reason);
  int propagate();
  void analyze(int confl, std::vector<Lit>& learnt, int& bt_level, int& lbd);
  bool redundant(Lit l) const;
  void cancel_until(int lvl);
  int attach(std::vector<Lit> lits, bool learnt, int lbd);
  void reduce_db();
  void rebuild_watches();
  int pick_branch();
  void bump_var(int v);
  void bump_clause(ClauseData& c);
  int search(int conflict_limit, std::span<const Lit> assumptions);

  // heap of variables ordered by activity
  void heap_insert(int v);
  int heap_pop();
  void heap_up(size_t i);
  void heap_down(size_t i);
  bool heap_less(int a, int b) const { return activity_[a] > activity_[b]; }

  SolverOptions opts_;
  bool ok_ = true;
  std::vector<ClauseData> clauses_;
  std::vector<std::vector<Watcher>> watches_;
  std::vector<int8_t> assigns_;
  std::vector<int8_t> phase_;
  std::vector<int> levels_;
  std::vector<int> reasons_;
  std::vector<uint8_t> seen_;
  std::vector<Lit> trail_;
  std::vector<int> trail_lim_;
  size_t qhead_ = 0;
  std::vector<double> activity_;
  double var_inc_ = 1.0;
  double clause_inc_ = 1.0;
  std::vector<int> heap_;
  std::vector<int> heap_pos_;
  std::vector<uint8_t> model_;
  size_t num_learnts_ = 0;
  double max_learnts_ = 0.0;
  uint64_t total_conflicts_ = 0;
  uint64_t call_conflicts_ = 0;
  std::vector<Lit> analyze_stack_;
  std::vector<int> level_stamp_;
  int stamp_ = 0;
};

struct SatResult {
  bool satisfiable = false;
  Interpretation model;  // over base.num_vars when satisfiable
};

SatResult solve(const SatInstance& instance, const SolverOptions& options = {});
bool is_satisfiable(const CnfFormula& phi, const SolverOptions& options = {});

// Up to max_count models of the solver's clauses, distinct on variables
// 1..num_vars, found with blocking clauses that stay in the solver. A nonzero
// guard is appended negated to each blocking clause (see Solver::add_parity).
std::vector<Interpretation> enumerate_projected(Solver& solver, int num_vars, size_t max_count,
                                                std::span<const Literal> assumptions = {},
                                                Literal guard = Literal());

// All models of phi. Throws LimitExceeded when there are more than `limit`.
std::vector<Interpretation> enumerate_models(const CnfFormula& phi, size_t limit,
                                             const SolverOptions& options = {});

}  // namespace wmcgrad
