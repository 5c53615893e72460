#pragma once

#include <cstdint>
#include <cstdlib>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace wmcgrad {

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct UnsatError : std::runtime_error {
  UnsatError() : std::runtime_error("formula is unsatisfiable") {}
  using std::runtime_error::runtime_error;
};

struct LimitExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct BudgetExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A literal in DIMACS convention: +v or -v for a 1-based variable v.
class Literal {
 public:
  constexpr Literal() = default;
  constexpr explicit Literal(int dimacs) : code_(dimacs) {}
  constexpr Literal(int var, bool positive) : code_(positive ? var : -var) {}

  constexpr int var() const { return code_ < 0 ? -code_ : code_; }
  constexpr bool positive() const { return code_ > 0; }
  constexpr int dimacs() const { return code_; }
  constexpr Literal operator~() const { return Literal(-code_); }

  friend constexpr bool operator==(Literal, Literal) = default;
  friend constexpr auto operator<=>(Literal a, Literal b) { return a.code_ <=> b.code_; }

 private:
  int code_ = 0;
};

using Clause = std::vector<Literal>;

// Conjunction of clauses over variables 1..num_vars. No clauses means true;
// an empty clause means false.
struct CnfFormula {
  int num_vars = 0;
  std::vector<Clause> clauses;

  bool has_empty_clause() const;
  friend bool operator==(const CnfFormula&, const CnfFormula&) = default;
};

// Drops duplicate literals (keeping first occurrence order). Returns false if
// the clause is tautological.
bool normalize_clause(Clause& clause);

// Bernoulli parameter w(x) per variable; w(~x) = 1 - w(x).
class WeightMap {
 public:
  static constexpr double kDefaultClampMargin = 1e-6;

  WeightMap() = default;
  explicit WeightMap(int num_vars, double p = 0.5) : prob_(num_vars, p) {}
  explicit WeightMap(std::vector<double> probs) : prob_(std::move(probs)) {}

  int num_vars() const { return static_cast<int>(prob_.size()); }
  double prob(int var) const { return prob_[var - 1]; }
  void set(int var, double p);
  double operator()(Literal lit) const {
    const double p = prob_[lit.var() - 1];
    return lit.positive() ? p : 1.0 - p;
  }
  std::span<const double> probs() const { return prob_; }

  double clamp_margin() const { return clamp_margin_; }
  void set_clamp_margin(double m) { clamp_margin_ = m; }

  // Copy with every entry moved into [margin, 1 - margin].
  WeightMap clamped() const;
  bool is_binary() const;

  void resize(int num_vars, double p = 0.5) { prob_.resize(num_vars, p); }

  friend bool operator==(const WeightMap& a, const WeightMap& b) { return a.prob_ == b.prob_; }

 private:
  std::vector<double> prob_;
  double clamp_margin_ = kDefaultClampMargin;
};

// Total assignment of variables 1..n.
class Interpretation {
 public:
  Interpretation() = default;
  explicit Interpretation(int num_vars, bool value = false) : bits_(num_vars, value) {}
  explicit Interpretation(std::vector<uint8_t> bits) : bits_(std::move(bits)) {}

  // Builds from a list of literals; unspecified variables are false.
  static Interpretation from_literals(int num_vars, std::span<const Literal> lits);
  // Bit i of `code` is the value of variable i+1.
  static Interpretation from_index(int num_vars, uint64_t code);

  int num_vars() const { return static_cast<int>(bits_.size()); }
  bool value(int var) const { return bits_[var - 1] != 0; }
  void set(int var, bool v) { bits_[var - 1] = v ? 1 : 0; }
  bool satisfies(Literal lit) const { return value(lit.var()) == lit.positive(); }
  const std::vector<uint8_t>& bits() const { return bits_; }
  std::vector<Literal> literals() const;
  uint64_t index() const;

  friend bool operator==(const Interpretation&, const Interpretation&) = default;
  friend auto operator<=>(const Interpretation&, const Interpretation&) = default;

 private:
  std::vector<uint8_t> bits_;
};

// A consistent partial assignment.
class Implicant {
 public:
  Implicant() = default;
  explicit Implicant(std::vector<Literal> lits);

  const std::vector<Literal>& literals() const { return lits_; }
  bool contains(int var) const;

 private:
  std::vector<Literal> lits_;
};

CnfFormula condition(const CnfFormula& phi, Literal lit);
CnfFormula condition(const CnfFormula& phi, std::span<const Literal> lits);

bool evaluate(const CnfFormula& phi, const Interpretation& interp);
bool evaluate_clause(const Clause& clause, const Interpretation& interp);

double interpretation_prob(const Interpretation& interp, const WeightMap& w);
double log_interpretation_prob(const Interpretation& interp, const WeightMap& w);

// 1 - prod_{l in clause} w(~l). Exact marginal of the clause under independent
// Bernoulli variables.
double clause_prob(const Clause& clause, const WeightMap& w);

enum class TNorm { kProduct, kGoedel };

double fuzzy_eval(const CnfFormula& phi, const WeightMap& w, TNorm tnorm);

// True iff conditioning on all literals of pi makes phi valid.
bool is_implicant(const CnfFormula& phi, const Implicant& pi);

std::string to_string(Literal lit);
std::string to_string(const Interpretation& interp);

}  // namespace wmcgrad
