#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "wmcgrad/budget.hpp"
#include "wmcgrad/gradient.hpp"
#include "wmcgrad/logic.hpp"

namespace wmcgrad {

using NodeId = uint32_t;

struct CompileStats {
  size_t node_count = 0;
  size_t decision_nodes = 0;
  size_t cache_hits = 0;
  double wall_seconds = 0.0;
};

// Decision-DNNF circuit stored as an arena. Children always have smaller ids
// than their parents, so increasing id order is a topological order.
//
// Not smoothed: a variable missing below a node contributes the factor
// w(x) + w(~x) = 1, so values and gradients need no smoothing.
class DecisionDnnf {
 public:
  enum class Kind : uint8_t { kTrue, kFalse, kLiteral, kAnd, kDecision };

  struct Node {
    Kind kind = Kind::kTrue;
    Literal lit;          // kLiteral
    int var = 0;          // kDecision
    NodeId high = 0;      // kDecision, var = true
    NodeId low = 0;       // kDecision, var = false
    uint32_t first = 0;   // kAnd: children in [first, first + count)
    uint32_t count = 0;
  };

  static constexpr NodeId kTrueId = 0;
  static constexpr NodeId kFalseId = 1;

  explicit DecisionDnnf(int num_vars = 0);

  int num_vars() const { return num_vars_; }
  NodeId root() const { return root_; }
  void set_root(NodeId id) { root_ = id; }
  size_t size() const { return nodes_.size(); }
  const Node& node(NodeId id) const { return nodes_[id]; }
  std::span<const NodeId> children(NodeId id) const;
  const CompileStats& stats() const { return stats_; }
  CompileStats& mutable_stats() { return stats_; }

  NodeId add_literal(Literal lit);
  NodeId add_and(std::span<const NodeId> children);
  NodeId add_decision(int var, NodeId high, NodeId low);

  // Structural checks: decomposability, determinism of decisions, variable
  // range. Returns an empty string when the circuit is well formed.
  std::string validate() const;

  // One node per line: "<id> T", "<id> F", "<id> L <lit>",
  // "<id> A <child>...", "<id> D <var> <high> <low>"; last line "root <id>".
  void dump(std::ostream& out) const;

 private:
  int num_vars_ = 0;
  NodeId root_ = kTrueId;
  std::vector<Node> nodes_;
  std::vector<NodeId> child_store_;
  std::vector<NodeId> literal_nodes_;  // indexed by 2*var + polarity
  CompileStats stats_;
};

enum class BranchHeuristic {
  kMoms,             // most occurrences in shortest clauses
  kMostOccurrences,  // most occurrences overall
  kLowestIndex,
};

struct CompileOptions {
  size_t max_nodes = 10'000'000;
  double time_limit_seconds = 300.0;
  bool unlimited = false;  // ground-truth runs may disable both budgets
  BranchHeuristic heuristic = BranchHeuristic::kMoms;
};

// Exhaustive DPLL with unit propagation, connected-component decomposition
// and a canonical clause-set cache. Throws BudgetExceeded on node or time
// limits.
DecisionDnnf compile(const CnfFormula& phi, const CompileOptions& options = {});

struct WmcResult {
  double value = 0.0;
  int normalization_exponent = 0;
  CompileStats stats;

  // value * 2^normalization_exponent
  double scaled() const;
};

// Per-node values in id order.
std::vector<double> node_values(const DecisionDnnf& circuit, const WeightMap& w);

WmcResult wmc_eval(const DecisionDnnf& circuit, const WeightMap& w);

// One forward and one reverse pass; the gradient is of WMC.
std::pair<WmcResult, GradientVector> wmc_grad(const DecisionDnnf& circuit, const WeightMap& w);

// Gradient of log WMC; throws std::domain_error when WMC is zero.
GradientVector log_gradient(const GradientVector& wmc_gradient, double wmc);

}  // namespace wmcgrad
