#include "wmcgrad/circuit.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <unordered_map>

namespace wmcgrad {

const char* to_string(GradientOf of) { return of == GradientOf::kWmc ? "wmc" : "logwmc"; }

DecisionDnnf::DecisionDnnf(int num_vars)
    : num_vars_(num_vars), literal_nodes_(2 * static_cast<size_t>(num_vars) + 2, 0) {
  nodes_.push_back(Node{Kind::kTrue, Literal()});
  nodes_.push_back(Node{Kind::kFalse, Literal()});
}

std::span<const NodeId> DecisionDnnf::children(NodeId id) const {
  const Node& n = nodes_[id];
  if (n.kind != Kind::kAnd) return {};
  return std::span<const NodeId>(child_store_).subspan(n.first, n.count);
}

NodeId DecisionDnnf::add_literal(Literal lit) {
  if (lit.var() < 1 || lit.var() > num_vars_) throw std::out_of_range("literal out of range");
  NodeId& slot = literal_nodes_[2 * static_cast<size_t>(lit.var()) + (lit.positive() ? 1 : 0)];
  if (slot == 0) {
    slot = static_cast<NodeId>(nodes_.size());
    nodes_.push_back(Node{Kind::kLiteral, lit});
  }
  return slot;
}

NodeId DecisionDnnf::add_and(std::span<const NodeId> children) {
  size_t kept = 0;
  NodeId last = kTrueId;
  for (NodeId c : children) {
    if (c == kFalseId) return kFalseId;
    if (c != kTrueId) {
      ++kept;
      last = c;
    }
  }
  if (kept == 0) return kTrueId;
  if (kept == 1) return last;
  Node n{Kind::kAnd, Literal()};
  n.first = static_cast<uint32_t>(child_store_.size());
  n.count = static_cast<uint32_t>(kept);
  for (NodeId c : children)
    if (c != kTrueId) child_store_.push_back(c);
  nodes_.push_back(n);
  return static_cast<NodeId>(nodes_.size() - 1);
}

NodeId DecisionDnnf::add_decision(int var, NodeId high, NodeId low) {
  if (var < 1 || var > num_vars_) throw std::out_of_range("decision variable out of range");
  if (high == low) return high;
  nodes_.push_back(Node{Kind::kDecision, Literal(), var, high, low});
  return static_cast<NodeId>(nodes_.size() - 1);
}

std::string DecisionDnnf::validate() const {
  const size_t words = (static_cast<size_t>(num_vars_) + 64) / 64;
  std::vector<std::vector<uint64_t>> vars(nodes_.size(), std::vector<uint64_t>(words, 0));
  auto set_bit = [](std::vector<uint64_t>& b, int v) { b[v / 64] |= uint64_t{1} << (v % 64); };
  auto has_bit = [](const std::vector<uint64_t>& b, int v) { return (b[v / 64] >> (v % 64)) & 1u; };
  for (NodeId id = 0; id < nodes_.size(); ++id) {
    const Node& n = nodes_[id];
    switch (n.kind) {
      case Kind::kTrue:
      case Kind::kFalse:
        break;
      case Kind::kLiteral:
        if (n.lit.var() < 1 || n.lit.var() > num_vars_) return "literal out of range";
        set_bit(vars[id], n.lit.var());
        break;
      case Kind::kAnd:
        for (NodeId c : children(id)) {
          if (c >= id) return "child id not smaller than parent";
          for (size_t i = 0; i < words; ++i) {
            if (vars[id][i] & vars[c][i]) return "and node is not decomposable";
            vars[id][i] |= vars[c][i];
          }
        }
        break;
      case Kind::kDecision:
        if (n.var < 1 || n.var > num_vars_) return "decision variable out of range";
        if (n.high >= id || n.low >= id) return "child id not smaller than parent";
        if (has_bit(vars[n.high], n.var) || has_bit(vars[n.low], n.var))
          return "decision child mentions its own variable";
        for (size_t i = 0; i < words; ++i) vars[id][i] = vars[n.high][i] | vars[n.low][i];
        set_bit(vars[id], n.var);
        break;
    }
  }
  return {};
}

void DecisionDnnf::dump(std::ostream& out) const {
  for (NodeId id = 0; id < nodes_.size(); ++id) {
    const Node& n = nodes_[id];
    out << id << ' ';
    switch (n.kind) {
      case Kind::kTrue: out << 'T'; break;
      case Kind::kFalse: out << 'F'; break;
      case Kind::kLiteral: out << "L " << n.lit.dimacs(); break;
      case Kind::kAnd:
        out << 'A';
        for (NodeId c : children(id)) out << ' ' << c;
        break;
      case Kind::kDecision: out << "D " << n.var << ' ' << n.high << ' ' << n.low; break;
    }
    out << '\n';
  }
  out << "root " << root_ << '\n';
}

namespace {

// Clause sets are flat int vectors of DIMACS literals with 0 terminators.
using Flat = std::vector<int>;

struct FlatHash {
  size_t operator()(const Flat& f) const noexcept {
    uint64_t h = 1469598103934665603ull;
    for (int x : f) {
      h ^= static_cast<uint32_t>(x);
      h *= 1099511628211ull;
    }
    return static_cast<size_t>(h ^ (h >> 29));
  }
};

class Compiler {
 public:
  Compiler(int num_vars, const CompileOptions& opts)
      : opts_(opts),
        circuit_(num_vars),
        value_(num_vars + 1, 0),
        parent_(num_vars + 1, 0),
        score_(2 * static_cast<size_t>(num_vars) + 2, 0),
        deadline_(opts.unlimited ? Deadline::unbounded() : Deadline::after(opts.time_limit_seconds)) {}

  DecisionDnnf run(const CnfFormula& phi) {
    Stopwatch sw;
    Flat flat;
    for (const Clause& c : phi.clauses) {
      Clause norm = c;
      if (!normalize_clause(norm)) continue;
      if (norm.empty()) {
        circuit_.set_root(DecisionDnnf::kFalseId);
        finish(sw);
        return std::move(circuit_);
      }
      for (Literal l : norm) flat.push_back(l.dimacs());
      flat.push_back(0);
    }
    circuit_.set_root(compile_formula(flat, 0));
    finish(sw);
    return std::move(circuit_);
  }

 private:
  void finish(const Stopwatch& sw) {
    auto& st = circuit_.mutable_stats();
    st.node_count = circuit_.size();
    st.cache_hits = cache_hits_;
    st.decision_nodes = decisions_;
    st.wall_seconds = sw.seconds();
  }

  void check_budget() {
    if (opts_.unlimited) return;
    if (circuit_.size() > opts_.max_nodes) throw BudgetExceeded("compilation node budget exceeded");
    if ((++ticks_ & 255) == 0) deadline_.check();
  }

  void assign(int lit) {
    value_[std::abs(lit)] = lit > 0 ? 1 : -1;
    touched_.push_back(std::abs(lit));
  }
  int lit_value(int lit) const {
    const int v = value_[std::abs(lit)];
    return lit > 0 ? v : -v;
  }
  void reset_values() {
    for (int v : touched_) value_[v] = 0;
    touched_.clear();
  }

  // Conditions `in` on `lit` (0 = none) and unit-propagates. Returns false on
  // conflict. `implied` receives the propagated literals, not `lit` itself.
  bool propagate(const Flat& in, int lit, Flat& out, std::vector<int>& implied) {
    reset_values();
    implied.clear();
    if (lit != 0) assign(lit);
    Flat current = in;
    Flat next;
    for (;;) {
      bool changed = false;
      next.clear();
      size_t start = 0;
      for (size_t i = 0; i < current.size(); ++i) {
        if (current[i] != 0) continue;
        bool sat = false;
        int unassigned = 0, last = 0;
        for (size_t j = start; j < i; ++j) {
          const int lv = lit_value(current[j]);
          if (lv > 0) {
            sat = true;
            break;
          }
          if (lv == 0) {
            ++unassigned;
            last = current[j];
          }
        }
        if (!sat) {
          if (unassigned == 0) {
            reset_values();
            return false;
          }
          if (unassigned == 1) {
            assign(last);
            implied.push_back(last);
            changed = true;
          } else {
            for (size_t j = start; j < i; ++j)
              if (lit_value(current[j]) == 0) next.push_back(current[j]);
            next.push_back(0);
          }
        }
        start = i + 1;
      }
      current.swap(next);
      if (!changed) break;
    }
    // The last round assigned nothing, so `current` is fully simplified.
    out.swap(current);
    reset_values();
    return true;
  }

  int find(int v) {
    while (parent_[v] != v) {
      parent_[v] = parent_[parent_[v]];
      v = parent_[v];
    }
    return v;
  }

  std::vector<Flat> components(const Flat& flat) {
    std::vector<int> vars;
    for (int lit : flat)
      if (lit != 0 && parent_[std::abs(lit)] == 0) {
        parent_[std::abs(lit)] = std::abs(lit);
        vars.push_back(std::abs(lit));
      }
    size_t start = 0;
    for (size_t i = 0; i < flat.size(); ++i) {
      if (flat[i] != 0) continue;
      const int root = find(std::abs(flat[start]));
      for (size_t j = start + 1; j < i; ++j) {
        const int r = find(std::abs(flat[j]));
        if (r != root) parent_[r] = root;
      }
      start = i + 1;
    }
    std::unordered_map<int, size_t> index;
    std::vector<std::vector<std::pair<size_t, size_t>>> groups;
    start = 0;
    for (size_t i = 0; i < flat.size(); ++i) {
      if (flat[i] != 0) continue;
      const int root = find(std::abs(flat[start]));
      auto [it, inserted] = index.try_emplace(root, groups.size());
      if (inserted) groups.emplace_back();
      groups[it->second].emplace_back(start, i);
      start = i + 1;
    }
    for (int v : vars) parent_[v] = 0;

    std::vector<Flat> out;
    out.reserve(groups.size());
    for (auto& g : groups) {
      std::vector<std::vector<int>> clauses;
      clauses.reserve(g.size());
      for (auto [b, e] : g) {
        std::vector<int> c(flat.begin() + b, flat.begin() + e);
        std::sort(c.begin(), c.end());
        clauses.push_back(std::move(c));
      }
      std::sort(clauses.begin(), clauses.end());
      Flat f;
      for (auto& c : clauses) {
        f.insert(f.end(), c.begin(), c.end());
        f.push_back(0);
      }
      out.push_back(std::move(f));
    }
    // Deterministic order of components.
    std::sort(out.begin(), out.end());
    return out;
  }

  int choose_var(const Flat& comp) {
    std::vector<int> touched;
    size_t min_len = SIZE_MAX;
    size_t start = 0;
    for (size_t i = 0; i < comp.size(); ++i)
      if (comp[i] == 0) {
        min_len = std::min(min_len, i - start);
        start = i + 1;
      }
    start = 0;
    for (size_t i = 0; i < comp.size(); ++i) {
      if (comp[i] != 0) continue;
      const bool shortest = (i - start) == min_len;
      for (size_t j = start; j < i; ++j) {
        const int v = std::abs(comp[j]);
        if (score_[v] == 0) touched.push_back(v);
        switch (opts_.heuristic) {
          case BranchHeuristic::kMoms: score_[v] += shortest ? 1024 + 1 : 1; break;
          case BranchHeuristic::kMostOccurrences: score_[v] += 1; break;
          case BranchHeuristic::kLowestIndex: score_[v] = 1; break;
        }
      }
      start = i + 1;
    }
    int best = 0;
    uint64_t best_score = 0;
    for (int v : touched) {
      const bool better = opts_.heuristic == BranchHeuristic::kLowestIndex
                              ? (best == 0 || v < best)
                              : (score_[v] > best_score || (score_[v] == best_score && v < best));
      if (better) {
        best = v;
        best_score = score_[v];
      }
    }
    for (int v : touched) score_[v] = 0;
    return best;
  }

  NodeId compile_formula(const Flat& flat, int lit) {
    check_budget();
    Flat residual;
    std::vector<int> implied;
    if (!propagate(flat, lit, residual, implied)) return DecisionDnnf::kFalseId;
    std::vector<NodeId> parts;
    parts.reserve(implied.size() + 4);
    for (int l : implied) parts.push_back(circuit_.add_literal(Literal(l)));
    if (!residual.empty()) {
      for (const Flat& comp : components(residual)) {
        const NodeId sub = compile_component(comp);
        if (sub == DecisionDnnf::kFalseId) return DecisionDnnf::kFalseId;
        parts.push_back(sub);
      }
    }
    return circuit_.add_and(parts);
  }

  NodeId compile_component(const Flat& comp) {
    if (auto it = cache_.find(comp); it != cache_.end()) {
      ++cache_hits_;
      return it->second;
    }
    const int var = choose_var(comp);
    const NodeId high = compile_formula(comp, var);
    const NodeId low = compile_formula(comp, -var);
    const NodeId node = circuit_.add_decision(var, high, low);
    if (node != high) ++decisions_;
    cache_.emplace(comp, node);
    return node;
  }

  CompileOptions opts_;
  DecisionDnnf circuit_;
  std::vector<int8_t> value_;
  std::vector<int> touched_;
  std::vector<int> parent_;
  std::vector<uint64_t> score_;
  std::unordered_map<Flat, NodeId, FlatHash> cache_;
  size_t cache_hits_ = 0;
  size_t decisions_ = 0;
  uint64_t ticks_ = 0;
  Deadline deadline_;
};

}  // namespace

DecisionDnnf compile(const CnfFormula& phi, const CompileOptions& options) {
  Compiler compiler(phi.num_vars, options);
  return compiler.run(phi);
}

double WmcResult::scaled() const { return std::ldexp(value, normalization_exponent); }

std::vector<double> node_values(const DecisionDnnf& circuit, const WeightMap& w) {
  if (w.num_vars() < circuit.num_vars()) throw std::invalid_argument("weight map too short");
  std::vector<double> val(circuit.size());
  for (NodeId id = 0; id < circuit.size(); ++id) {
    const auto& n = circuit.node(id);
    switch (n.kind) {
      case DecisionDnnf::Kind::kTrue: val[id] = 1.0; break;
      case DecisionDnnf::Kind::kFalse: val[id] = 0.0; break;
      case DecisionDnnf::Kind::kLiteral: val[id] = w(n.lit); break;
      case DecisionDnnf::Kind::kAnd: {
        double p = 1.0;
        for (NodeId c : circuit.children(id)) p *= val[c];
        val[id] = p;
        break;
      }
      case DecisionDnnf::Kind::kDecision: {
        const double p = w.prob(n.var);
        val[id] = p * val[n.high] + (1.0 - p) * val[n.low];
        break;
      }
    }
  }
  return val;
}

WmcResult wmc_eval(const DecisionDnnf& circuit, const WeightMap& w) {
  WmcResult r;
  r.value = node_values(circuit, w)[circuit.root()];
  r.stats = circuit.stats();
  return r;
}

std::pair<WmcResult, GradientVector> wmc_grad(const DecisionDnnf& circuit, const WeightMap& w) {
  const auto val = node_values(circuit, w);
  WmcResult r;
  r.value = val[circuit.root()];
  r.stats = circuit.stats();
  GradientVector grad(circuit.num_vars(), GradientOf::kWmc);
  std::vector<double> adj(circuit.size(), 0.0);
  adj[circuit.root()] = 1.0;
  std::vector<double> prefix;
  for (NodeId id = static_cast<NodeId>(circuit.root() + 1); id-- > 0;) {
    const double a = adj[id];
    if (a == 0.0) continue;
    const auto& n = circuit.node(id);
    switch (n.kind) {
      case DecisionDnnf::Kind::kTrue:
      case DecisionDnnf::Kind::kFalse:
        break;
      case DecisionDnnf::Kind::kLiteral:
        grad[n.lit.var()] += n.lit.positive() ? a : -a;
        break;
      case DecisionDnnf::Kind::kAnd: {
        const auto ch = circuit.children(id);
        prefix.assign(ch.size() + 1, 1.0);
        for (size_t i = 0; i < ch.size(); ++i) prefix[i + 1] = prefix[i] * val[ch[i]];
        double suffix = 1.0;
        for (size_t i = ch.size(); i-- > 0;) {
          adj[ch[i]] += a * prefix[i] * suffix;
          suffix *= val[ch[i]];
        }
        break;
      }
      case DecisionDnnf::Kind::kDecision: {
        const double p = w.prob(n.var);
        adj[n.high] += a * p;
        adj[n.low] += a * (1.0 - p);
        grad[n.var] += a * (val[n.high] - val[n.low]);
        break;
      }
    }
  }
  return {r, grad};
}

GradientVector log_gradient(const GradientVector& g, double wmc) {
  if (!(wmc > 0.0)) throw std::domain_error("log gradient of a zero weighted model count");
  GradientVector out = g;
  out.of = GradientOf::kLogWmc;
  for (double& x : out.values) x /= wmc;
  return out;
}

}  // namespace wmcgrad
