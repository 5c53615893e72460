#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "wmcgrad/budget.hpp"
#include "wmcgrad/circuit.hpp"
#include "wmcgrad/logic.hpp"
#include "wmcgrad/rng.hpp"
#include "wmcgrad/sat.hpp"

namespace wmcgrad {

enum class SamplerKind { kInterpretation, kExactModel, kHashModel, kUniformModel };

const char* to_string(SamplerKind kind);
SamplerKind sampler_kind_from_string(const std::string& name);

struct SamplerSpec {
  SamplerKind kind = SamplerKind::kExactModel;
  double epsilon = 0.1;
  double delta = 0.05;
  int pivot = 73;             // largest cell the hash sampler enumerates
  // Probability that a variable joins an XOR. Any density keeps each model's
  // chance of landing in the chosen cell at exactly 2^-m (the parity bit is
  // uniform); below 1/2 the cells are no longer pairwise independent, so cell
  // sizes spread and overfull cells are skipped more often.
  double xor_density = 0.5;
  size_t max_samples = 10000; // sampling budget behind the tractability threshold
  // Hash sampler: accept a cell with probability W(cell)/B, B the largest cell
  // weight seen so far. Without it the draw is weight-proportional within the
  // cell only, which over-samples models that land in light cells.
  bool weight_correction = true;
  int max_rejections = 256;   // consecutive rejections before accepting anyway
  int max_cell_attempts = 4096;
  // Conflicts allowed per solver call while enumerating a cell. Cells over
  // budget are skipped like overfull ones; without the cap a single cell with
  // many long XORs and no models can stall the sampler for minutes.
  uint64_t cell_conflict_budget = 20000;
  // When phi has at most this many models they are enumerated once and each
  // cell is computed by filtering that list against the parity constraints.
  // Cell contents are identical to the SAT route, only cheaper.
  size_t model_cache_limit = 4096;
  SolverOptions solver;
};

// s independent interpretations, variable x true with probability w(x).
std::vector<Interpretation> sample_interpretations(const WeightMap& w, size_t s, RngStream& rng);

// Top-down sampling from a compiled circuit: a model M is drawn with
// probability P(M; w) / WMC. The circuit must outlive the sampler.
class ExactModelSampler {
 public:
  // Throws UnsatError for a false circuit, std::domain_error if WMC = 0.
  ExactModelSampler(const DecisionDnnf& circuit, const WeightMap& w);

  Interpretation draw(RngStream& rng) const;
  double wmc() const { return values_[circuit_->root()]; }

 private:
  const DecisionDnnf* circuit_;
  WeightMap w_;
  std::vector<double> values_;
};

Interpretation exact_model_sample(const DecisionDnnf& circuit, const WeightMap& w, RngStream& rng);

// Approximate weighted model sampling by random parity hashing. Each draw
// adds m random XOR constraints over the formula's variables, enumerates the
// surviving cell when it holds between 1 and pivot models, and picks a cell
// model in proportion to its weight. m is chosen once, at construction, so
// that a cell holds about pivot/2 models; when the whole model set fits in
// one cell no hashing is done and sampling is exact.
class HashModelSampler {
 public:
  // Throws UnsatError when phi has no model.
  HashModelSampler(const CnfFormula& phi, const WeightMap& w, const SamplerSpec& spec, RngStream& rng);
  ~HashModelSampler();
  HashModelSampler(HashModelSampler&&) noexcept;

  // Throws BudgetExceeded after spec.max_cell_attempts unusable cells.
  Interpretation draw(RngStream& rng);

  bool exact() const { return !models_.empty(); }
  bool cached() const { return !cache_.empty(); }
  int num_xors() const { return m_; }
  size_t cells_enumerated() const { return cells_; }
  size_t cells_aborted() const { return aborted_; }

 private:
  // nullopt when the cell hit the conflict budget.
  std::optional<std::vector<Interpretation>> cell(int m, RngStream& rng);
  double log_weight(const Interpretation& m) const;
  void reset_solver();
  int estimate_xors(RngStream& rng);
  const Interpretation& pick(const std::vector<Interpretation>& models, const std::vector<double>& logw,
                             double log_total, RngStream& rng) const;

  CnfFormula phi_;
  WeightMap w_;
  SamplerSpec spec_;
  std::unique_ptr<Solver> solver_;
  int solver_uses_ = 0;
  std::vector<Interpretation> models_;  // whole model set when it fits one cell
  std::vector<Interpretation> cache_;   // see SamplerSpec::model_cache_limit
  std::vector<std::vector<uint64_t>> cache_bits_;
  std::vector<double> model_logw_;
  double models_log_total_ = 0.0;
  int m_ = 0;
  double log_bound_ = 0.0;
  bool have_bound_ = false;
  size_t cells_ = 0;
  size_t aborted_ = 0;
};

Interpretation hash_model_sample(const CnfFormula& phi, const WeightMap& w, const SamplerSpec& spec,
                                 RngStream& rng);

// Hash sampling with every weight at 0.5: approximately uniform over models.
Interpretation uniform_model_sample(const CnfFormula& phi, RngStream& rng, const SamplerSpec& spec = {});

}  // namespace wmcgrad
