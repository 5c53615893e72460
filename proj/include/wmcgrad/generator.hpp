#pragma once

#include <string>
#include <vector>

#include "wmcgrad/logic.hpp"
#include "wmcgrad/rng.hpp"

namespace wmcgrad {

struct PlantedSpec {
  int num_vars = 50;
  double clause_ratio = 4.0;  // clauses per variable
  int clause_width = 3;
  // When > 0 every clause draws its variables from a window of this many
  // consecutive indices; keeps the primal graph banded so that exact
  // compilation stays cheap at a few hundred variables.
  int window = 0;
};

struct Instance {
  std::string id;
  CnfFormula phi;
  Interpretation planted;  // a known model
};

// Random k-CNF with a planted model: clauses falsified by the planted
// assignment are rejected and redrawn.
Instance planted_cnf(const PlantedSpec& spec, RngStream& rng);

// Planted k-CNF extended with further planted-consistent clauses until the
// planted model is the only one. Throws LimitExceeded if that takes more than
// max_clauses clauses.
Instance planted_single_model(const PlantedSpec& spec, RngStream& rng, size_t max_clauses = 100000);

// Random 3-XOR system of full rank over n variables with a planted
// solution, encoded as 4 clauses per equation. The solution is unique, and
// the encoding makes the clause-independence assumption of the t-norms badly
// wrong (every clause of an equation shares all its variables).
Instance xor_chain(int num_vars, RngStream& rng);

// Bundled suites. Seeds fully determine the instances.
std::vector<Instance> random_suite(int count, int min_vars, int max_vars, uint64_t seed);
std::vector<Instance> single_model_suite(int count, int num_vars, uint64_t seed);
// Small instances for the optimization sweep: planted 3-CNFs and XOR systems.
std::vector<Instance> optimization_suite(uint64_t seed);

}  // namespace wmcgrad
