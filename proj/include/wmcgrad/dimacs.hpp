#pragma once

#include <istream>
#include <string>
#include <string_view>
#include <vector>

#include "wmcgrad/logic.hpp"

namespace wmcgrad {

// A parsed weighted DIMACS instance.
//
// Grammar (one item per line, leading whitespace ignored):
//   c p weight <lit> <w> [0]   weight of literal <lit> (MCC 2021+)
//   w <lit> <w> [0]            legacy weight line
//   c ...                      any other comment
//   p cnf <n> <m>              header, must precede clauses
//   <lit> ... 0                clause; may span lines
//
// A weight for -v sets w(v) = 1 - w. Declaring both polarities is accepted
// when they sum to 1; w(v) = w(-v) = 1 is read as "unweighted". Variables
// without a weight get w = 0.5 and count towards normalization_exponent, so
// the unit-weight count equals the parsed count times 2^normalization_exponent.
struct DimacsInstance {
  CnfFormula formula;
  WeightMap weights;
  int normalization_exponent = 0;
  // unweighted[v-1] is true when variable v had no effective weight.
  std::vector<bool> unweighted;
};

DimacsInstance parse_dimacs(std::istream& in);
DimacsInstance parse_dimacs(std::string_view text);
DimacsInstance read_dimacs_file(const std::string& path);

// Emits "p cnf", one "c p weight" line per weighted variable (17 significant
// digits), then the clauses. parse_dimacs(serialize_dimacs(x)) == x.
std::string serialize_dimacs(const DimacsInstance& instance);

}  // namespace wmcgrad
