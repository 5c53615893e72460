#pragma once

#include <span>
#include <utility>
#include <vector>

#include "wmcgrad/logic.hpp"

namespace wmcgrad {

// Chain encoding of a categorical variable with k outcomes into Boolean
// variables. Outcome indicators a_1..a_k are unweighted (w = 0.5, counted in
// normalization_exponent); theta_i carries P(a_i) / P(A not in {a_1..a_{i-1}}).
//
//   a_1 <-> theta_1
//   a_i <-> ~a_1 & ... & ~a_{i-1} & theta_i     (1 < i < k)
//   a_k <-> ~a_1 & ... & ~a_{k-1}
struct CategoricalEncoding {
  CnfFormula fragment;  // num_vars covers every variable up to the last one emitted
  std::vector<int> indicator_vars;
  std::vector<int> theta_vars;
  std::vector<std::pair<int, double>> theta_weights;
  int normalization_exponent = 0;

  // Weight map over fragment.num_vars with theta weights applied and every
  // other variable at 0.5.
  WeightMap weight_map() const;
};

// Fresh variables start at first_var. Probabilities must lie in [0,1] and sum
// to 1 within 1e-9. Outcomes that are unreachable (zero remaining mass) get
// theta weight 0.
CategoricalEncoding encode_categorical(std::span<const double> probabilities, int first_var = 1);

}  // namespace wmcgrad
