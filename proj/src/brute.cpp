#include "wmcgrad/brute.hpp"

#include <string>

namespace wmcgrad {
namespace {

void check_limit(const CnfFormula& phi, int max_vars) {
  if (phi.num_vars > max_vars || phi.num_vars > 62)
    throw LimitExceeded("brute force limited to " + std::to_string(max_vars) + " variables");
}

}  // namespace

WmcResult wmc_brute(const CnfFormula& phi, const WeightMap& w, int max_vars) {
  check_limit(phi, max_vars);
  WmcResult r;
  const uint64_t total = uint64_t{1} << phi.num_vars;
  for (uint64_t code = 0; code < total; ++code) {
    const auto interp = Interpretation::from_index(phi.num_vars, code);
    if (evaluate(phi, interp)) r.value += interpretation_prob(interp, w);
  }
  return r;
}

std::vector<Interpretation> brute_force_models(const CnfFormula& phi, int max_vars) {
  check_limit(phi, max_vars);
  std::vector<Interpretation> out;
  const uint64_t total = uint64_t{1} << phi.num_vars;
  for (uint64_t code = 0; code < total; ++code) {
    auto interp = Interpretation::from_index(phi.num_vars, code);
    if (evaluate(phi, interp)) out.push_back(std::move(interp));
  }
  return out;
}

}  // namespace wmcgrad
