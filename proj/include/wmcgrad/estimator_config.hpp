#pragma once

#include <cstddef>
#include <string>

#include "wmcgrad/samplers.hpp"

namespace wmcgrad {

enum class EstimatorKind {
  kExact,
  kSfe,
  kIndecater,
  kWeightme,
  kSte,
  kGumbel,
  kTnormProduct,
  kTnormGoedel,
  kKbest,
  kKoptimal,
  kMpe,
  kImle,
  kSemanticStrengthening,
  kUniformModel,
  kCatlog,
  kSampleTnormHybrid,
};

const char* to_string(EstimatorKind kind);
EstimatorKind estimator_kind_from_string(const std::string& name);

// Textual form: "<kind>[:key=value,...]", e.g. "weightme:s=100,sampler=hash"
// or "catlog:inner=gumbel,s=10,temp=2". Keys:
//   s         sample count (sfe, indecater, weightme, uniform-model, ste,
//             gumbel, imle, sample-tnorm-hybrid, catlog with gumbel inner)
//   k         number of models (kbest, koptimal)
//   kappa     merge budget (semantic-strengthening)
//   temp      temperature (gumbel, catlog with gumbel inner)
//   noise     perturbation scale (imle)
//   sampler   exact | hash | uniform (weightme)
//   baseline  rloo | none (sfe)
//   importance  0 | 1 (uniform-model)
//   inner     exact | tnorm-product | tnorm-goedel | gumbel (catlog)
// to_string() prints every key the kind uses, in the order above, so parse
// and to_string round-trip.
struct EstimatorConfig {
  EstimatorKind kind = EstimatorKind::kExact;
  size_t samples = 0;
  int k = 100;
  int kappa = 100;
  double temperature = 2.0;
  double noise_scale = 1.0;
  SamplerKind sampler = SamplerKind::kExactModel;
  bool rloo = true;
  bool importance = false;
  EstimatorKind inner = EstimatorKind::kTnormProduct;

  // Defaults for a kind: s = 10000 for SFE, 100 for WeightME and
  // uniform-model, 10 for the other sampling estimators; k = 100; kappa = 100;
  // temperature 2.
  static EstimatorConfig defaults(EstimatorKind kind);
  // Throws std::invalid_argument on unknown kinds, keys or bad values.
  static EstimatorConfig parse(const std::string& text);
  std::string to_string() const;

  friend bool operator==(const EstimatorConfig&, const EstimatorConfig&) = default;
};

}  // namespace wmcgrad
