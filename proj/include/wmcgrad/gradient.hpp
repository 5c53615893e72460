#pragma once

#include <vector>

namespace wmcgrad {

enum class GradientOf { kWmc, kLogWmc };

// Per-variable partial derivatives; values[v-1] belongs to variable v.
struct GradientVector {
  std::vector<double> values;
  GradientOf of = GradientOf::kWmc;

  GradientVector() = default;
  GradientVector(int num_vars, GradientOf o) : values(num_vars, 0.0), of(o) {}

  int num_vars() const { return static_cast<int>(values.size()); }
  double& operator[](int var) { return values[var - 1]; }
  double operator[](int var) const { return values[var - 1]; }
};

const char* to_string(GradientOf of);

}  // namespace wmcgrad
